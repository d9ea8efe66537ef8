//! Independent oracles: exhaustive model checking of small complete graphs,
//! node state-space census, event-log auditing and paired-representation
//! equivalence runs.

mod audit;
mod enumerate;
mod equivalence;
mod model_check;

pub use audit::{audit_trace, AuditFailure, AuditReport, Invariant};
pub use enumerate::{enumerate_states, StateCensus, CLOSURE_RANKING_K, CLOSURE_VOTING_K, MAX_RANKING_K};
pub use equivalence::{
    equivalence_check, equivalence_check_with, Divergence, EquivalenceReport, Pairing, MAX_TRIAL_EVENTS,
};
pub use model_check::{model_check, strict_profiles, ModelCheckReport, Verdict, MAX_CHOICES, MAX_NODES};
