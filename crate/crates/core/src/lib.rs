//! Union/intersection gossip voting and ranking: the node state machine in
//! explicit and compact form, an asynchronous simulator, closed-form timing
//! formulas for complete graphs, exhaustive small-scale checkers and a sweep
//! harness that writes plot-ready CSV.

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod protocol;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
pub use graph::Graph;
pub use protocol::{Variant, VoteProfile};
pub use sim::{Scenario, Trajectory};
