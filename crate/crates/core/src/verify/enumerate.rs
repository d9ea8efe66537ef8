//! Node state-space census for the compact encodings.

use std::collections::BTreeSet;

use serde::Serialize;

use super::model_check::{Checked, Ranking, Voting};
use crate::error::{Error, Result};
use crate::protocol::{all_outcomes, RankingState, ValueSet, Variant, VotingState};

/// Largest K whose ranking states are listed (8 * 8! = 322560).
pub const MAX_RANKING_K: usize = 8;
/// Reachable closures are computed up to these K.
pub const CLOSURE_VOTING_K: usize = 8;
pub const CLOSURE_RANKING_K: usize = 6;

#[derive(Debug, Clone, Serialize)]
pub struct StateCensus {
    pub k: usize,
    pub variant: Variant,
    /// Number of syntactically valid node states.
    pub syntactic: usize,
    /// Node states in the closure of the single-vote initial states under the
    /// step rule (all random branches), when within the closure limit.
    pub reachable: Option<usize>,
    /// Reachable states in readable form, sorted.
    pub listing: Vec<String>,
}

fn closure<P: Checked>(proto: &P, seeds: impl IntoIterator<Item = P::State>) -> BTreeSet<P::State> {
    let mut seen: BTreeSet<P::State> = seeds.into_iter().collect();
    let mut frontier: Vec<P::State> = seen.iter().copied().collect();
    while !frontier.is_empty() {
        let known: Vec<P::State> = seen.iter().copied().collect();
        let mut fresh = Vec::new();
        for &a in &frontier {
            for &b in &known {
                for (x, y) in all_outcomes(|c| proto.step(a, b, c))
                    .into_iter()
                    .chain(all_outcomes(|c| proto.step(b, a, c)))
                {
                    for s in [x, y] {
                        if seen.insert(s) {
                            fresh.push(s);
                        }
                    }
                }
            }
        }
        frontier = fresh;
    }
    seen
}

fn voting_label(s: VotingState) -> String {
    let rest: Vec<String> = s.rest().iter().map(|c| format!("c{}", c + 1)).collect();
    format!("(c{}, {{{}}})", s.leader() + 1, rest.join(","))
}

fn ranking_label(s: RankingState) -> String {
    let order: Vec<String> = s.order().iter().map(|c| format!("c{}", c + 1)).collect();
    format!("[{}] p={}", order.join(","), s.pointer())
}

/// Counts the node states of a compact encoding for `k` choices.
pub fn enumerate_states(k: usize, variant: Variant) -> Result<StateCensus> {
    let singles = (0..k).map(ValueSet::singleton);
    match variant {
        Variant::CompactVoting | Variant::EnhancedVoting => {
            if k == 0 || k > crate::protocol::MAX_CHOICES {
                return Err(Error::Refused(format!("voting census needs 1 <= K <= 16, got {k}")));
            }
            let syntactic = VotingState::all(k).count();
            let proto = Voting {
                k,
                enhanced: variant == Variant::EnhancedVoting,
            };
            let reach = (k <= CLOSURE_VOTING_K).then(|| closure(&proto, singles.map(VotingState::initial)));
            Ok(StateCensus {
                k,
                variant,
                syntactic,
                reachable: reach.as_ref().map(|r| r.len()),
                listing: reach.into_iter().flatten().map(voting_label).collect(),
            })
        }
        Variant::CompactRanking => {
            if k == 0 || k > MAX_RANKING_K {
                return Err(Error::Refused(format!("ranking census needs 1 <= K <= 8, got {k}")));
            }
            let syntactic = RankingState::all(k).len();
            let proto = Ranking { k };
            let reach = (k <= CLOSURE_RANKING_K)
                .then(|| closure(&proto, singles.map(|v| RankingState::initial(v, k))));
            Ok(StateCensus {
                k,
                variant,
                syntactic,
                reachable: reach.as_ref().map(|r| r.len()),
                listing: reach.into_iter().flatten().map(ranking_label).collect(),
            })
        }
        Variant::ExplicitRanking => Err(Error::Refused(
            "explicit-ranking states are not a fixed finite encoding".into(),
        )),
    }
}
