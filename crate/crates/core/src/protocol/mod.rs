//! The union/intersection voting and ranking state machine.
//!
//! Three node representations live here:
//!
//! * the explicit one, a [`ValueSet`] plus a [`MemoryBank`] of one set per size;
//! * [`VotingState`], the compact `(leader, rest)` pair with `K * 2^(K-1)` states;
//! * [`RankingState`], a permutation of the choices plus a pointer, `K * K!` states.
//!
//! All step functions are pure apart from the explicit [`Choices`] source,
//! which lets the same code run under a seeded RNG or under exhaustive
//! enumeration of every random outcome.

mod memory;
mod profile;
mod ranking;
mod value_set;
mod voting;

pub use memory::{disseminate, MemoryBank, UNDECIDED};
pub use profile::{counts_from_fractions, VoteProfile};
pub use ranking::{ranking_step, RankingState};
pub use value_set::{consolidate, ValueSet, MAX_CHOICES};
pub use voting::{enhanced_step, voting_step, ExplicitVoter, VotingState};

use serde::{Deserialize, Serialize};

/// Source of the protocol's random decisions.
///
/// Any [`rand::Rng`] is a source; the verifier supplies a scripted one to walk
/// every branch.
pub trait Choices {
    /// Uniform index in `0..len`.
    fn pick(&mut self, len: usize) -> usize;
    /// Fair coin.
    fn coin(&mut self) -> bool;
}

impl<R: rand::Rng + ?Sized> Choices for R {
    #[inline]
    fn pick(&mut self, len: usize) -> usize {
        self.random_range(0..len)
    }

    #[inline]
    fn coin(&mut self) -> bool {
        self.random_bool(0.5)
    }
}

/// A full ordering of the choices, best first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ranking(pub Vec<usize>);

impl Ranking {
    /// Packs the ordering into 4-bit fields, first choice in the low nibble.
    pub fn key(&self) -> u64 {
        pack_order(&self.0)
    }
}

#[inline]
pub(crate) fn pack_order(order: &[usize]) -> u64 {
    order
        .iter()
        .enumerate()
        .fold(0u64, |acc, (pos, &c)| acc | ((c as u64) << (4 * pos)))
}

/// The protocol flavour a simulation runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Value set plus one memory per size; reads out the full ranking.
    ExplicitRanking,
    /// `(leader, rest)` pairs; reads out the majority.
    CompactVoting,
    /// Permutation plus pointer; reads out the full ranking.
    CompactRanking,
    /// Compact voting plus the random leader copy between non-singleton sets.
    EnhancedVoting,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::ExplicitRanking,
        Variant::CompactVoting,
        Variant::CompactRanking,
        Variant::EnhancedVoting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::ExplicitRanking => "explicit-ranking",
            Variant::CompactVoting => "compact-voting",
            Variant::CompactRanking => "compact-ranking",
            Variant::EnhancedVoting => "enhanced-voting",
        }
    }

    /// Whether the readout is the full ranking (otherwise the majority choice).
    pub fn ranks(self) -> bool {
        matches!(self, Variant::ExplicitRanking | Variant::CompactRanking)
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| crate::Error::Config(format!("unknown variant `{s}`")))
    }
}

/// Replays a fixed decision sequence (missing entries read as 0) and records
/// the arity of every decision point it is asked for.
#[derive(Debug, Clone, Default)]
pub struct ScriptedChoices {
    script: Vec<usize>,
    arities: Vec<usize>,
}

impl ScriptedChoices {
    pub fn new(script: Vec<usize>) -> Self {
        Self {
            script,
            arities: Vec::new(),
        }
    }

    /// Arity of each decision consumed so far.
    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn consumed(&self) -> usize {
        self.arities.len()
    }
}

impl Choices for ScriptedChoices {
    fn pick(&mut self, len: usize) -> usize {
        let v = self.script.get(self.arities.len()).copied().unwrap_or(0);
        assert!(v < len, "scripted choice {v} out of range 0..{len}");
        self.arities.push(len);
        v
    }

    fn coin(&mut self) -> bool {
        self.pick(2) == 1
    }
}

/// Runs `step` once for every distinct sequence of random decisions it can
/// make and collects the results (duplicates included).
pub fn all_outcomes<T>(mut step: impl FnMut(&mut ScriptedChoices) -> T) -> Vec<T> {
    let mut out = Vec::new();
    let mut script = Vec::new();
    loop {
        let mut choices = ScriptedChoices::new(script.clone());
        out.push(step(&mut choices));
        let arities = choices.arities().to_vec();
        script.resize(arities.len(), 0);
        // odometer over the decision tree, last decision fastest
        let Some(pos) = (0..arities.len()).rev().find(|&p| script[p] + 1 < arities[p]) else {
            return out;
        };
        script[pos] += 1;
        script.truncate(pos + 1);
    }
}
