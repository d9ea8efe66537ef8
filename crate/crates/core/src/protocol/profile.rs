use serde::{Deserialize, Serialize};

use super::value_set::{ValueSet, MAX_CHOICES};
use super::Ranking;
use crate::error::{Error, Result};

/// Initial votes of every node, with per-choice counts.
///
/// A node may vote for several choices; the count of a choice is the number of
/// nodes whose initial set contains it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteProfile {
    k: usize,
    votes: Vec<ValueSet>,
    counts: Vec<u32>,
}

impl VoteProfile {
    pub fn new(votes: Vec<ValueSet>, k: usize) -> Result<Self> {
        if k == 0 || k > MAX_CHOICES {
            return Err(Error::UnsupportedK(k));
        }
        let full = ValueSet::full(k);
        if let Some(node) = votes
            .iter()
            .position(|v| v.is_empty() || !v.is_subset(full))
        {
            return Err(Error::InvalidVote { node });
        }
        let counts = (0..k)
            .map(|c| votes.iter().filter(|v| v.contains(c)).count() as u32)
            .collect();
        Ok(Self { k, votes, counts })
    }

    /// Single-vote profile with `counts[c]` nodes voting for `c`, laid out in
    /// choice order.
    pub fn from_counts(counts: &[u32]) -> Result<Self> {
        if counts.is_empty() || counts.len() > MAX_CHOICES {
            return Err(Error::UnsupportedK(counts.len()));
        }
        let votes = counts
            .iter()
            .enumerate()
            .flat_map(|(c, &m)| std::iter::repeat_n(ValueSet::singleton(c), m as usize))
            .collect();
        Self::new(votes, counts.len())
    }

    pub fn choices(&self) -> usize {
        self.k
    }

    pub fn node_count(&self) -> usize {
        self.votes.len()
    }

    pub fn votes(&self) -> &[ValueSet] {
        &self.votes
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn fractions(&self) -> Vec<f64> {
        let n = self.votes.len() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Whether every node voted for exactly one choice.
    pub fn single_vote(&self) -> bool {
        self.votes.iter().all(|v| v.len() == 1)
    }

    /// Whether all counts are pairwise distinct.
    pub fn strictly_ordered(&self) -> bool {
        let mut c = self.counts.clone();
        c.sort_unstable();
        c.windows(2).all(|w| w[0] != w[1])
    }

    /// Choices by decreasing count, or `None` when two counts tie.
    pub fn ranking(&self) -> Option<Ranking> {
        if !self.strictly_ordered() {
            return None;
        }
        let mut order: Vec<usize> = (0..self.k).collect();
        order.sort_by(|&a, &b| self.counts[b].cmp(&self.counts[a]));
        Some(Ranking(order))
    }

    /// The choice with the strictly largest count.
    pub fn majority(&self) -> Option<usize> {
        let max = *self.counts.iter().max()?;
        let mut winners = (0..self.k).filter(|&c| self.counts[c] == max);
        let first = winners.next()?;
        winners.next().is_none().then_some(first)
    }

    pub(crate) fn with_votes(&self, votes: Vec<ValueSet>) -> Self {
        debug_assert_eq!(votes.len(), self.votes.len());
        Self {
            k: self.k,
            votes,
            counts: self.counts.clone(),
        }
    }
}

/// Integral counts summing to `n` from target fractions, by largest remainder.
/// Remainder ties go to the lower choice index.
pub fn counts_from_fractions(n: usize, fractions: &[f64]) -> Result<Vec<u32>> {
    if fractions.is_empty() || fractions.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(Error::Config(format!("bad fractions {fractions:?}")));
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("fractions sum to {total}, not 1")));
    }
    let exact: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut counts: Vec<u32> = exact.iter().map(|x| x.floor() as u32).collect();
    let assigned: usize = counts.iter().map(|&c| c as usize).sum();
    let mut by_remainder: Vec<usize> = (0..exact.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &c in by_remainder.iter().take(n.saturating_sub(assigned)) {
        counts[c] += 1;
    }
    Ok(counts)
}
