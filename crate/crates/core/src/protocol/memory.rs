use serde::{Deserialize, Serialize};

use super::value_set::{ValueSet, MAX_CHOICES};
use super::Ranking;

/// Readout key of a bank whose levels do not yet spell out a ranking.
pub const UNDECIDED: u64 = u64::MAX;

/// Per-node memory: level `k` (1-based) holds the most recent value set of
/// size `k` the node has held. Unset levels are empty.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MemoryBank {
    k: u8,
    levels: [ValueSet; MAX_CHOICES],
}

impl MemoryBank {
    pub fn new(k: usize) -> Self {
        assert!((1..=MAX_CHOICES).contains(&k), "K = {k} out of range");
        Self {
            k: k as u8,
            levels: [ValueSet::EMPTY; MAX_CHOICES],
        }
    }

    pub fn from_levels(levels: &[ValueSet]) -> Self {
        let mut bank = Self::new(levels.len());
        bank.levels[..levels.len()].copy_from_slice(levels);
        bank
    }

    pub fn choices(&self) -> usize {
        self.k as usize
    }

    /// Level `size` (1-based).
    pub fn level(&self, size: usize) -> ValueSet {
        self.levels[size - 1]
    }

    pub fn levels(&self) -> &[ValueSet] {
        &self.levels[..self.k as usize]
    }

    /// Records `value` at the level matching its size; empty sets are not recorded.
    #[inline]
    pub fn record(&mut self, value: ValueSet) {
        if !value.is_empty() {
            self.levels[value.len() - 1] = value;
        }
    }

    /// The ranking `pi_k = m_k \ m_{k-1}`, or `None` while any level has the
    /// wrong size or the levels do not form a chain.
    pub fn readout(&self) -> Option<Ranking> {
        let k = self.k as usize;
        let mut order = Vec::with_capacity(k);
        let mut prev = ValueSet::EMPTY;
        for size in 1..=k {
            let cur = self.level_or_full(size);
            if cur.len() != size || !prev.is_subset(cur) {
                return None;
            }
            order.push(cur.difference(prev).first()?);
            prev = cur;
        }
        Some(Ranking(order))
    }

    /// [`MemoryBank::readout`] packed as in [`Ranking::key`], or [`UNDECIDED`].
    #[inline]
    pub fn readout_key(&self) -> u64 {
        let mut key = 0u64;
        let mut prev = ValueSet::EMPTY;
        for size in 1..=self.k as usize {
            let cur = self.level_or_full(size);
            if cur.len() != size || !prev.is_subset(cur) {
                return UNDECIDED;
            }
            let c = cur.difference(prev).first().expect("one new member") as u64;
            key |= c << (4 * (size - 1));
            prev = cur;
        }
        key
    }

    /// The only size-K set is the full set, so that level never needs recording
    /// (no node holds it when some choice got no vote).
    #[inline]
    fn level_or_full(&self, size: usize) -> ValueSet {
        if size == self.k as usize {
            ValueSet::full(self.k as usize)
        } else {
            self.levels[size - 1]
        }
    }

    /// The level-1 memory as a choice, when set.
    pub fn leader(&self) -> Option<usize> {
        self.levels[0].first()
    }
}

impl std::fmt::Debug for MemoryBank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.levels()).finish()
    }
}

/// Memory update for both endpoints of an interaction, given the consolidated
/// sets `vi`, `vj`.
pub fn disseminate(
    mut bank_i: MemoryBank,
    mut bank_j: MemoryBank,
    vi: ValueSet,
    vj: ValueSet,
) -> (MemoryBank, MemoryBank) {
    bank_i.record(vi);
    bank_j.record(vj);
    (bank_i, bank_j)
}
