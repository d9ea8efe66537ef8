use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest supported number of choices; a set fits in a 16-bit mask.
pub const MAX_CHOICES: usize = 16;

/// A subset of the choices `{0, .., K-1}`, stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueSet(u16);

impl ValueSet {
    pub const EMPTY: ValueSet = ValueSet(0);

    pub const fn from_bits(bits: u16) -> Self {
        ValueSet(bits)
    }

    pub const fn bits(self) -> u16 {
        self.0
    }

    pub fn singleton(choice: usize) -> Self {
        debug_assert!(choice < MAX_CHOICES);
        ValueSet(1 << choice)
    }

    /// The full choice set of size `k`.
    pub fn full(k: usize) -> Self {
        debug_assert!((1..=MAX_CHOICES).contains(&k));
        ValueSet((((1u32) << k) - 1) as u16)
    }

    pub fn from_choices<I: IntoIterator<Item = usize>>(choices: I) -> Self {
        choices
            .into_iter()
            .fold(Self::EMPTY, |acc, c| acc.with(c))
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, choice: usize) -> bool {
        choice < MAX_CHOICES && self.0 & (1 << choice) != 0
    }

    #[inline]
    pub fn is_subset(self, other: ValueSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn union(self, other: ValueSet) -> Self {
        ValueSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: ValueSet) -> Self {
        ValueSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: ValueSet) -> Self {
        ValueSet(self.0 & !other.0)
    }

    pub fn with(self, choice: usize) -> Self {
        debug_assert!(choice < MAX_CHOICES);
        ValueSet(self.0 | (1 << choice))
    }

    pub fn without(self, choice: usize) -> Self {
        ValueSet(self.0 & !(1 << choice))
    }

    /// Smallest member.
    pub fn first(self) -> Option<usize> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() as usize)
    }

    /// The `idx`-th member in ascending order.
    pub fn nth(self, idx: usize) -> Option<usize> {
        self.iter().nth(idx)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let c = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(c)
            }
        })
    }
}

impl fmt::Debug for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// One pairwise consolidation: the node holding the smaller set (the initiator
/// `i` on ties) takes the union and the other the intersection. Returns the
/// post-interaction sets of `(i, j)`.
#[inline]
pub fn consolidate(vi: ValueSet, vj: ValueSet) -> (ValueSet, ValueSet) {
    if vi.len() <= vj.len() {
        (vi.union(vj), vi.intersection(vj))
    } else {
        (vi.intersection(vj), vi.union(vj))
    }
}
