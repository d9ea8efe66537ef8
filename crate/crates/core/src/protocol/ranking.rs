use serde::{Deserialize, Serialize};

use super::value_set::{ValueSet, MAX_CHOICES};
use super::Ranking;

/// Compact ranking node state: a permutation of the choices and a pointer
/// `1 <= p <= K`. The first `p` entries are the node's value set and, for
/// every `k`, the first `k` entries play the role of its size-`k` memory.
/// A pointer of `K` also stands for the empty set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RankingState {
    k: u8,
    pointer: u8,
    order: [u8; MAX_CHOICES],
}

impl RankingState {
    pub fn new(order: &[usize], pointer: usize) -> Option<Self> {
        let k = order.len();
        if k == 0 || k > MAX_CHOICES || !(1..=k).contains(&pointer) {
            return None;
        }
        let seen = ValueSet::from_choices(order.iter().copied().filter(|&c| c < k));
        if seen != ValueSet::full(k) {
            return None;
        }
        let mut packed = [0u8; MAX_CHOICES];
        for (slot, &c) in packed.iter_mut().zip(order) {
            *slot = c as u8;
        }
        Some(Self {
            k: k as u8,
            pointer: pointer as u8,
            order: packed,
        })
    }

    /// Voted choices first (ascending), then the remaining choices ascending;
    /// the pointer covers the vote.
    pub fn initial(vote: ValueSet, k: usize) -> Self {
        assert!(!vote.is_empty(), "initial vote must be nonempty");
        let others = ValueSet::full(k).difference(vote);
        let order: Vec<usize> = vote.iter().chain(others.iter()).collect();
        Self::new(&order, vote.len()).expect("valid initial ranking state")
    }

    pub fn choices(&self) -> usize {
        self.k as usize
    }

    pub fn pointer(&self) -> usize {
        self.pointer as usize
    }

    /// First entry of the order: the node's majority estimate.
    #[inline]
    pub fn head(&self) -> usize {
        self.order[0] as usize
    }

    pub fn order(&self) -> Vec<usize> {
        self.slots().iter().map(|&c| c as usize).collect()
    }

    #[inline]
    fn slots(&self) -> &[u8] {
        &self.order[..self.k as usize]
    }

    /// Set of the first `len` entries.
    #[inline]
    pub fn prefix(&self, len: usize) -> ValueSet {
        self.slots()[..len]
            .iter()
            .fold(ValueSet::EMPTY, |acc, &c| acc.with(c as usize))
    }

    #[inline]
    pub fn value_set(&self) -> ValueSet {
        self.prefix(self.pointer as usize)
    }

    pub fn readout(&self) -> Ranking {
        Ranking(self.order())
    }

    #[inline]
    pub fn readout_key(&self) -> u64 {
        self.slots()
            .iter()
            .enumerate()
            .fold(0u64, |acc, (pos, &c)| acc | ((c as u64) << (4 * pos)))
    }

    /// Stable three-way partition of the order: members of `first`, then of
    /// `second \ first`, then everything else.
    fn regroup(&self, first: ValueSet, second: ValueSet, pointer: usize) -> Self {
        let mut order = [0u8; MAX_CHOICES];
        let mut at = 0;
        let blocks = [first, second.difference(first), ValueSet::full(self.k as usize).difference(second)];
        for block in blocks {
            for &c in self.slots() {
                if block.contains(c as usize) {
                    order[at] = c;
                    at += 1;
                }
            }
        }
        debug_assert_eq!(at, self.k as usize);
        Self {
            k: self.k,
            pointer: pointer as u8,
            order,
        }
    }

    /// Every syntactically valid state: all permutations times all pointers.
    pub fn all(k: usize) -> Vec<RankingState> {
        let mut perms = Vec::new();
        let mut current: Vec<usize> = (0..k).collect();
        permutations(&mut current, 0, &mut perms);
        perms
            .iter()
            .flat_map(|p| (1..=k).map(move |ptr| RankingState::new(p, ptr).unwrap()))
            .collect()
    }
}

fn permutations(items: &mut Vec<usize>, from: usize, out: &mut Vec<Vec<usize>>) {
    if from == items.len() {
        out.push(items.clone());
        return;
    }
    for i in from..items.len() {
        items.swap(from, i);
        permutations(items, from + 1, out);
        items.swap(from, i);
    }
}

impl std::fmt::Debug for RankingState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}@{}", self.order(), self.pointer)
    }
}

/// One compact ranking interaction.
///
/// With `A1` the intersection and `A2` the union of the two prefix sets, both
/// nodes regroup their order as `[A1, A2 \ A1, rest]`, each keeping its own
/// relative order inside a block. The node with the smaller pointer (the
/// initiator on ties) gets pointer `|A2|`, the other `|A1|`, where an empty
/// `A1` is stored as `K`.
pub fn ranking_step(si: RankingState, sj: RankingState) -> (RankingState, RankingState) {
    debug_assert_eq!(si.k, sj.k);
    let k = si.k as usize;
    let (vi, vj) = (si.value_set(), sj.value_set());
    let inter = vi.intersection(vj);
    let union = vi.union(vj);
    let wide = union.len();
    let narrow = if inter.is_empty() { k } else { inter.len() };
    let (pi, pj) = if si.pointer <= sj.pointer {
        (wide, narrow)
    } else {
        (narrow, wide)
    };
    (si.regroup(inter, union, pi), sj.regroup(inter, union, pj))
}
