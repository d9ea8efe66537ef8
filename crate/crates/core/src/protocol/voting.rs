use serde::{Deserialize, Serialize};

use super::value_set::{consolidate, ValueSet};
use super::Choices;

/// Compact majority-voting node state: the memorised leader and the rest of
/// the value set. The implied value set `{leader} | rest` is never empty; an
/// empty intersection is represented by the full choice set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VotingState {
    leader: u8,
    rest: ValueSet,
}

impl VotingState {
    pub fn new(leader: usize, rest: ValueSet) -> Option<Self> {
        (leader < super::MAX_CHOICES && !rest.contains(leader)).then_some(Self {
            leader: leader as u8,
            rest,
        })
    }

    /// Seeds a node with its own vote: the smallest voted choice becomes the
    /// leader.
    pub fn initial(vote: ValueSet) -> Self {
        let leader = vote.first().expect("initial vote must be nonempty");
        Self::encode(leader, vote)
    }

    #[inline]
    fn encode(leader: usize, value: ValueSet) -> Self {
        debug_assert!(value.contains(leader));
        Self {
            leader: leader as u8,
            rest: value.without(leader),
        }
    }

    pub fn leader(self) -> usize {
        self.leader as usize
    }

    pub fn rest(self) -> ValueSet {
        self.rest
    }

    #[inline]
    pub fn value_set(self) -> ValueSet {
        self.rest.with(self.leader as usize)
    }

    /// The majority estimate held by this node.
    pub fn readout_majority(self) -> usize {
        self.leader as usize
    }

    /// Every syntactically valid state for `k` choices, `k * 2^(k-1)` of them.
    pub fn all(k: usize) -> impl Iterator<Item = VotingState> {
        let full = ValueSet::full(k).bits();
        (0..k).flat_map(move |leader| {
            (0..=full)
                .map(ValueSet::from_bits)
                .filter(move |rest| !rest.contains(leader))
                .map(move |rest| VotingState {
                    leader: leader as u8,
                    rest,
                })
        })
    }
}

#[inline]
fn repair<C: Choices + ?Sized>(leader: usize, value: ValueSet, choices: &mut C) -> usize {
    if value.contains(leader) {
        leader
    } else {
        let idx = choices.pick(value.len());
        value.nth(idx).expect("index within set")
    }
}

/// One compact voting interaction between initiator `si` and responder `sj`.
///
/// The implied value sets are consolidated, an empty output is replaced by the
/// full set, and a node whose leader fell out of its new set adopts a uniform
/// member of it. A random draw is consumed only for such a repair (`i` first).
pub fn voting_step<C: Choices + ?Sized>(
    si: VotingState,
    sj: VotingState,
    k: usize,
    choices: &mut C,
) -> (VotingState, VotingState) {
    let full = ValueSet::full(k);
    let (mut vi, mut vj) = consolidate(si.value_set(), sj.value_set());
    if vi.is_empty() {
        vi = full;
    }
    if vj.is_empty() {
        vj = full;
    }
    let li = repair(si.leader(), vi, choices);
    let lj = repair(sj.leader(), vj, choices);
    (VotingState::encode(li, vi), VotingState::encode(lj, vj))
}

/// [`voting_step`] followed by the leader-copy rule: when both new value sets
/// have more than one member a fair coin decides whether `i` adopts `j`'s
/// pre-interaction leader or the reverse. A copy is skipped when the copied
/// leader is not a member of the receiver's new value set, since the compact
/// pair cannot hold a leader outside its set.
pub fn enhanced_step<C: Choices + ?Sized>(
    si: VotingState,
    sj: VotingState,
    k: usize,
    choices: &mut C,
) -> (VotingState, VotingState) {
    let (mut a, mut b) = voting_step(si, sj, k, choices);
    let (va, vb) = (a.value_set(), b.value_set());
    if va.len() > 1 && vb.len() > 1 {
        if choices.coin() {
            if va.contains(sj.leader()) {
                a = VotingState::encode(sj.leader(), va);
            }
        } else if vb.contains(si.leader()) {
            b = VotingState::encode(si.leader(), vb);
        }
    }
    (a, b)
}

/// The same voting rules written directly on the `(memory, value set)` pair,
/// without the compact encoding. Used as the reference side of
/// representation-equivalence checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExplicitVoter {
    pub memory: ValueSet,
    pub value: ValueSet,
}

impl ExplicitVoter {
    pub fn initial(vote: ValueSet) -> Self {
        let first = vote.first().expect("initial vote must be nonempty");
        Self {
            memory: ValueSet::singleton(first),
            value: vote,
        }
    }

    pub fn readout_majority(self) -> usize {
        self.memory.first().expect("memory is a singleton")
    }

    pub fn interact<C: Choices + ?Sized>(
        a: Self,
        b: Self,
        k: usize,
        choices: &mut C,
    ) -> (Self, Self) {
        let (va, vb) = if a.value.len() <= b.value.len() {
            (a.value.union(b.value), a.value.intersection(b.value))
        } else {
            (a.value.intersection(b.value), a.value.union(b.value))
        };
        let fix = |v: ValueSet| if v.is_empty() { ValueSet::full(k) } else { v };
        let (va, vb) = (fix(va), fix(vb));
        let memory = |m: ValueSet, v: ValueSet, c: &mut C| {
            if m.is_subset(v) {
                m
            } else {
                ValueSet::singleton(v.nth(c.pick(v.len())).unwrap())
            }
        };
        let ma = memory(a.memory, va, choices);
        let mb = memory(b.memory, vb, choices);
        (
            Self {
                memory: ma,
                value: va,
            },
            Self {
                memory: mb,
                value: vb,
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::ScriptedChoices;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(c: &[usize]) -> ValueSet {
        ValueSet::from_choices(c.iter().copied())
    }

    fn st(leader: usize, rest: &[usize]) -> VotingState {
        VotingState::new(leader, set(rest)).unwrap()
    }

    #[test]
    fn disjoint_singletons_binary() {
        let mut c = ScriptedChoices::default();
        let (a, b) = voting_step(st(0, &[]), st(1, &[]), 2, &mut c);
        assert_eq!(a, st(0, &[1]));
        assert_eq!(b, st(1, &[0]));
        assert_eq!(c.consumed(), 0);
    }

    #[test]
    fn nested_sets_exchange() {
        let mut c = ScriptedChoices::default();
        let (a, b) = voting_step(st(0, &[1]), st(0, &[]), 2, &mut c);
        assert_eq!((a, b), (st(0, &[]), st(0, &[1])));
        assert_eq!(c.consumed(), 0);
    }

    #[test]
    fn leader_repair_draws_a_member() {
        // i = {c2,c3} leader c3, j = {c1} leader c1, K = 3.
        // |vi| > |vj| so i gets the (empty -> full) intersection, j the union {c1,c2,c3}.
        let (a, b) = voting_step(st(2, &[1]), st(0, &[]), 3, &mut ScriptedChoices::default());
        assert_eq!((a.leader(), b.leader()), (2, 0));
        // i = {c2} leader c2 meets j = {c1,c3} leader c3: i takes union, j intersection = full
        let (a, _) = voting_step(st(1, &[]), st(2, &[0]), 3, &mut ScriptedChoices::default());
        assert_eq!(a.value_set(), set(&[0, 1, 2]));
        // i = {c1,c3} leader c3 meets j = {c1,c2} leader c2 (tie): i takes the union,
        // j the intersection {c1}, so j's leader must be repaired (one-way draw)
        let mut c = ScriptedChoices::default();
        let (a, b) = voting_step(st(2, &[0]), st(1, &[0]), 3, &mut c);
        assert_eq!(a, st(2, &[0, 1]));
        assert_eq!(b, st(0, &[]));
        assert_eq!(c.arities(), &[1]);
        // i = full leader c3, j = {c1,c2}: i gets {c1,c2}, repair picks index 1 -> c2
        let mut c = ScriptedChoices::new(vec![1]);
        let (a, b) = voting_step(st(2, &[0, 1]), st(0, &[1]), 3, &mut c);
        assert_eq!(a, st(1, &[0]));
        assert_eq!(b.value_set(), set(&[0, 1, 2]));
        assert_eq!(c.arities(), &[2]);
    }

    #[test]
    fn enhanced_guard_and_copy_direction() {
        // post sizes (3, 1): no coin
        let mut c = ScriptedChoices::default();
        let (a, b) = enhanced_step(st(0, &[]), st(0, &[1, 2]), 3, &mut c);
        assert_eq!((a.value_set().len(), b.value_set().len()), (3, 1));
        assert_eq!(c.consumed(), 0);

        // equal two-member sets, different leaders: post sizes (2, 2)
        let (si, sj) = (st(0, &[1]), st(1, &[0]));
        let mut heads = ScriptedChoices::new(vec![1]);
        let (a, b) = enhanced_step(si, sj, 3, &mut heads);
        assert_eq!(heads.arities(), &[2]);
        assert_eq!((a.leader(), b.leader()), (1, 1), "u = 1: i takes j's leader");
        let mut tails = ScriptedChoices::new(vec![0]);
        let (a, b) = enhanced_step(si, sj, 3, &mut tails);
        assert_eq!((a.leader(), b.leader()), (0, 0), "u = 0: j takes i's leader");
    }

    #[test]
    fn enhanced_copy_skipped_outside_value_set() {
        // K = 5, i = {0,1,2,4} leader 0, j = {1,2,3} leader 3: i gets {1,2}, j the full set.
        // i's leader is repaired first (index 0 -> choice 1); heads would copy 3 into {1,2}: skipped.
        let (si, sj) = (st(0, &[1, 2, 4]), st(3, &[1, 2]));
        let mut c = ScriptedChoices::new(vec![0, 1]);
        let (a, b) = enhanced_step(si, sj, 5, &mut c);
        assert_eq!(c.arities(), &[2, 2]);
        assert_eq!(a, st(1, &[2]));
        assert_eq!(b.leader(), 3);
        // tails copies i's pre-interaction leader 0 into the full set
        let (_, b) = enhanced_step(si, sj, 5, &mut ScriptedChoices::new(vec![0, 0]));
        assert_eq!(b.leader(), 0);

        // K = 5, i = {0,1,2} leader 0, j = {1,2,3,4} leader 1: j gets {1,2};
        // tails would copy 0 into {1,2}: skipped
        let (si, sj) = (st(0, &[1, 2]), st(1, &[2, 3, 4]));
        let mut c = ScriptedChoices::new(vec![0]);
        let (a, b) = enhanced_step(si, sj, 5, &mut c);
        assert_eq!(c.arities(), &[2]);
        assert_eq!((a.leader(), b), (0, st(1, &[2])));
    }

    #[test]
    fn readout_is_leader() {
        assert_eq!(st(0, &[1, 2]).readout_majority(), 0);
        assert_eq!(st(2, &[]).readout_majority(), 2);
    }

    #[test]
    fn state_space_size() {
        for k in 1..=8 {
            assert_eq!(VotingState::all(k).count(), k << (k - 1));
        }
    }

    fn arb_states() -> impl Strategy<Value = (usize, VotingState, VotingState, u64)> {
        (1usize..=6).prop_flat_map(|k| {
            let all: Vec<_> = VotingState::all(k).collect();
            let n = all.len();
            (Just(k), 0..n, 0..n, any::<u64>()).prop_map(move |(k, a, b, seed)| (k, all[a], all[b], seed))
        })
    }

    proptest! {
        #[test]
        fn compact_matches_explicit_pair((k, si, sj, seed) in arb_states()) {
            let mut r1 = ChaCha8Rng::seed_from_u64(seed);
            let mut r2 = ChaCha8Rng::seed_from_u64(seed);
            let (a, b) = voting_step(si, sj, k, &mut r1);
            let ei = ExplicitVoter { memory: ValueSet::singleton(si.leader()), value: si.value_set() };
            let ej = ExplicitVoter { memory: ValueSet::singleton(sj.leader()), value: sj.value_set() };
            let (x, y) = ExplicitVoter::interact(ei, ej, k, &mut r2);
            prop_assert_eq!(a.value_set(), x.value);
            prop_assert_eq!(b.value_set(), y.value);
            prop_assert_eq!(a.leader(), x.readout_majority());
            prop_assert_eq!(b.leader(), y.readout_majority());
        }

        #[test]
        fn steps_keep_states_valid((k, si, sj, seed) in arb_states()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let full = ValueSet::full(k);
            for (a, b) in [voting_step(si, sj, k, &mut rng), enhanced_step(si, sj, k, &mut rng)] {
                for s in [a, b] {
                    prop_assert!(!s.rest().contains(s.leader()));
                    prop_assert!(s.value_set().is_subset(full));
                }
            }
        }
    }
}
