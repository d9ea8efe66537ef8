//! Exhaustive reachability over configuration multisets on complete graphs.
//!
//! On a complete graph nodes are anonymous, so a configuration is the
//! multiset of node states. Every ordered pair of distinct nodes interacts
//! with positive probability and every random branch of a step is explored,
//! which turns "converges with probability one" into a property of the finite
//! transition graph: each bottom strongly connected component must consist of
//! configurations whose readouts are all correct.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::{
    all_outcomes, enhanced_step, ranking_step, voting_step, Choices, RankingState, ValueSet,
    Variant, VoteProfile, VotingState,
};

pub const MAX_NODES: usize = 6;
pub const MAX_CHOICES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Tied counts: there is no correct answer to converge to.
    TieUndefined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::TieUndefined => "TIE-UNDEFINED",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelCheckReport {
    pub variant: Variant,
    pub counts: Vec<u32>,
    pub verdict: Verdict,
    pub configurations: usize,
    pub transitions: usize,
    pub bottom_components: usize,
    /// Readout shared by every node in the bottom components, on `Pass`.
    pub absorbing_readout: Option<Vec<usize>>,
    /// Configurations from the initial one into a bad bottom component, on `Fail`.
    pub counterexample: Option<Vec<String>>,
}

/// Node behaviour as seen by the checker.
pub(crate) trait Checked {
    type State: Copy + Ord + Hash + fmt::Debug;
    fn initial(&self, vote: ValueSet) -> Self::State;
    fn step(&self, a: Self::State, b: Self::State, choices: &mut dyn Choices) -> (Self::State, Self::State);
    /// Readout as a choice sequence: the leader alone for voting, the order for ranking.
    fn readout(&self, s: Self::State) -> Vec<usize>;
}

pub(crate) struct Voting {
    pub k: usize,
    pub enhanced: bool,
}

impl Checked for Voting {
    type State = VotingState;

    fn initial(&self, vote: ValueSet) -> VotingState {
        VotingState::initial(vote)
    }

    fn step(&self, a: VotingState, b: VotingState, choices: &mut dyn Choices) -> (VotingState, VotingState) {
        if self.enhanced {
            enhanced_step(a, b, self.k, choices)
        } else {
            voting_step(a, b, self.k, choices)
        }
    }

    fn readout(&self, s: VotingState) -> Vec<usize> {
        vec![s.leader()]
    }
}

pub(crate) struct Ranking {
    pub k: usize,
}

impl Checked for Ranking {
    type State = RankingState;

    fn initial(&self, vote: ValueSet) -> RankingState {
        RankingState::initial(vote, self.k)
    }

    fn step(&self, a: RankingState, b: RankingState, _: &mut dyn Choices) -> (RankingState, RankingState) {
        ranking_step(a, b)
    }

    fn readout(&self, s: RankingState) -> Vec<usize> {
        s.order()
    }
}

/// Sorted multiset of node states.
type Config<S> = Vec<S>;

/// Every configuration reachable in one interaction (all random branches).
fn successors<P: Checked>(proto: &P, config: &Config<P::State>) -> Vec<Config<P::State>> {
    let mut out = Vec::new();
    let n = config.len();
    for a in 0..n {
        for b in 0..n {
            // same-state nodes are interchangeable: first occurrences suffice
            if a == b
                || (a > 0 && config[a - 1] == config[a])
                || (b > 0 && config[b - 1] == config[b] && b - 1 != a)
            {
                continue;
            }
            for (x, y) in all_outcomes(|c| proto.step(config[a], config[b], c)) {
                let mut next = config.clone();
                next[a] = x;
                next[b] = y;
                next.sort_unstable();
                out.push(next);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

pub(crate) struct Explored<S> {
    pub configs: Vec<Config<S>>,
    pub graph: DiGraph<(), ()>,
    pub parent: Vec<Option<usize>>,
}

pub(crate) fn explore<P: Checked>(proto: &P, start: Config<P::State>) -> Explored<P::State> {
    let mut index: HashMap<Config<P::State>, usize> = HashMap::new();
    let mut configs = vec![start.clone()];
    let mut parent = vec![None];
    let mut graph = DiGraph::new();
    graph.add_node(());
    index.insert(start, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(at) = queue.pop_front() {
        for next in successors(proto, &configs[at]) {
            let to = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = configs.len();
                    index.insert(next.clone(), id);
                    configs.push(next);
                    parent.push(Some(at));
                    graph.add_node(());
                    queue.push_back(id);
                    id
                }
            };
            graph.add_edge(NodeIndex::new(at), NodeIndex::new(to), ());
        }
    }
    Explored {
        configs,
        graph,
        parent,
    }
}

fn check<P: Checked>(proto: &P, profile: &VoteProfile, variant: Variant, target: Vec<usize>) -> ModelCheckReport {
    let mut start: Config<P::State> = profile.votes().iter().map(|&v| proto.initial(v)).collect();
    start.sort_unstable();
    let ex = explore(proto, start);
    let correct = |c: &Config<P::State>| c.iter().all(|&s| proto.readout(s) == target);

    let mut bottom = 0;
    let mut bad = None;
    for scc in tarjan_scc(&ex.graph) {
        let members: std::collections::HashSet<NodeIndex> = scc.iter().copied().collect();
        let closed = scc
            .iter()
            .all(|&v| ex.graph.neighbors(v).all(|w| members.contains(&w)));
        if !closed {
            continue;
        }
        bottom += 1;
        if let Some(&v) = scc.iter().find(|&&v| !correct(&ex.configs[v.index()])) {
            bad.get_or_insert(v.index());
        }
    }

    let counterexample = bad.map(|mut at| {
        let mut path = vec![format!("{:?}", ex.configs[at])];
        while let Some(p) = ex.parent[at] {
            path.push(format!("{:?}", ex.configs[p]));
            at = p;
        }
        path.reverse();
        path
    });
    ModelCheckReport {
        variant,
        counts: profile.counts().to_vec(),
        verdict: if bad.is_some() { Verdict::Fail } else { Verdict::Pass },
        configurations: ex.configs.len(),
        transitions: ex.graph.edge_count(),
        bottom_components: bottom,
        absorbing_readout: bad.is_none().then_some(target),
        counterexample,
    }
}

/// Checks that `variant` reaches the correct readout with probability one
/// from `profile` on the complete graph.
pub fn model_check(profile: &VoteProfile, variant: Variant) -> Result<ModelCheckReport> {
    let (n, k) = (profile.node_count(), profile.choices());
    if n > MAX_NODES || k > MAX_CHOICES {
        return Err(Error::Refused(format!(
            "n = {n}, K = {k} exceeds the checking limits n <= {MAX_NODES}, K <= {MAX_CHOICES}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidSize(format!("need at least 2 nodes, got {n}")));
    }
    let target = match variant {
        Variant::CompactVoting | Variant::EnhancedVoting => profile.majority().map(|c| vec![c]),
        Variant::CompactRanking => profile.ranking().map(|r| r.0),
        Variant::ExplicitRanking => {
            return Err(Error::Refused(
                "explicit-ranking memories are unbounded in form; check compact-ranking instead".into(),
            ))
        }
    };
    let Some(target) = target else {
        return Ok(ModelCheckReport {
            variant,
            counts: profile.counts().to_vec(),
            verdict: Verdict::TieUndefined,
            configurations: 0,
            transitions: 0,
            bottom_components: 0,
            absorbing_readout: None,
            counterexample: None,
        });
    };
    Ok(match variant {
        Variant::CompactRanking => check(&Ranking { k }, profile, variant, target),
        _ => check(
            &Voting {
                k,
                enhanced: variant == Variant::EnhancedVoting,
            },
            profile,
            variant,
            target,
        ),
    })
}

/// Every single-vote count vector for `n` nodes and `k` choices whose
/// counts are pairwise distinct (one choice may receive no vote).
pub fn strict_profiles(n: usize, k: usize) -> Vec<Vec<u32>> {
    fn go(left: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            go(left - c, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    go(n as u32, k, &mut Vec::new(), &mut all);
    all.retain(|c| {
        let mut s = c.clone();
        s.sort_unstable();
        s.windows(2).all(|w| w[0] != w[1])
    });
    all
}
