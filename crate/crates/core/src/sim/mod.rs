//! Event-driven asynchronous execution under Poisson clocks.
//!
//! Global inter-event times are exponential with rate `n`; the ticking node
//! is uniform and contacts a uniform neighbor. Whatever the node
//! representation, the engine also tracks the plain value sets `v_i(t)` the
//! interactions imply (compact states store an empty set as the full set), and
//! every phase observer works on those.

mod observers;
mod trajectory;

pub use observers::{is_in_convergence_set, lyapunov, phase_observers, ObserverSet};
pub use trajectory::{
    write_summaries, Event, LyapunovSample, PairHit, Readout, SummaryRow, Trajectory,
    SUMMARY_HEADER_COMMENT,
};

use std::collections::HashMap;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::protocol::{
    consolidate, enhanced_step, ranking_step, voting_step, counts_from_fractions, MemoryBank,
    RankingState, ValueSet, Variant, VoteProfile, VotingState, MAX_CHOICES,
};
use observers::ConsolidationTracker;

/// Default cutoff in time units.
pub const DEFAULT_CUTOFF: f64 = 1e4;
/// Event logs are on by default up to this many nodes.
pub const LOG_EVENTS_UP_TO: usize = 50;
/// Longest event log kept; later events are dropped and the log marked truncated.
pub const MAX_LOGGED_EVENTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TopologySpec {
    Complete { n: usize },
    Ring { n: usize },
    Torus { rows: usize, cols: usize },
    EdgeList { path: PathBuf },
}

impl TopologySpec {
    pub fn build(&self) -> Result<Graph> {
        match self {
            TopologySpec::Complete { n } => Graph::complete(*n),
            TopologySpec::Ring { n } => Graph::ring(*n),
            TopologySpec::Torus { rows, cols } => Graph::torus(*rows, *cols),
            TopologySpec::EdgeList { path } => Graph::read_edge_list(path),
        }
    }
}

/// Initial votes. Counts and fractions describe single-vote profiles whose
/// votes are dealt to nodes by a seeded shuffle; `nodes` lists every node's
/// vote set verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VoteSpec {
    Counts(Vec<u32>),
    Fractions(Vec<f64>),
    Nodes { k: usize, votes: Vec<Vec<usize>> },
}

impl VoteSpec {
    /// The profile for `n` nodes, before any shuffling.
    pub fn profile(&self, n: usize) -> Result<VoteProfile> {
        let counts = match self {
            VoteSpec::Counts(c) => c.clone(),
            VoteSpec::Fractions(f) => counts_from_fractions(n, f)?,
            VoteSpec::Nodes { k, votes } => {
                if votes.len() != n {
                    return Err(Error::Config(format!("{} node votes for {n} nodes", votes.len())));
                }
                if *k == 0 || *k > MAX_CHOICES {
                    return Err(Error::UnsupportedK(*k));
                }
                let sets = votes
                    .iter()
                    .enumerate()
                    .map(|(node, v)| {
                        if v.iter().any(|&c| c >= *k) {
                            Err(Error::InvalidVote { node })
                        } else {
                            Ok(ValueSet::from_choices(v.iter().copied()))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                return VoteProfile::new(sets, *k);
            }
        };
        let total: u32 = counts.iter().sum();
        if total as usize != n {
            return Err(Error::Config(format!("vote counts sum to {total}, graph has {n} nodes")));
        }
        VoteProfile::from_counts(&counts)
    }

    fn shuffled(&self) -> bool {
        !matches!(self, VoteSpec::Nodes { .. })
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub topology: TopologySpec,
    pub votes: VoteSpec,
    pub variant: Variant,
    pub seed: u64,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    /// Record every interaction; defaults to on for at most 50 nodes.
    #[serde(default)]
    pub log_events: Option<bool>,
}

fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF
}

impl Scenario {
    pub fn new(topology: TopologySpec, votes: VoteSpec, variant: Variant, seed: u64) -> Self {
        Self {
            topology,
            votes,
            variant,
            seed,
            cutoff: DEFAULT_CUTOFF,
            log_events: None,
        }
    }

    /// Builds the graph and the node-assigned profile this scenario runs on.
    pub fn prepare(&self) -> Result<(Graph, VoteProfile)> {
        let graph = self.topology.build()?;
        let profile = self.votes.profile(graph.node_count())?;
        let profile = if self.votes.shuffled() {
            deal_votes(&profile, self.seed)
        } else {
            profile
        };
        Ok((graph, profile))
    }

    pub fn run(&self) -> Result<Trajectory> {
        let (graph, profile) = self.prepare()?;
        run_on(&graph, &profile, self.variant, self.seed, self.cutoff, self.log_events)
    }
}

/// Places the profile's votes on nodes by a uniform shuffle drawn from a
/// stream of `seed` separate from the one driving the run.
pub fn deal_votes(profile: &VoteProfile, seed: u64) -> VoteProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut votes = profile.votes().to_vec();
    votes.shuffle(&mut rng);
    profile.with_votes(votes)
}

/// Runs `variant` on `graph` from the votes exactly as placed in `profile`.
pub fn run_on(
    graph: &Graph,
    profile: &VoteProfile,
    variant: Variant,
    seed: u64,
    cutoff: f64,
    log_events: Option<bool>,
) -> Result<Trajectory> {
    let n = graph.node_count();
    if profile.node_count() != n {
        return Err(Error::Config(format!(
            "profile has {} nodes, graph has {n}",
            profile.node_count()
        )));
    }
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::Config(format!("cutoff must be positive, got {cutoff}")));
    }
    let k = profile.choices();
    let votes = profile.votes();
    let setup = Setup {
        graph,
        profile,
        variant,
        seed,
        cutoff,
        log: log_events.unwrap_or(n <= LOG_EVENTS_UP_TO),
    };
    let traj = match variant {
        Variant::ExplicitRanking => setup.simulate(ExplicitNodes {
            values: votes.to_vec(),
            banks: votes
                .iter()
                .map(|&v| {
                    let mut b = MemoryBank::new(k);
                    b.record(v);
                    b
                })
                .collect(),
        }),
        Variant::CompactVoting | Variant::EnhancedVoting => setup.simulate(VotingNodes {
            k,
            enhanced: variant == Variant::EnhancedVoting,
            states: votes.iter().map(|&v| VotingState::initial(v)).collect(),
            shadow: votes.to_vec(),
        }),
        Variant::CompactRanking => setup.simulate(RankingNodes {
            states: votes.iter().map(|&v| RankingState::initial(v, k)).collect(),
            shadow: votes.to_vec(),
        }),
    };
    Ok(traj)
}

/// A population of node states under one representation.
trait Nodes {
    /// The node's plain value set.
    fn value(&self, i: usize) -> ValueSet;
    /// Readout packed as a key; `UNDECIDED` when there is none.
    fn key(&self, i: usize) -> u64;
    /// Level-1 memory, when set.
    fn head(&self, i: usize) -> Option<usize>;
    fn readout(&self, i: usize) -> Readout;
    fn step(&mut self, i: usize, j: usize, rng: &mut ChaCha8Rng);
}

struct ExplicitNodes {
    values: Vec<ValueSet>,
    banks: Vec<MemoryBank>,
}

impl Nodes for ExplicitNodes {
    fn value(&self, i: usize) -> ValueSet {
        self.values[i]
    }

    fn key(&self, i: usize) -> u64 {
        self.banks[i].readout_key()
    }

    fn head(&self, i: usize) -> Option<usize> {
        self.banks[i].leader()
    }

    fn readout(&self, i: usize) -> Readout {
        self.banks[i]
            .readout()
            .map_or(Readout::Undecided, |r| Readout::Ranking(r.0))
    }

    fn step(&mut self, i: usize, j: usize, _rng: &mut ChaCha8Rng) {
        let (a, b) = consolidate(self.values[i], self.values[j]);
        self.values[i] = a;
        self.values[j] = b;
        self.banks[i].record(a);
        self.banks[j].record(b);
    }
}

struct VotingNodes {
    k: usize,
    enhanced: bool,
    states: Vec<VotingState>,
    shadow: Vec<ValueSet>,
}

impl Nodes for VotingNodes {
    fn value(&self, i: usize) -> ValueSet {
        self.shadow[i]
    }

    fn key(&self, i: usize) -> u64 {
        self.states[i].leader() as u64
    }

    fn head(&self, i: usize) -> Option<usize> {
        Some(self.states[i].leader())
    }

    fn readout(&self, i: usize) -> Readout {
        Readout::Majority(self.states[i].leader())
    }

    fn step(&mut self, i: usize, j: usize, rng: &mut ChaCha8Rng) {
        let (a, b) = consolidate(self.shadow[i], self.shadow[j]);
        self.shadow[i] = a;
        self.shadow[j] = b;
        let (si, sj) = (self.states[i], self.states[j]);
        let (a, b) = if self.enhanced {
            enhanced_step(si, sj, self.k, rng)
        } else {
            voting_step(si, sj, self.k, rng)
        };
        self.states[i] = a;
        self.states[j] = b;
    }
}

struct RankingNodes {
    states: Vec<RankingState>,
    shadow: Vec<ValueSet>,
}

impl Nodes for RankingNodes {
    fn value(&self, i: usize) -> ValueSet {
        self.shadow[i]
    }

    fn key(&self, i: usize) -> u64 {
        self.states[i].readout_key()
    }

    fn head(&self, i: usize) -> Option<usize> {
        Some(self.states[i].head())
    }

    fn readout(&self, i: usize) -> Readout {
        Readout::Ranking(self.states[i].order())
    }

    fn step(&mut self, i: usize, j: usize, _rng: &mut ChaCha8Rng) {
        let (a, b) = consolidate(self.shadow[i], self.shadow[j]);
        self.shadow[i] = a;
        self.shadow[j] = b;
        let (a, b) = ranking_step(self.states[i], self.states[j]);
        self.states[i] = a;
        self.states[j] = b;
    }
}

struct Setup<'a> {
    graph: &'a Graph,
    profile: &'a VoteProfile,
    variant: Variant,
    seed: u64,
    cutoff: f64,
    log: bool,
}

/// Counts of readout keys, with the time since which they have all been correct.
struct ReadoutTally {
    counts: HashMap<u64, u32>,
    target: Option<u64>,
    n: u32,
    correct_since: Option<f64>,
}

impl ReadoutTally {
    fn new(keys: impl Iterator<Item = u64>, target: Option<u64>, n: usize) -> Self {
        let mut counts = HashMap::new();
        for key in keys {
            *counts.entry(key).or_insert(0) += 1;
        }
        let mut tally = Self {
            counts,
            target,
            n: n as u32,
            correct_since: None,
        };
        tally.mark(0.0);
        tally
    }

    fn change(&mut self, old: u64, new: u64) {
        if old != new {
            let c = self.counts.get_mut(&old).expect("tallied key");
            *c -= 1;
            if *c == 0 {
                self.counts.remove(&old);
            }
            *self.counts.entry(new).or_insert(0) += 1;
        }
    }

    fn mark(&mut self, t: f64) {
        if self.settled() {
            self.correct_since.get_or_insert(t);
        } else {
            self.correct_since = None;
        }
    }

    /// All readouts correct. Without a correct answer (tied counts) there is
    /// nothing to wait for.
    fn settled(&self) -> bool {
        match self.target {
            Some(target) => self.counts.get(&target) == Some(&self.n),
            None => true,
        }
    }
}

impl Setup<'_> {
    fn simulate<S: Nodes>(&self, mut nodes: S) -> Trajectory {
        let graph = self.graph;
        let n = graph.node_count();
        let k = self.profile.choices();
        let majority = self.profile.majority();
        let target = if self.variant.ranks() {
            self.profile.ranking().map(|r| r.key())
        } else {
            majority.map(|c| c as u64)
        };
        // binary phases: extinction of the minority singleton, then the
        // majority reaching every level-1 memory
        let binary = k == 2 && majority.is_some();
        let minority = majority.filter(|_| binary).map(|c| 1 - c);

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let initial_sets: Vec<ValueSet> = (0..n).map(|i| nodes.value(i)).collect();
        let mut tracker = ConsolidationTracker::new(&initial_sets, k, minority);
        let mut tally = ReadoutTally::new((0..n).map(|i| nodes.key(i)), target, n);
        let mut heads = (0..n).filter(|&i| nodes.head(i) == majority).count();
        let mut heads_since = (heads == n).then_some(0.0);

        let mut lyap = vec![LyapunovSample {
            interaction: 0,
            time: 0.0,
            value: tracker.lyapunov(),
        }];
        let mut events = self.log.then(Vec::new);
        let mut truncated = false;

        let mut t = 0.0f64;
        let mut interactions = 0u64;
        let done = |tracker: &ConsolidationTracker, tally: &ReadoutTally| {
            tracker.in_convergence_set() && tally.settled()
        };
        let mut converged = done(&tracker, &tally);
        while !converged {
            let dt: f64 = rng.sample::<f64, _>(Exp1) / n as f64;
            if t + dt > self.cutoff {
                t = self.cutoff;
                break;
            }
            t += dt;
            let i = rng.random_range(0..n);
            let j = graph.sample_neighbor(i, &mut rng);

            let before = [nodes.value(i), nodes.value(j)];
            let keys = [nodes.key(i), nodes.key(j)];
            let had = [nodes.head(i) == majority, nodes.head(j) == majority];
            nodes.step(i, j, &mut rng);
            interactions += 1;
            let after = [nodes.value(i), nodes.value(j)];

            if after != before {
                tracker.change(before[0], after[0]);
                tracker.change(before[1], after[1]);
                tracker.refresh(t);
                let value = tracker.lyapunov();
                if value != lyap.last().expect("initial sample").value {
                    lyap.push(LyapunovSample {
                        interaction: interactions,
                        time: t,
                        value,
                    });
                }
            }
            tally.change(keys[0], nodes.key(i));
            tally.change(keys[1], nodes.key(j));
            tally.mark(t);
            for (node, had) in [(i, had[0]), (j, had[1])] {
                let has = nodes.head(node) == majority;
                if has != had {
                    if has {
                        heads += 1;
                    } else {
                        heads -= 1;
                    }
                }
            }
            if heads == n {
                heads_since.get_or_insert(t);
            } else {
                heads_since = None;
            }
            if let Some(log) = events.as_mut() {
                if log.len() < MAX_LOGGED_EVENTS {
                    log.push(Event {
                        time: t,
                        i: i as u32,
                        j: j as u32,
                        before,
                        after,
                    });
                } else {
                    truncated = true;
                }
            }
            converged = done(&tracker, &tally);
        }

        let tau_x = tracker.tau_x;
        let tau_prime = if converged && target.is_some() {
            tally.correct_since.zip(tau_x).map(|(c, x)| c.max(x))
        } else {
            None
        };
        let tau1 = tracker.tau1;
        let tau2 = match (tau1, heads_since) {
            (Some(t1), Some(h)) if binary => Some((h - t1).max(0.0)),
            _ => None,
        };
        Trajectory {
            seed: self.seed,
            n,
            k,
            topology: graph.shape().to_string(),
            variant: self.variant,
            counts: self.profile.counts().to_vec(),
            tau1,
            tau2,
            tau_x,
            tau_prime,
            interactions,
            end_time: t,
            converged,
            convergence_set_exits: tracker.exits,
            pair_hits: tracker
                .pair_hits
                .iter()
                .map(|&(a, b, time)| PairHit { a, b, time })
                .collect(),
            lyapunov: lyap,
            initial_sets,
            final_readouts: (0..n).map(|i| nodes.readout(i)).collect(),
            events,
            events_truncated: truncated,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize, counts: &[u32], variant: Variant, seed: u64) -> Trajectory {
        Scenario::new(TopologySpec::Complete { n }, VoteSpec::Counts(counts.to_vec()), variant, seed)
            .run()
            .unwrap()
    }

    #[test]
    fn three_node_majority() {
        for variant in Variant::ALL {
            for seed in 0..50 {
                let t = complete(3, &[2, 1], variant, seed);
                assert!(t.converged, "{variant} seed {seed}");
                for r in &t.final_readouts {
                    match r {
                        Readout::Majority(c) => assert_eq!(*c, 0),
                        Readout::Ranking(o) => assert_eq!(o, &vec![0, 1]),
                        Readout::Undecided => panic!("undecided at convergence"),
                    }
                }
                let (x, p) = (t.tau_x.unwrap(), t.tau_prime.unwrap());
                assert!(x <= p && p <= t.end_time);
                assert_eq!(t.convergence_set_exits, 0);
            }
        }
    }

    #[test]
    fn two_node_tie_stops_once_consolidated() {
        let t = complete(2, &[1, 1], Variant::CompactVoting, 3);
        assert_eq!(t.interactions, 1);
        assert!(t.converged);
        assert_eq!(t.tau_prime, None, "no correct majority exists");
        assert_eq!(t.tau1, None);
        // both keep their own leader: the tie is reported as-is
        assert_eq!(t.final_readouts.len(), 2);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = complete(40, &[20, 12, 8], Variant::EnhancedVoting, 11);
        let b = complete(40, &[20, 12, 8], Variant::EnhancedVoting, 11);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = complete(40, &[20, 12, 8], Variant::EnhancedVoting, 12);
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn lyapunov_never_increases() {
        let t = complete(30, &[12, 10, 8], Variant::CompactRanking, 5);
        assert!(t.lyapunov.windows(2).all(|w| w[1].value < w[0].value));
        assert_eq!(t.lyapunov[0].value, lyapunov(&t.initial_sets, 3));
    }

    #[test]
    fn binary_phase_times() {
        let t = complete(50, &[30, 20], Variant::CompactVoting, 2);
        assert!(t.converged);
        let (t1, t2) = (t.tau1.unwrap(), t.tau2.unwrap());
        assert!(t1 > 0.0 && t2 >= 0.0);
        assert!(t1 <= t.tau_x.unwrap() + 1e-12);
        let t = complete(50, &[10, 25, 15], Variant::CompactVoting, 2);
        assert_eq!((t.tau1, t.tau2), (None, None));
    }

    #[test]
    fn cutoff_stops_the_run() {
        let mut sc = Scenario::new(
            TopologySpec::Ring { n: 60 },
            VoteSpec::Counts(vec![31, 29]),
            Variant::CompactVoting,
            1,
        );
        sc.cutoff = 0.5;
        let t = sc.run().unwrap();
        assert!(!t.converged);
        assert_eq!(t.end_time, 0.5);
        assert_eq!(t.tau_prime, None);
    }

    #[test]
    fn scenario_validation() {
        let bad = Scenario::new(
            TopologySpec::Complete { n: 10 },
            VoteSpec::Counts(vec![5, 4]),
            Variant::CompactVoting,
            0,
        );
        assert!(matches!(bad.run(), Err(Error::Config(_))));
        let sc = Scenario::new(
            TopologySpec::Complete { n: 10 },
            VoteSpec::Fractions(vec![0.55, 0.45]),
            Variant::CompactVoting,
            0,
        );
        let (_, p) = sc.prepare().unwrap();
        assert_eq!(p.counts(), &[6, 4]);
    }

    #[test]
    fn scenario_from_toml() {
        let sc: Scenario = toml::from_str(
            r#"
            variant = "compact-ranking"
            seed = 7
            topology = { kind = "torus", rows = 3, cols = 4 }
            votes = { counts = [6, 4, 2] }
            "#,
        )
        .unwrap();
        assert_eq!(sc.cutoff, DEFAULT_CUTOFF);
        let t = sc.run().unwrap();
        assert_eq!(t.topology, "torus3x4");
        assert!(t.converged);
    }

    #[test]
    fn explicit_node_votes_are_kept_in_place() {
        let sc = Scenario::new(
            TopologySpec::Ring { n: 4 },
            VoteSpec::Nodes {
                k: 2,
                votes: vec![vec![0], vec![0, 1], vec![0], vec![1]],
            },
            Variant::ExplicitRanking,
            0,
        );
        let (_, p) = sc.prepare().unwrap();
        assert_eq!(p.counts(), &[3, 2]);
        assert_eq!(p.votes()[1], ValueSet::from_choices([0, 1]));
    }
}
