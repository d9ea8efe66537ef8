//! Paired runs of the explicit and compact representations on one shared
//! interaction sequence and one shared stream of random decisions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use super::model_check::Verdict;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::protocol::{
    consolidate, ranking_step, voting_step, Choices, ExplicitVoter, MemoryBank, RankingState,
    ScriptedChoices, ValueSet, Variant, VoteProfile, VotingState,
};
use crate::sim::{is_in_convergence_set, Scenario};

/// Interactions per trial before giving up on convergence.
pub const MAX_TRIAL_EVENTS: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// Value set plus memory bank against permutation plus pointer.
    Ranking,
    /// `(memory, value set)` against the compact `(leader, rest)` pair.
    Voting,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Divergence {
    pub seed: u64,
    /// Zero-based interaction index within the trial.
    pub event: u64,
    pub node: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub pairing: Pairing,
    pub trials: usize,
    pub interactions: u64,
    /// Node-steps at which both sides had a readout and they were compared.
    pub decided_comparisons: u64,
    /// Node-steps at which both rankings were decided but differed while
    /// memories were still being disseminated (ranking pairing only; the
    /// compact order also reorders levels the explicit bank leaves alone).
    pub transient_disagreements: u64,
    pub verdict: Verdict,
    pub divergence: Option<Divergence>,
}

type RankStep = fn(RankingState, RankingState) -> (RankingState, RankingState);

/// Runs `trials` paired executions, seeds `sc.seed + t`. The scenario's
/// variant picks the pairing: ranking variants compare explicit against
/// compact ranking, voting variants compare explicit against compact voting.
pub fn equivalence_check(sc: &Scenario, trials: usize) -> Result<EquivalenceReport> {
    equivalence_check_with(sc, trials, ranking_step)
}

/// [`equivalence_check`] with a substitute compact ranking rule, for
/// checking that the comparison notices a faulty encoding.
pub fn equivalence_check_with(sc: &Scenario, trials: usize, step: RankStep) -> Result<EquivalenceReport> {
    let pairing = match sc.variant {
        Variant::ExplicitRanking | Variant::CompactRanking => Pairing::Ranking,
        Variant::CompactVoting => Pairing::Voting,
        Variant::EnhancedVoting => {
            return Err(Error::Config(
                "the leader-copy rule has no explicit counterpart; use compact-voting".into(),
            ))
        }
    };
    let mut report = EquivalenceReport {
        pairing,
        trials,
        interactions: 0,
        decided_comparisons: 0,
        transient_disagreements: 0,
        verdict: Verdict::Pass,
        divergence: None,
    };
    for t in 0..trials as u64 {
        let mut trial = sc.clone();
        trial.seed = sc.seed.wrapping_add(t);
        let (graph, profile) = trial.prepare()?;
        let outcome = match pairing {
            Pairing::Ranking => ranking_trial(&graph, &profile, trial.seed, step, &mut report),
            Pairing::Voting => voting_trial(&graph, &profile, trial.seed, &mut report),
        };
        if let Err(d) = outcome {
            report.verdict = Verdict::Fail;
            report.divergence = Some(d);
            break;
        }
    }
    Ok(report)
}

/// Draws the next interacting pair exactly as the simulator does.
fn next_pair(graph: &Graph, rng: &mut ChaCha8Rng) -> (usize, usize) {
    let _dt: f64 = rng.sample(Exp1);
    let i = rng.random_range(0..graph.node_count());
    (i, graph.sample_neighbor(i, rng))
}

fn fill(v: ValueSet, k: usize) -> ValueSet {
    if v.is_empty() {
        ValueSet::full(k)
    } else {
        v
    }
}

fn ranking_trial(
    graph: &Graph,
    profile: &VoteProfile,
    seed: u64,
    step: RankStep,
    report: &mut EquivalenceReport,
) -> std::result::Result<(), Divergence> {
    let k = profile.choices();
    let target = profile.ranking().map(|r| r.key());
    let mut values = profile.votes().to_vec();
    let mut banks: Vec<MemoryBank> = values
        .iter()
        .map(|&v| {
            let mut b = MemoryBank::new(k);
            b.record(v);
            b
        })
        .collect();
    let mut compact: Vec<RankingState> = values.iter().map(|&v| RankingState::initial(v, k)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diverge = |event, node, detail| Divergence {
        seed,
        event,
        node,
        detail,
    };
    let settled = |banks: &[MemoryBank], compact: &[RankingState], values: &[ValueSet]| match target {
        Some(t) => {
            is_in_convergence_set(values)
                && banks.iter().all(|b| b.readout_key() == t)
                && compact.iter().all(|c| c.readout_key() == t)
        }
        None => is_in_convergence_set(values),
    };
    let mut event = 0;
    while !settled(&banks, &compact, &values) {
        if event == MAX_TRIAL_EVENTS {
            return Err(diverge(event, 0, "no convergence within the event budget".into()));
        }
        let (i, j) = next_pair(graph, &mut rng);
        let (a, b) = consolidate(values[i], values[j]);
        values[i] = a;
        values[j] = b;
        banks[i].record(a);
        banks[j].record(b);
        let (x, y) = step(compact[i], compact[j]);
        compact[i] = x;
        compact[j] = y;
        for node in [i, j] {
            if compact[node].value_set() != fill(values[node], k) {
                return Err(diverge(
                    event,
                    node,
                    format!(
                        "compact value set {:?} but explicit {:?}",
                        compact[node].value_set(),
                        values[node]
                    ),
                ));
            }
        }
        for node in 0..values.len() {
            let e = banks[node].readout_key();
            if e != crate::protocol::UNDECIDED {
                report.decided_comparisons += 1;
                if e != compact[node].readout_key() {
                    report.transient_disagreements += 1;
                }
            }
        }
        event += 1;
        report.interactions += 1;
    }
    for node in 0..values.len() {
        if target.is_some() && banks[node].readout_key() != compact[node].readout_key() {
            return Err(diverge(
                event,
                node,
                format!(
                    "final readouts {:?} and {:?}",
                    banks[node].readout(),
                    compact[node].readout()
                ),
            ));
        }
    }
    Ok(())
}

/// Forwards to an RNG and records every decision with its arity.
struct Recorder<'a> {
    rng: &'a mut ChaCha8Rng,
    script: Vec<usize>,
    arities: Vec<usize>,
}

impl Choices for Recorder<'_> {
    fn pick(&mut self, len: usize) -> usize {
        let v = self.rng.pick(len);
        self.script.push(v);
        self.arities.push(len);
        v
    }

    fn coin(&mut self) -> bool {
        self.pick(2) == 1
    }
}

fn voting_trial(
    graph: &Graph,
    profile: &VoteProfile,
    seed: u64,
    report: &mut EquivalenceReport,
) -> std::result::Result<(), Divergence> {
    let k = profile.choices();
    let target = profile.majority();
    let mut explicit: Vec<ExplicitVoter> = profile.votes().iter().map(|&v| ExplicitVoter::initial(v)).collect();
    let mut compact: Vec<VotingState> = profile.votes().iter().map(|&v| VotingState::initial(v)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diverge = |event, node, detail| Divergence {
        seed,
        event,
        node,
        detail,
    };
    let settled = |explicit: &[ExplicitVoter]| {
        let values: Vec<ValueSet> = explicit.iter().map(|e| e.value).collect();
        // value sets with the empty set written as the full set still form a chain
        is_in_convergence_set(&values)
            && target.is_none_or(|t| explicit.iter().all(|e| e.readout_majority() == t))
    };
    let mut event = 0;
    while !settled(&explicit) {
        if event == MAX_TRIAL_EVENTS {
            return Err(diverge(event, 0, "no convergence within the event budget".into()));
        }
        let (i, j) = next_pair(graph, &mut rng);
        let mut rec = Recorder {
            rng: &mut rng,
            script: Vec::new(),
            arities: Vec::new(),
        };
        let (x, y) = voting_step(compact[i], compact[j], k, &mut rec);
        let (script, arities) = (rec.script, rec.arities);
        let mut replay = ScriptedChoices::new(script);
        let (a, b) = ExplicitVoter::interact(explicit[i], explicit[j], k, &mut replay);
        if replay.arities() != arities.as_slice() {
            return Err(diverge(
                event,
                i,
                format!("random decisions differ: compact {arities:?}, explicit {:?}", replay.arities()),
            ));
        }
        compact[i] = x;
        compact[j] = y;
        explicit[i] = a;
        explicit[j] = b;
        for node in [i, j] {
            let (c, e) = (compact[node], explicit[node]);
            if c.value_set() != e.value || c.readout_majority() != e.readout_majority() {
                return Err(diverge(
                    event,
                    node,
                    format!("compact {c:?}, explicit {e:?}"),
                ));
            }
        }
        report.decided_comparisons += explicit.len() as u64;
        event += 1;
        report.interactions += 1;
    }
    Ok(())
}
