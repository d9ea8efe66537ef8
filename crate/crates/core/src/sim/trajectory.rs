use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::protocol::{ValueSet, Variant};

/// One recorded interaction: the value sets of initiator `i` and responder `j`
/// before and after consolidation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub i: u32,
    pub j: u32,
    pub before: [ValueSet; 2],
    pub after: [ValueSet; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSample {
    pub interaction: u64,
    pub time: f64,
    pub value: u64,
}

/// First time the projection onto choices `{a, b}` reached its own
/// convergence set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairHit {
    pub a: usize,
    pub b: usize,
    pub time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Readout {
    Majority(usize),
    Ranking(Vec<usize>),
    Undecided,
}

/// Everything recorded about one run. Times are in time units, where every
/// node ticks once per unit on average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub topology: String,
    pub variant: Variant,
    pub counts: Vec<u32>,
    /// Binary runs: first time no node holds the minority singleton.
    pub tau1: Option<f64>,
    /// Binary runs: time from `tau1` until every level-1 memory holds the majority.
    pub tau2: Option<f64>,
    /// First entry of the value sets into the convergence set.
    pub tau_x: Option<f64>,
    /// First time from which every node's readout is correct until the end of the run.
    pub tau_prime: Option<f64>,
    pub interactions: u64,
    pub end_time: f64,
    pub converged: bool,
    /// Number of events after `tau_x` at which the convergence set was left (expected 0).
    pub convergence_set_exits: u32,
    pub pair_hits: Vec<PairHit>,
    pub lyapunov: Vec<LyapunovSample>,
    pub initial_sets: Vec<ValueSet>,
    pub final_readouts: Vec<Readout>,
    pub events: Option<Vec<Event>>,
    pub events_truncated: bool,
}

impl Trajectory {
    /// Time at which every node's readout became (and stayed) correct; the
    /// total convergence time of the run.
    pub fn total_time(&self) -> Option<f64> {
        self.tau_prime
    }

    /// Largest pairwise projected hitting time.
    pub fn max_pair_hit(&self) -> Option<f64> {
        self.pair_hits
            .iter()
            .map(|p| p.time)
            .try_fold(0.0f64, |acc, t| t.map(|t| acc.max(t)))
    }

    pub fn summary(&self) -> SummaryRow {
        SummaryRow {
            seed: self.seed,
            n: self.n,
            k: self.k,
            topology: self.topology.clone(),
            variant: self.variant.name().to_string(),
            counts: join_counts(&self.counts),
            tau1: self.tau1,
            tau2: self.tau2,
            tau_x: self.tau_x,
            tau_prime: self.tau_prime,
            interactions: self.interactions,
            converged: self.converged,
        }
    }
}

pub(crate) fn join_counts(counts: &[u32]) -> String {
    counts
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

/// One CSV row per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub topology: String,
    pub variant: String,
    /// Vote counts per choice, `;`-separated.
    pub counts: String,
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
    pub tau_x: Option<f64>,
    pub tau_prime: Option<f64>,
    pub interactions: u64,
    pub converged: bool,
}

pub const SUMMARY_HEADER_COMMENT: &str = "# seed,n,K,topology,variant,counts (per choice, ';'-separated),tau1,tau2,tau_x,tau_prime (time units; empty = undefined),interactions,converged";

/// Writes run summaries as CSV, preceded by a `#` comment line.
pub fn write_summaries<W: Write>(mut out: W, rows: &[SummaryRow]) -> crate::Result<()> {
    writeln!(out, "{SUMMARY_HEADER_COMMENT}")?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
