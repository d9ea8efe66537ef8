use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::manifest::Manifest;
use crate::analysis;
use crate::error::{Error, Result};
use crate::protocol::{Variant, VoteProfile};
use crate::sim::{deal_votes, run_on, SummaryRow, TopologySpec};

/// Summary statistics of one quantity over the replications where it is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator).
    pub sd: f64,
    /// Half-width of the normal 95% interval of the mean.
    pub ci95: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(xs: &[f64]) -> Option<Stats> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Stats {
            count: xs.len(),
            mean,
            sd,
            ci95: 1.96 * sd / n.sqrt(),
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        self.sd / (self.count as f64).sqrt()
    }
}

/// The measured quantities, in CSV order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Tau1,
    Tau2,
    TauX,
    TauPrime,
    /// `tau_prime - tau_x`.
    Dissemination,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::Tau1,
        Quantity::Tau2,
        Quantity::TauX,
        Quantity::TauPrime,
        Quantity::Dissemination,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Tau1 => "tau1",
            Quantity::Tau2 => "tau2",
            Quantity::TauX => "tau_x",
            Quantity::TauPrime => "tau_prime",
            Quantity::Dissemination => "dissemination",
        }
    }

    fn of(self, r: &SummaryRow) -> Option<f64> {
        match self {
            Quantity::Tau1 => r.tau1,
            Quantity::Tau2 => r.tau2,
            Quantity::TauX => r.tau_x,
            Quantity::TauPrime => r.tau_prime,
            Quantity::Dissemination => r.tau_prime.zip(r.tau_x).map(|(p, x)| p - x),
        }
    }
}

/// One line of the sweep CSV: a quantity at one sweep point for one variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub experiment: String,
    pub topology: String,
    pub n: usize,
    pub k: usize,
    pub variant: String,
    pub point: String,
    pub counts: String,
    pub replications: u64,
    pub converged: u64,
    pub quantity: Quantity,
    pub count: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub ci95: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// Closed-form value for this quantity (complete graphs only).
    pub theory: Option<f64>,
}

impl AggregateRow {
    pub fn stats(&self) -> Option<Stats> {
        Some(Stats {
            count: self.count,
            mean: self.mean?,
            sd: self.sd?,
            ci95: self.ci95?,
            min: self.min?,
            max: self.max?,
        })
    }
}

pub const SWEEP_HEADER_COMMENT: &str = "# experiment,topology,n,K,variant,point (swept value),counts (';'-separated),replications,converged (runs),quantity,count (runs where defined),mean,sd,ci95 (half-width),min,max,theory (closed form, complete graphs; empty = none); times in time units";

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<AggregateRow>,
    /// Every run, in (point, variant, replication) order.
    pub runs: Vec<SummaryRow>,
}

impl SweepOutput {
    /// The row for `(point index label, variant, quantity)`.
    pub fn find(&self, point: &str, variant: Variant, q: Quantity) -> Option<&AggregateRow> {
        self.rows
            .iter()
            .find(|r| r.point == point && r.variant == variant.name() && r.quantity == q)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{SWEEP_HEADER_COMMENT}")?;
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Closed-form overlay for `q` given the integral counts, if one applies.
pub fn theory(topology: &TopologySpec, counts: &[u32], q: Quantity) -> Option<f64> {
    let TopologySpec::Complete { n } = *topology else {
        return None;
    };
    let mut rho: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    rho.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let binary = rho.len() == 2;
    match q {
        Quantity::Tau1 if binary => analysis::expected_tau1(n, rho[1]).ok(),
        Quantity::Tau2 if binary => analysis::expected_tau2_bound(n, rho[1]).ok(),
        Quantity::TauPrime if binary => analysis::total_bound_binary(n, rho[1]).ok(),
        Quantity::TauX if rho.len() > 2 => analysis::tau_x_bound(n, &rho).ok(),
        Quantity::Dissemination if rho.len() > 2 => analysis::tau_prime_bound(n, &rho).ok(),
        _ => None,
    }
}

/// Runs every (point, variant, replication) of `m`. Replication `r` uses
/// seed `base_seed + r` for every point and variant; the output does not
/// depend on the number of worker threads.
pub fn run_manifest(m: &Manifest) -> Result<SweepOutput> {
    m.validate()?;
    let graph = m.topology.build()?;
    let n = graph.node_count();
    let profiles = (0..m.sweep.len())
        .map(|p| {
            let counts = m.sweep.counts(p, n)?;
            let profile = VoteProfile::from_counts(&counts)?;
            if profile.node_count() != n {
                return Err(Error::Config(format!("point {}: counts do not sum to {n}", m.sweep.label(p))));
            }
            if !m.allow_ties && profile.ranking().is_none() {
                return Err(Error::Config(format!(
                    "{}: point {} has tied counts {counts:?} (set allow_ties)",
                    m.id,
                    m.sweep.label(p)
                )));
            }
            Ok(profile)
        })
        .collect::<Result<Vec<_>>>()?;

    let reps = m.replications;
    let jobs: Vec<(usize, Variant, u64)> = (0..profiles.len())
        .flat_map(|p| {
            m.variants
                .iter()
                .flat_map(move |&v| (0..reps).map(move |r| (p, v, r)))
        })
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(p, variant, rep)| {
            let seed = m.base_seed.wrapping_add(rep);
            let placed = deal_votes(&profiles[p], seed);
            run_on(&graph, &placed, variant, seed, m.cutoff, Some(false)).map(|t| t.summary())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (chunk, (p, variant)) in runs.chunks(reps as usize).zip(
        (0..profiles.len()).flat_map(|p| m.variants.iter().map(move |&v| (p, v))),
    ) {
        let counts = profiles[p].counts();
        let converged = chunk.iter().filter(|r| r.converged).count() as u64;
        for q in Quantity::ALL {
            let xs: Vec<f64> = chunk.iter().filter_map(|r| q.of(r)).collect();
            let s = Stats::of(&xs);
            rows.push(AggregateRow {
                experiment: m.id.clone(),
                topology: chunk[0].topology.clone(),
                n,
                k: counts.len(),
                variant: variant.name().to_string(),
                point: m.sweep.label(p),
                counts: chunk[0].counts.clone(),
                replications: reps,
                converged,
                quantity: q,
                count: xs.len(),
                mean: s.map(|s| s.mean),
                sd: s.map(|s| s.sd),
                ci95: s.map(|s| s.ci95),
                min: s.map(|s| s.min),
                max: s.map(|s| s.max),
                theory: theory(&m.topology, counts, q),
            });
        }
    }
    Ok(SweepOutput { rows, runs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{builtin_manifest, Sweep};

    fn small() -> Manifest {
        Manifest {
            id: "small".into(),
            topology: TopologySpec::Complete { n: 30 },
            sweep: Sweep::Rho1 { values: vec![0.6, 0.7] },
            variants: vec![Variant::CompactVoting, Variant::EnhancedVoting],
            replications: 40,
            base_seed: 5,
            cutoff: 1e4,
            allow_ties: false,
            output: None,
        }
    }

    #[test]
    fn stats_by_hand() {
        let s = Stats::of(&[1.0, 2.0, 3.0, 6.0]).unwrap();
        assert_eq!((s.count, s.mean, s.min, s.max), (4, 3.0, 1.0, 6.0));
        assert!((s.sd - (14.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((s.ci95 - 1.96 * s.sd / 2.0).abs() < 1e-12);
        assert_eq!(Stats::of(&[]), None);
        assert_eq!(Stats::of(&[2.5]).unwrap().sd, 0.0);
    }

    #[test]
    fn aggregates_match_runs() {
        let m = small();
        let out = run_manifest(&m).unwrap();
        assert_eq!(out.runs.len(), 2 * 2 * 40);
        assert_eq!(out.rows.len(), 2 * 2 * Quantity::ALL.len());
        // second point, enhanced: runs 120..160
        let slice = &out.runs[120..160];
        assert!(slice.iter().all(|r| r.variant == "enhanced-voting" && r.counts == "21;9"));
        let tau1: Vec<f64> = slice.iter().filter_map(|r| r.tau1).collect();
        let row = out.find("0.7", Variant::EnhancedVoting, Quantity::Tau1).unwrap();
        assert_eq!(row.mean, Some(tau1.iter().sum::<f64>() / tau1.len() as f64));
        assert_eq!(row.converged, 40);
        assert_eq!(row.theory, Some(analysis::expected_tau1(30, 0.3).unwrap()));
        let seeds: Vec<u64> = slice.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, (5..45).collect::<Vec<_>>());
    }

    #[test]
    fn deterministic_csv() {
        let bytes = |m: &Manifest| {
            let mut v = Vec::new();
            run_manifest(m).unwrap().write_csv(&mut v).unwrap();
            v
        };
        let a = bytes(&small());
        assert_eq!(a, bytes(&small()));
        assert!(a.starts_with(b"# experiment,"));
    }

    #[test]
    fn overlays_only_on_complete_graphs() {
        let ring = TopologySpec::Ring { n: 100 };
        assert_eq!(theory(&ring, &[60, 40], Quantity::Tau1), None);
        let complete = TopologySpec::Complete { n: 100 };
        assert_eq!(
            theory(&complete, &[30, 70], Quantity::Tau2),
            Some(analysis::expected_tau2_bound(100, 0.3).unwrap())
        );
        assert_eq!(
            theory(&complete, &[50, 30, 20], Quantity::TauX),
            Some(analysis::tau_x_bound(100, &[0.5, 0.3, 0.2]).unwrap())
        );
        assert_eq!(theory(&complete, &[50, 30, 20], Quantity::Tau1), None);
    }

    #[test]
    fn ties_are_refused_unless_allowed() {
        let mut m = small();
        m.sweep = Sweep::Counts { vectors: vec![vec![15, 15]] };
        assert!(run_manifest(&m).is_err());
        m.allow_ties = true;
        m.replications = 3;
        let out = run_manifest(&m).unwrap();
        assert!(out.rows.iter().all(|r| r.quantity != Quantity::TauPrime || r.count == 0));
    }

    #[test]
    fn builtins_resolve() {
        for name in super::super::BUILTINS {
            let m = builtin_manifest(name).unwrap();
            m.validate().unwrap();
            let n = m.node_count().unwrap();
            for p in 0..m.sweep.len() {
                let c = m.sweep.counts(p, n).unwrap();
                assert!(VoteProfile::from_counts(&c).unwrap().ranking().is_some(), "{name} {p}");
            }
        }
        assert!(builtin_manifest("fig9").is_err());
    }
}
