//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//!     cargo test --release --test acceptance

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;

use dmvr::analysis::{expected_tau1, expected_tau2_bound, tau_prime_bound, tau_x_bound};
use dmvr::experiments::{builtin_manifest, run_manifest, Manifest, Quantity, Stats, Sweep, SweepOutput};
use dmvr::sim::{Readout, TopologySpec, VoteSpec};
use dmvr::verify::{
    audit_trace, enumerate_states, equivalence_check, model_check, strict_profiles, Verdict,
};
use dmvr::{Result, Scenario, Variant, VoteProfile};

const SEEDS: u64 = 1000;
const REPS: u64 = 1000;
/// Relative tolerance floor for tau1 against the exact sum.
const TAU1_REL: f64 = 0.05;
/// Statistical slack, in standard errors.
const Z: f64 = 3.0;
const AUDIT_RUNS: u64 = 100;
const EQUIV_SEEDS: usize = 200;

type Check<'a> = Box<dyn Fn() -> Result<Outcome> + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn counts_for(k: usize) -> &'static [f64] {
    match k {
        2 => &[0.6, 0.4],
        3 => &[0.5, 0.3, 0.2],
        _ => &[0.4, 0.3, 0.2, 0.1],
    }
}

fn correctness() -> Result<Outcome> {
    let mut configs = Vec::new();
    for (n, torus) in [(20, (4, 5)), (100, (10, 10))] {
        for topology in [
            TopologySpec::Complete { n },
            TopologySpec::Ring { n },
            TopologySpec::Torus {
                rows: torus.0,
                cols: torus.1,
            },
        ] {
            for k in 2..=4 {
                for variant in Variant::ALL {
                    configs.push((topology.clone(), k, variant));
                }
            }
        }
    }
    let mut runs = 0u64;
    let mut wrong = Vec::new();
    for (topology, k, variant) in &configs {
        let bad: Vec<u64> = (0..SEEDS)
            .into_par_iter()
            .filter_map(|seed| {
                let mut sc = Scenario::new(
                    topology.clone(),
                    VoteSpec::Fractions(counts_for(*k).to_vec()),
                    *variant,
                    seed,
                );
                sc.log_events = Some(false);
                let t = sc.run().ok()?;
                let want = if variant.ranks() {
                    Readout::Ranking((0..*k).collect())
                } else {
                    Readout::Majority(0)
                };
                let ok = t.converged && t.final_readouts.iter().all(|r| *r == want);
                (!ok).then_some(seed)
            })
            .collect();
        runs += SEEDS;
        if !bad.is_empty() {
            wrong.push(format!("{topology:?} K={k} {variant}: seeds {:?}", &bad[..bad.len().min(5)]));
        }
    }
    outcome(
        wrong.is_empty(),
        format!("{} configurations, {runs} runs, {} wrong {}", configs.len(), wrong.len(), wrong.join("; ")),
    )
}

fn exhaustive() -> Result<Outcome> {
    let (mut checked, mut failed) = (0, Vec::new());
    for variant in [Variant::CompactVoting, Variant::CompactRanking, Variant::EnhancedVoting] {
        for k in 1..=3 {
            for n in 2..=5 {
                for counts in strict_profiles(n, k) {
                    let r = model_check(&VoteProfile::from_counts(&counts)?, variant)?;
                    checked += 1;
                    if r.verdict != Verdict::Pass {
                        failed.push(format!("{variant} {counts:?}: {}", r.verdict));
                    }
                }
            }
        }
    }
    outcome(failed.is_empty(), format!("{checked} profiles checked, failures: {failed:?}"))
}

fn stats(out: &SweepOutput, point: &str, v: Variant, q: Quantity) -> Stats {
    out.find(point, v, q)
        .and_then(|r| r.stats())
        .unwrap_or_else(|| panic!("no {q:?} at {point} for {v}"))
}

fn binary_points(m: &Manifest) -> Vec<(String, f64)> {
    let Sweep::Rho1 { values } = &m.sweep else { unreachable!() };
    values.iter().map(|v| (v.to_string(), 1.0 - v)).collect()
}

fn tau1_exact(fig3: &(Manifest, SweepOutput)) -> Result<Outcome> {
    let (m, out) = fig3;
    let mut worst = (0.0f64, String::new());
    let mut pass = true;
    for (label, minority) in binary_points(m) {
        let s = stats(out, &label, Variant::CompactVoting, Quantity::Tau1);
        let exact = expected_tau1(100, minority)?;
        let err = (s.mean - exact).abs();
        let tol = (TAU1_REL * exact).max(Z * s.se());
        pass &= err <= tol;
        if err / exact > worst.0 {
            worst = (err / exact, format!("rho1={label}: {:.4} vs {:.4}", s.mean, exact));
        }
    }
    outcome(pass, format!("worst relative error {:.2}% ({})", 100.0 * worst.0, worst.1))
}

fn tau2_bound(fig3: &(Manifest, SweepOutput)) -> Result<Outcome> {
    let (m, out) = fig3;
    let points = binary_points(m);
    let (mut within, mut positive_gap) = (true, 0);
    let mut gaps = Vec::new();
    for (label, minority) in &points {
        let s = stats(out, label, Variant::CompactVoting, Quantity::Tau2);
        let bound = expected_tau2_bound(100, *minority)?;
        within &= s.mean <= bound + Z * s.se();
        if bound > s.mean {
            positive_gap += 1;
        }
        gaps.push(format!("{:.2}", bound - s.mean));
    }
    outcome(
        within && 2 * positive_gap > points.len(),
        format!("gap positive at {positive_gap}/{} points, gaps [{}]", points.len(), gaps.join(", ")),
    )
}

fn ranking_bounds() -> Result<Outcome> {
    let m = builtin_manifest("fig7")?.with_replications(REPS);
    let out = run_manifest(&m)?;
    let Sweep::Rho { vectors } = &m.sweep else { unreachable!() };
    let mut pass = vectors.len() >= 5;
    let mut cells = Vec::new();
    for rho in vectors {
        let label = m.sweep.label(vectors.iter().position(|v| v == rho).unwrap());
        let x = stats(&out, &label, Variant::CompactRanking, Quantity::TauX);
        let d = stats(&out, &label, Variant::CompactRanking, Quantity::Dissemination);
        let (bx, bd) = (tau_x_bound(100, rho)?, tau_prime_bound(100, rho)?);
        pass &= x.mean <= bx + Z * x.se() && d.mean <= bd + Z * d.se();
        cells.push(format!("{label}: {:.1}/{bx:.1}, {:.1}/{bd:.1}", x.mean, d.mean));
    }
    outcome(pass, format!("tau_x/bound, (tau'-tau_x)/bound: {}", cells.join("; ")))
}

fn enhanced_speedup() -> Result<Outcome> {
    let mut pass = true;
    let mut cells = Vec::new();
    for name in ["fig4", "fig5a", "fig5b"] {
        let mut m = builtin_manifest(name)?.with_replications(REPS);
        m.sweep = Sweep::Rho1 {
            values: vec![0.52, 0.55, 0.6],
        };
        let out = run_manifest(&m)?;
        for (label, _) in binary_points(&m) {
            let plain = stats(&out, &label, Variant::CompactVoting, Quantity::TauPrime);
            let fast = stats(&out, &label, Variant::EnhancedVoting, Quantity::TauPrime);
            let z = (plain.mean - fast.mean) / plain.se().hypot(fast.se());
            pass &= z > Z;
            cells.push(format!("{name}@{label} z={z:.1}"));
        }
    }
    outcome(pass, cells.join(", "))
}

fn ternary_scaling() -> Result<Outcome> {
    let mut m = builtin_manifest("fig6")?.with_replications(REPS);
    let deltas = [0.005, 0.015, 0.025, 0.041];
    m.sweep = Sweep::Delta { values: deltas.to_vec() };
    let out = run_manifest(&m)?;
    let means: Vec<f64> = deltas
        .iter()
        .map(|d| stats(&out, &d.to_string(), Variant::EnhancedVoting, Quantity::TauPrime).mean)
        .collect();
    let shown: Vec<String> = means.iter().map(|x| format!("{x:.1}")).collect();
    outcome(
        means.windows(2).all(|w| w[1] < w[0]),
        format!("mean tau' [{}] for delta {deltas:?}", shown.join(", ")),
    )
}

fn state_counts() -> Result<Outcome> {
    let v3 = enumerate_states(3, Variant::CompactVoting)?;
    let v4 = enumerate_states(4, Variant::CompactVoting)?;
    let mut pass = v3.syntactic == 12 && v4.syntactic == 32;
    let mut ranking = Vec::new();
    for census in [&v3, &v4] {
        pass &= census.reachable.is_some_and(|r| r <= census.syntactic);
    }
    for k in 1..=6usize {
        let c = enumerate_states(k, Variant::CompactRanking)?;
        let fact: usize = (1..=k).product();
        pass &= c.syntactic == k * fact && c.reachable.is_some_and(|r| r <= c.syntactic);
        ranking.push(format!("{}/{}", c.reachable.unwrap_or(0), c.syntactic));
    }
    outcome(
        pass,
        format!(
            "voting K=3 {}, K=4 {}; ranking reachable/total K=1..6 [{}]",
            v3.syntactic,
            v4.syntactic,
            ranking.join(", ")
        ),
    )
}

fn invariants() -> Result<Outcome> {
    let topologies = [
        TopologySpec::Complete { n: 20 },
        TopologySpec::Ring { n: 20 },
        TopologySpec::Torus { rows: 4, cols: 5 },
    ];
    let (mut events, mut failed) = (0, Vec::new());
    for seed in 0..AUDIT_RUNS {
        let variant = Variant::ALL[seed as usize % 4];
        let topology = topologies[(seed / 4) as usize % 3].clone();
        let k = 2 + (seed as usize % 3);
        let mut sc = Scenario::new(topology, VoteSpec::Fractions(counts_for(k).to_vec()), variant, seed);
        sc.log_events = Some(true);
        let r = audit_trace(&sc.run()?)?;
        events += r.events;
        if !r.passed() {
            failed.push(format!("seed {seed}: {}", r.failures[0]));
        }
    }
    outcome(
        failed.is_empty(),
        format!("{AUDIT_RUNS} runs, {events} events replayed, failures: {failed:?}"),
    )
}

fn equivalence() -> Result<Outcome> {
    let mut pass = true;
    let mut cells = Vec::new();
    for counts in [vec![6, 4], vec![5, 3, 2]] {
        for variant in [Variant::CompactVoting, Variant::CompactRanking] {
            let sc = Scenario::new(TopologySpec::Complete { n: 10 }, VoteSpec::Counts(counts.clone()), variant, 0);
            let r = equivalence_check(&sc, EQUIV_SEEDS)?;
            pass &= r.verdict == Verdict::Pass;
            cells.push(format!(
                "{:?} K={}: {} ({} transient readout differences)",
                r.pairing,
                counts.len(),
                r.verdict,
                r.transient_disagreements
            ));
        }
    }
    outcome(pass, cells.join(", "))
}

fn determinism() -> Result<Outcome> {
    let m = builtin_manifest("fig5b")?.with_replications(50);
    let csv = |threads: usize| -> Result<Vec<u8>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            let mut bytes = Vec::new();
            run_manifest(&m)?.write_csv(&mut bytes)?;
            Ok(bytes)
        })
    };
    let (a, b, c) = (csv(1)?, csv(1)?, csv(4)?);
    outcome(
        a == b && a == c,
        format!("fig5b x50 reps: {} bytes, repeat identical {}, 4 threads identical {}", a.len(), a == b, a == c),
    )
}

fn main() -> ExitCode {
    // criteria 3 and 4 share one fig3 sweep, run on first use
    let fig3 = OnceLock::new();
    let fig3 = || {
        fig3.get_or_init(|| {
            builtin_manifest("fig3")
                .map(|m| m.with_replications(REPS))
                .and_then(|m| run_manifest(&m).map(|o| (m, o)))
        })
        .as_ref()
        .map_err(clone_err)
    };
    let criteria: Vec<(&str, Check)> = vec![
        ("correctness", Box::new(correctness)),
        ("exhaustive convergence", Box::new(exhaustive)),
        ("tau1 exactness", Box::new(|| tau1_exact(fig3()?))),
        ("tau2 bound", Box::new(|| tau2_bound(fig3()?))),
        ("ranking bounds", Box::new(ranking_bounds)),
        ("enhanced speedup", Box::new(enhanced_speedup)),
        ("ternary scaling", Box::new(ternary_scaling)),
        ("state counts", Box::new(state_counts)),
        ("invariant suite", Box::new(invariants)),
        ("representation equivalence", Box::new(equivalence)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn clone_err(e: &dmvr::Error) -> dmvr::Error {
    dmvr::Error::Config(e.to_string())
}
