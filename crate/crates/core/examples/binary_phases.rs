//! Two-phase binary voting on the complete graph: simulated tau1 and tau2
//! against the exact expectation and the bound.

use dmvr::analysis::{expected_tau1, expected_tau2_bound};
use dmvr::experiments::{run_manifest, Manifest, Quantity, Sweep};
use dmvr::sim::TopologySpec;
use dmvr::Variant;

fn main() -> dmvr::Result<()> {
    let n = 100;
    let m = Manifest {
        id: "binary-phases".into(),
        topology: TopologySpec::Complete { n },
        sweep: Sweep::Rho1 { values: vec![0.6, 0.7, 0.8] },
        variants: vec![Variant::CompactVoting],
        replications: 300,
        base_seed: 0,
        cutoff: 1e4,
        allow_ties: false,
        output: None,
    };
    let out = run_manifest(&m)?;
    println!("rho1   tau1 (sim)  E[tau1]   tau2 (sim)  bound");
    for rho1 in [0.6, 0.7, 0.8] {
        let label = rho1.to_string();
        let t1 = out.find(&label, Variant::CompactVoting, Quantity::Tau1).unwrap();
        let t2 = out.find(&label, Variant::CompactVoting, Quantity::Tau2).unwrap();
        let minority = 1.0 - rho1;
        println!(
            "{rho1:<5}  {:>9.3}  {:>8.3}  {:>10.3}  {:>6.3}",
            t1.mean.unwrap(),
            expected_tau1(n, minority)?,
            t2.mean.unwrap(),
            expected_tau2_bound(n, minority)?
        );
    }
    Ok(())
}
