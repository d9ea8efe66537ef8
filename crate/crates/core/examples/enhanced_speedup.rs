//! Leader copying against plain compact voting on a ring.

use dmvr::sim::{TopologySpec, VoteSpec};
use dmvr::experiments::Stats;
use dmvr::{Scenario, Variant};

fn main() -> dmvr::Result<()> {
    let reps = 100;
    for variant in [Variant::CompactVoting, Variant::EnhancedVoting] {
        let times: Vec<f64> = (0..reps)
            .map(|seed| {
                let sc = Scenario::new(
                    TopologySpec::Ring { n: 100 },
                    VoteSpec::Counts(vec![55, 45]),
                    variant,
                    seed,
                );
                sc.run().map(|t| t.tau_prime.unwrap_or(f64::NAN))
            })
            .collect::<dmvr::Result<_>>()?;
        let s = Stats::of(&times).unwrap();
        println!("{variant:<16} tau' = {:.1} +- {:.1}", s.mean, s.ci95);
    }
    Ok(())
}
