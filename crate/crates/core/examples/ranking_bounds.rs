//! Pairwise hitting-time moments and the order-statistics bounds for a
//! ternary ranking, next to one batch of simulated runs.

use dmvr::analysis::{pairwise_table, tau_prime_bound, tau_x_bound};
use dmvr::experiments::Stats;
use dmvr::sim::{TopologySpec, VoteSpec};
use dmvr::{Scenario, Variant};

fn main() -> dmvr::Result<()> {
    let (n, rho) = (100, [0.5, 0.3, 0.2]);
    for (a, b, mean, var) in pairwise_table(n, &rho)? {
        println!("pair (c{}, c{}): mean {mean:.3}, var {var:.3}", a + 1, b + 1);
    }
    let (mut tx, mut dis) = (Vec::new(), Vec::new());
    for seed in 0..200 {
        let sc = Scenario::new(
            TopologySpec::Complete { n },
            VoteSpec::Fractions(rho.to_vec()),
            Variant::CompactRanking,
            seed,
        );
        let t = sc.run()?;
        if let (Some(x), Some(p)) = (t.tau_x, t.tau_prime) {
            tx.push(x);
            dis.push(p - x);
        }
    }
    let (tx, dis) = (Stats::of(&tx).unwrap(), Stats::of(&dis).unwrap());
    println!("tau_x          {:>7.3} (bound {:.3})", tx.mean, tau_x_bound(n, &rho)?);
    println!("tau' - tau_x   {:>7.3} (bound {:.3})", dis.mean, tau_prime_bound(n, &rho)?);
    Ok(())
}
