//! Node-state counts of the compact encodings.

use dmvr::verify::enumerate_states;
use dmvr::Variant;

fn main() -> dmvr::Result<()> {
    for k in 2..=6 {
        let v = enumerate_states(k, Variant::CompactVoting)?;
        let r = enumerate_states(k, Variant::CompactRanking)?;
        println!(
            "K={k}: voting {:>4} (reachable {:?}), ranking {:>5} (reachable {:?})",
            v.syntactic, v.reachable, r.syntactic, r.reachable
        );
    }
    for s in enumerate_states(3, Variant::CompactVoting)?.listing {
        println!("  {s}");
    }
    Ok(())
}
