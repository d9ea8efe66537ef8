//! Records every interaction of a ring run, replays the log and re-checks
//! the value-set invariants; then shows a corrupted log being caught.

use dmvr::protocol::ValueSet;
use dmvr::sim::{TopologySpec, VoteSpec};
use dmvr::verify::audit_trace;
use dmvr::{Scenario, Variant};

fn main() -> dmvr::Result<()> {
    let mut sc = Scenario::new(
        TopologySpec::Ring { n: 30 },
        VoteSpec::Counts(vec![14, 10, 6]),
        Variant::CompactRanking,
        3,
    );
    sc.log_events = Some(true);
    let mut t = sc.run()?;
    let report = audit_trace(&t)?;
    println!("{} events, passed: {}", report.events, report.passed());
    for (a, b, hit) in &report.pair_hits {
        println!("  projection {{c{}, c{}}} settled at {hit:?}", a + 1, b + 1);
    }

    let log = t.events.as_mut().unwrap();
    let e = &mut log[10];
    e.after[1] = ValueSet::from_bits(e.after[1].bits() | 0b100);
    for f in audit_trace(&t)?.failures.iter().take(3) {
        println!("  {f}");
    }
    Ok(())
}
