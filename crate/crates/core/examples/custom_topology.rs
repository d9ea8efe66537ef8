//! Runs a scenario file on a graph read from an edge list.
//!
//!     cargo run --example custom_topology -- examples/data/petersen_ranking.toml

use dmvr::Scenario;

fn main() -> dmvr::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/petersen_ranking.toml").into());
    let mut sc: Scenario = toml::from_str(&std::fs::read_to_string(&path)?)?;
    if let dmvr::sim::TopologySpec::EdgeList { path } = &mut sc.topology {
        if path.is_relative() {
            *path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join(&*path);
        }
    }
    let (graph, profile) = sc.prepare()?;
    println!("{} nodes, {} edges, counts {:?}", graph.node_count(), graph.edge_count(), profile.counts());
    let t = sc.run()?;
    println!("tau_x {:?}, tau' {:?}, {} interactions", t.tau_x, t.tau_prime, t.interactions);
    println!("readouts: {:?}", t.final_readouts[0]);
    Ok(())
}
