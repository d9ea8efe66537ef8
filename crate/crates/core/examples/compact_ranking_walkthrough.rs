//! Step-by-step compact ranking on three nodes, printing each node's
//! permutation, pointer and value set.

use dmvr::protocol::{ranking_step, RankingState, ValueSet};

fn show(tag: &str, nodes: &[RankingState]) {
    let cells: Vec<String> = nodes
        .iter()
        .map(|s| format!("{:?} p={} V={:?}", s.order(), s.pointer(), s.value_set()))
        .collect();
    println!("{tag:<10} {}", cells.join(" | "));
}

fn main() {
    let k = 3;
    let mut nodes: Vec<RankingState> = [0, 0, 1]
        .into_iter()
        .map(|c| RankingState::initial(ValueSet::singleton(c), k))
        .collect();
    let c3 = RankingState::initial(ValueSet::singleton(2), k);
    show("start", &nodes);
    for (i, j) in [(0, 2), (1, 2), (0, 1), (2, 0)] {
        let (a, b) = ranking_step(nodes[i], nodes[j]);
        nodes[i] = a;
        nodes[j] = b;
        show(&format!("({i},{j})"), &nodes);
    }
    let (a, _) = ranking_step(nodes[2], c3);
    println!("node 2 meets a c3 voter: {:?} p={}", a.order(), a.pointer());
}
