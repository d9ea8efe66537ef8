//! Ternary voting on 198 nodes: convergence time against the margin delta.
//! Writes the aggregate CSV to stdout.

use dmvr::experiments::{builtin_manifest, run_manifest, Sweep};

fn main() -> dmvr::Result<()> {
    let mut m = builtin_manifest("fig6")?.with_replications(100);
    m.sweep = Sweep::Delta {
        values: vec![0.005, 0.015, 0.025, 0.041],
    };
    run_manifest(&m)?.write_csv(std::io::stdout().lock())
}
