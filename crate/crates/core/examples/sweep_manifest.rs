//! Loads a TOML sweep manifest and prints its aggregate CSV.
//!
//!     cargo run --release --example sweep_manifest -- examples/data/ring_sweep.toml

use dmvr::experiments::{run_manifest, Manifest};

fn main() -> dmvr::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/ring_sweep.toml").into());
    let m = Manifest::read(path)?.with_replications(50);
    run_manifest(&m)?.write_csv(std::io::stdout().lock())
}
