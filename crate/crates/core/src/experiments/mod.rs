//! Replicated sweeps over vote profiles, aggregated to plot-ready CSV.

mod manifest;
mod runner;

pub use manifest::{Manifest, Sweep};
pub use runner::{
    run_manifest, theory, AggregateRow, Quantity, Stats, SweepOutput, SWEEP_HEADER_COMMENT,
};

use crate::error::{Error, Result};
use crate::protocol::Variant;
use crate::sim::{TopologySpec, DEFAULT_CUTOFF};

/// Names accepted by [`builtin_manifest`].
pub const BUILTINS: [&str; 6] = ["fig3", "fig4", "fig5a", "fig5b", "fig6", "fig7"];

const BINARY_RHO1: [f64; 7] = [0.52, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8];

/// The bundled experiments:
///
/// * `fig3`: phase times against rho1 on the complete graph, n = 100
/// * `fig4`, `fig5a`, `fig5b`: plain against enhanced voting on the complete
///   graph, the ring and the 10x10 torus
/// * `fig6`: ternary voting, n = 198, against the margin delta
/// * `fig7`: ternary ranking on the complete graph against both bounds
pub fn builtin_manifest(name: &str) -> Result<Manifest> {
    let both = vec![Variant::CompactVoting, Variant::EnhancedVoting];
    let binary = |id: &str, topology| Manifest {
        id: id.into(),
        topology,
        sweep: Sweep::Rho1 {
            values: BINARY_RHO1.to_vec(),
        },
        variants: both.clone(),
        replications: 1000,
        base_seed: 0,
        cutoff: DEFAULT_CUTOFF,
        allow_ties: false,
        output: Some(format!("{id}.csv").into()),
    };
    let m = match name {
        "fig3" => Manifest {
            sweep: Sweep::Rho1 {
                values: (0..9).map(|i| (55 + 5 * i) as f64 / 100.0).collect(),
            },
            variants: vec![Variant::CompactVoting],
            ..binary("fig3", TopologySpec::Complete { n: 100 })
        },
        "fig4" => binary("fig4", TopologySpec::Complete { n: 100 }),
        "fig5a" => binary("fig5a", TopologySpec::Ring { n: 100 }),
        "fig5b" => binary("fig5b", TopologySpec::Torus { rows: 10, cols: 10 }),
        "fig6" => Manifest {
            sweep: Sweep::Delta {
                values: (0..10).map(|i| (5 + 4 * i) as f64 / 1000.0).collect(),
            },
            variants: vec![Variant::EnhancedVoting],
            ..binary("fig6", TopologySpec::Complete { n: 198 })
        },
        "fig7" => Manifest {
            sweep: Sweep::Rho {
                vectors: vec![
                    vec![0.5, 0.3, 0.2],
                    vec![0.45, 0.35, 0.2],
                    vec![0.6, 0.3, 0.1],
                    vec![0.5, 0.35, 0.15],
                    vec![0.4, 0.35, 0.25],
                    vec![0.7, 0.2, 0.1],
                ],
            },
            variants: vec![Variant::CompactRanking],
            ..binary("fig7", TopologySpec::Complete { n: 100 })
        },
        other => {
            return Err(Error::Config(format!(
                "unknown experiment {other:?}; known: {}",
                BUILTINS.join(", ")
            )))
        }
    };
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trips_through_toml() {
        for name in BUILTINS {
            let m = builtin_manifest(name).unwrap();
            assert_eq!(Manifest::from_toml(&m.to_toml()).unwrap(), m);
        }
    }

    #[test]
    fn minimal_manifest_defaults() {
        let m = Manifest::from_toml(
            r#"
id = "ring-demo"
variants = ["compact-voting"]
[topology]
kind = "ring"
n = 40
[sweep]
kind = "rho1"
values = [0.6, 0.7]
"#,
        )
        .unwrap();
        assert_eq!((m.replications, m.base_seed, m.cutoff), (1000, 0, DEFAULT_CUTOFF));
        assert_eq!(m.sweep.counts(1, 40).unwrap(), vec![28, 12]);
        assert!(Manifest::from_toml("id = 'x'\nvariants = []\nsweep = {kind='rho1', values=[0.6]}\ntopology = {kind='ring', n=4}").is_err());
    }

    #[test]
    fn delta_points() {
        let m = builtin_manifest("fig6").unwrap();
        assert_eq!(m.sweep.label(9), "0.041");
        assert_eq!(m.sweep.counts(0, 198).unwrap(), vec![67, 66, 65]);
    }
}
