use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{counts_from_fractions, Variant};
use crate::sim::{TopologySpec, DEFAULT_CUTOFF};

/// The swept parameter. Every point becomes one fraction vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Sweep {
    /// Binary votes `[rho1, 1 - rho1]`.
    Rho1 { values: Vec<f64> },
    /// Ternary votes `[1/3 + delta, 1/3, 1/3 - delta]`.
    Delta { values: Vec<f64> },
    /// Explicit fraction vectors.
    Rho { vectors: Vec<Vec<f64>> },
    /// Explicit integral counts.
    Counts { vectors: Vec<Vec<u32>> },
}

impl Sweep {
    pub fn len(&self) -> usize {
        match self {
            Sweep::Rho1 { values } | Sweep::Delta { values } => values.len(),
            Sweep::Rho { vectors } => vectors.len(),
            Sweep::Counts { vectors } => vectors.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Label of point `idx`: the swept value itself.
    pub fn label(&self, idx: usize) -> String {
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
        match self {
            Sweep::Rho1 { values } | Sweep::Delta { values } => values[idx].to_string(),
            Sweep::Rho { vectors } => join(&vectors[idx]),
            Sweep::Counts { vectors } => vectors[idx]
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(";"),
        }
    }

    /// Target fractions of point `idx`.
    pub fn fractions(&self, idx: usize, n: usize) -> Vec<f64> {
        match self {
            Sweep::Rho1 { values } => vec![values[idx], 1.0 - values[idx]],
            Sweep::Delta { values } => {
                let third = 1.0 / 3.0;
                vec![third + values[idx], third, third - values[idx]]
            }
            Sweep::Rho { vectors } => vectors[idx].clone(),
            Sweep::Counts { vectors } => vectors[idx].iter().map(|&c| c as f64 / n as f64).collect(),
        }
    }

    /// Integral counts of point `idx` (largest-remainder rounding for fractions).
    pub fn counts(&self, idx: usize, n: usize) -> Result<Vec<u32>> {
        match self {
            Sweep::Counts { vectors } => Ok(vectors[idx].clone()),
            _ => counts_from_fractions(n, &self.fractions(idx, n)),
        }
    }
}

/// One experiment: a topology, a sweep over vote profiles, the variants to
/// compare and the replication scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub id: String,
    pub topology: TopologySpec,
    pub sweep: Sweep,
    pub variants: Vec<Variant>,
    #[serde(default = "default_replications")]
    pub replications: u64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    /// Allow sweep points with tied counts.
    #[serde(default)]
    pub allow_ties: bool,
    /// Where `sweep` writes the CSV when no path is given on the command line.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_replications() -> u64 {
    1000
}

fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF
}

impl Manifest {
    pub fn from_toml(text: &str) -> Result<Self> {
        let m: Manifest = toml::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    pub fn node_count(&self) -> Result<usize> {
        Ok(self.topology.build()?.node_count())
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config(format!("{}: replications must be at least 1", self.id)));
        }
        if self.variants.is_empty() || self.sweep.is_empty() {
            return Err(Error::Config(format!("{}: no variants or no sweep points", self.id)));
        }
        Ok(())
    }

    /// Same experiment with a different replication count.
    pub fn with_replications(mut self, replications: u64) -> Self {
        self.replications = replications;
        self
    }
}
