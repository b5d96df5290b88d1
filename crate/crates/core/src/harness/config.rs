use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::acquisition::DecisionGrid;
use crate::algorithms::AlgorithmConfig;
use crate::environments::EnvironmentSpec;
use crate::error::{Error, Result};
use crate::kernels::{KernelFamily, KernelSpec};

fn default_low() -> f64 {
    0.0
}

fn default_high() -> f64 {
    1.0
}

fn default_resolution() -> usize {
    256
}

fn default_dim() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_low")]
    pub low: f64,
    #[serde(default = "default_high")]
    pub high: f64,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            low: default_low(),
            high: default_high(),
            resolution: default_resolution(),
            dim: default_dim(),
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<DecisionGrid> {
        DecisionGrid::new(self.low, self.high, self.resolution, self.dim)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub environment: EnvironmentSpec,
    pub kernel: KernelSpec,
    #[serde(default)]
    pub grid: GridConfig,
    pub horizon: u64,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub master_seed: u64,
    pub algorithms: Vec<AlgorithmConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// A non-fatal configuration finding, recorded in the manifest.
pub type Warning = String;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 over the canonical serialization (defaults filled in).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("results").join(&self.name))
    }

    /// Rejects invalid fields and returns admissibility warnings.
    pub fn validate(&self) -> Result<Vec<Warning>> {
        if self.horizon < 1 {
            return Err(Error::config("horizon", "must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "must be non-empty"));
        }
        if self.seeds.iter().collect::<HashSet<_>>().len() != self.seeds.len() {
            return Err(Error::config("seeds", "must not repeat"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::config("algorithms", "must be non-empty"));
        }
        let mut names = HashSet::new();
        for a in &self.algorithms {
            let name = a.name();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(Error::config("algorithms.name", format!("`{name}` must be [A-Za-z0-9_-]+")));
            }
            if !names.insert(name.to_string()) {
                return Err(Error::config("algorithms.name", format!("duplicate algorithm name `{name}`")));
            }
            a.validate()?;
        }
        self.environment.validate()?;
        self.kernel.validate()?;
        self.grid.build()?;
        if self.grid.dim != self.environment.input_dim() {
            return Err(Error::config(
                "grid.dim",
                format!("environment takes {}-dimensional actions", self.environment.input_dim()),
            ));
        }
        self.environment.reward().validate(self.environment.output_dim())?;

        let mut warnings = Vec::new();
        let d = self.grid.dim;
        for a in self.algorithms.iter().filter(|a| a.kind.is_windowed()) {
            if self.kernel.family == KernelFamily::Matern && 2.0 * self.kernel.nu <= d as f64 {
                return Err(Error::config(
                    "kernel.nu",
                    format!("query budgets need 2ν > d (ν = {}, d = {d})", self.kernel.nu),
                ));
            }
            let alpha_tilde = a.alpha_tilde.expect("validated");
            let threshold = self.kernel.alpha_tilde_threshold(d);
            if alpha_tilde >= threshold {
                warnings.push(format!(
                    "{}: alpha_tilde = {alpha_tilde} is not below the admissible threshold {threshold:.6} for this kernel (d = {d})",
                    a.name()
                ));
            }
            let alpha = a.alpha.unwrap_or(self.environment.alpha());
            if alpha == 0.0 {
                warnings.push(format!(
                    "{}: drift exponent is 0, windowing is bypassed and the learner behaves like gp_ucbl",
                    a.name()
                ));
            }
        }
        Ok(warnings)
    }

    /// Keeps only the named algorithms, in the given order.
    pub fn select_algorithms(&mut self, names: &[String]) -> Result<()> {
        let mut picked = Vec::with_capacity(names.len());
        for n in names {
            let a = self
                .algorithms
                .iter()
                .find(|a| a.name() == n)
                .ok_or_else(|| Error::config("algos", format!("no algorithm named `{n}` in config")))?;
            picked.push(a.clone());
        }
        self.algorithms = picked;
        Ok(())
    }
}

/// Seed of an independent stream for `(master, label, index)`.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub json: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "stationary",
        description: "time-invariant response (sin 2πx, cos 2πx); GP-UCBL vs W-SparQ-BL",
        json: include_str!("../../presets/stationary.json"),
    },
    Preset {
        name: "moderate",
        description: "smooth phase-shift drift; GP-UCBL vs W-SparQ-BL",
        json: include_str!("../../presets/moderate.json"),
    },
    Preset {
        name: "fast",
        description: "non-smooth response with fast drift; GP-UCBL vs W-SparQ-BL",
        json: include_str!("../../presets/fast.json"),
    },
    Preset {
        name: "seqgame",
        description: "scalar response driven by a drifting opponent type; W-SparQ vs GP-UCB, HEDGE, EXP3",
        json: include_str!("../../presets/seqgame.json"),
    },
];

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .map(|p| ExperimentConfig::from_json(p.json).expect("shipped presets parse"))
}
