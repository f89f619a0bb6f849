//! Run configuration: a sectioned `key = value` text file (TOML syntax).
//!
//! Every key is required and unknown keys are rejected, so a typo can never
//! silently fall back to a default.

use crate::constitutive::FluidProps;
use crate::fitlab::InverseClusteringMode;
use crate::hetfield::{FieldSpec, FieldSpecs};
use crate::netbuilder::Metric;
use crate::solver::{GeometryConfig, ScheduleConfig, SimulationConfig, SimulationControl, SoilConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// The configuration shipped as `default.cfg`.
pub const DEFAULT_CONFIG_TEXT: &str = include_str!("../default.cfg");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config value `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub seed: u64,
    pub theta_s: FieldSpec,
    pub k_intrinsic: FieldSpec,
    pub n_vg: FieldSpec,
}

impl FieldSection {
    pub fn specs(&self) -> FieldSpecs {
        FieldSpecs { theta_s: self.theta_s, k_intrinsic: self.k_intrinsic, n_vg: self.n_vg }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionChoice {
    /// Column above the disk rows.
    AboveDisk,
    Whole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DMaxMode {
    /// Largest pairwise distance within each profile set.
    PerSet,
    /// Largest pairwise distance over all snapshot times.
    Global,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    /// Significance level of the correlation networks.
    pub xi: f64,
    /// Euclidean edges need `d >= fraction * d_max`.
    pub fraction: f64,
    pub d_max_mode: DMaxMode,
    pub lattice_x: usize,
    pub lattice_y: usize,
    pub velocity_lattice_x: usize,
    pub velocity_metric: Metric,
    pub region: RegionChoice,
    /// Rule for the temporal block matrices of the saturation profiles.
    pub block_metric: Metric,
    /// Erdos-Renyi replicates behind the small-world ratios.
    pub random_replicates: usize,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            xi: 0.05,
            fraction: 0.7,
            d_max_mode: DMaxMode::PerSet,
            lattice_x: 96,
            lattice_y: 96,
            velocity_lattice_x: 93,
            velocity_metric: Metric::CorrelationPvalue,
            region: RegionChoice::AboveDisk,
            block_metric: Metric::Euclidean,
            random_replicates: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub inverse_clustering: InverseClusteringMode,
    /// Network whose pooled (k, c) pairs feed the k-c power law.
    pub kc_network: KcNetwork,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KcNetwork {
    SaturationCorrelation,
    SaturationEuclidean,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { inverse_clustering: InverseClusteringMode::ReciprocalOfMean, kc_network: KcNetwork::SaturationEuclidean }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("run") }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub soil: SoilConfig,
    pub fluids: FluidProps,
    pub field: FieldSection,
    pub schedule: ScheduleConfig,
    pub simulation: SimulationControl,
    pub network: NetworkConfig,
    pub fit: FitConfig,
    pub output: OutputConfig,
}

impl Default for FieldSection {
    fn default() -> Self {
        let specs = FieldSpecs::default();
        let seed = SimulationConfig::default().seed;
        Self { seed, theta_s: specs.theta_s, k_intrinsic: specs.k_intrinsic, n_vg: specs.n_vg }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config types always serialize")
    }

    pub fn simulation(&self) -> SimulationConfig {
        SimulationConfig {
            geometry: self.geometry,
            soil: self.soil,
            fluids: self.fluids,
            field: self.field.specs(),
            seed: self.field.seed,
            schedule: self.schedule,
            control: self.simulation.clone(),
        }
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        use crate::solver::{BoundarySchedule, GridGeometry};
        let g = &self.geometry;
        GridGeometry::from_config(g).map_err(|e| invalid("geometry", e.to_string()))?;
        if !(g.disk_permeability > 0.0) {
            return Err(invalid("geometry.disk_permeability", "must be positive"));
        }
        if !(self.soil.alpha > 0.0) {
            return Err(invalid("soil.alpha", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.soil.theta_r) {
            return Err(invalid("soil.theta_r", "must lie in [0, 1)"));
        }
        if self.soil.theta_r >= self.field.theta_s.lower_clamp {
            return Err(invalid("soil.theta_r", "must be below field.theta_s.lower_clamp"));
        }
        self.fluids.validate().map_err(|e| invalid("fluids", e.to_string()))?;
        self.field.specs().validate().map_err(|e| invalid("field", e.to_string()))?;
        self.simulation.validate().map_err(|e| {
            let msg = e.to_string();
            let field = if msg.contains("snapshot_times") {
                "simulation.snapshot_times"
            } else if msg.contains("t_end") {
                "simulation.t_end"
            } else {
                "simulation"
            };
            invalid(field, msg)
        })?;
        BoundarySchedule::from_config(&self.schedule, self.simulation.t_end)
            .map_err(|e| invalid("schedule", e.to_string()))?;
        let n = &self.network;
        if !(n.xi > 0.0 && n.xi < 1.0) {
            return Err(invalid("network.xi", "must lie in (0, 1)"));
        }
        if !(n.fraction > 0.0 && n.fraction <= 1.0) {
            return Err(invalid("network.fraction", "must lie in (0, 1]"));
        }
        if n.lattice_x < 2 || n.velocity_lattice_x < 2 {
            return Err(invalid("network.lattice_x", "lattices need at least 2 columns"));
        }
        if n.lattice_y < 3 {
            return Err(invalid("network.lattice_y", "profiles need at least 3 samples"));
        }
        if n.random_replicates == 0 {
            return Err(invalid("network.random_replicates", "must be at least 1"));
        }
        if self.output.dir.as_os_str().is_empty() {
            return Err(invalid("output.dir", "must not be empty"));
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the canonical serialization,
    /// ignoring the output directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir = PathBuf::new();
        let digest = Sha256::digest(c.to_toml_string().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Comment line carried by every output file.
    pub fn header_line(&self) -> String {
        format!("# soilnet {} config={}", env!("CARGO_PKG_VERSION"), self.hash())
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    RunConfig::from_toml_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_default_parses_to_defaults() {
        assert_eq!(RunConfig::from_toml_str(DEFAULT_CONFIG_TEXT).unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trip() {
        let mut c = RunConfig::default();
        c.network.xi = 0.01;
        c.field.seed = 7;
        c.simulation.snapshot_times = vec![0.1, 0.3, 1.0];
        let back = RunConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn missing_snapshot_times_is_named() {
        let text = DEFAULT_CONFIG_TEXT.replace("snapshot_times", "# snapshot_times");
        let err = RunConfig::from_toml_str(&text).unwrap_err().to_string();
        assert!(err.contains("snapshot_times"), "{err}");
    }

    #[test]
    fn unknown_key_is_an_error_with_line() {
        let text = DEFAULT_CONFIG_TEXT.replace("[network]\n", "[network]\nxii = 0.1\n");
        let err = RunConfig::from_toml_str(&text).unwrap_err().to_string();
        assert!(err.contains("xii") && err.contains("line"), "{err}");
    }

    #[test]
    fn validation_names_the_field() {
        let mut c = RunConfig::default();
        c.simulation.snapshot_times = vec![0.5, 0.2];
        let err = RunConfig::from_toml_str(&c.to_toml_string()).unwrap_err().to_string();
        assert!(err.contains("simulation.snapshot_times"), "{err}");
        let mut c = RunConfig::default();
        c.network.xi = 1.5;
        assert!(c.validate().unwrap_err().to_string().contains("network.xi"));
    }

    #[test]
    fn hash_ignores_output_dir_only() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.output.dir = PathBuf::from("elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.field.seed += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }
}
