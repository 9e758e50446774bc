use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::hawkes::InitialProfile;
use crate::model::FiringFunction;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FiringKind {
    Sigmoid,
    Heaviside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    Bump,
    BumpPlusMode2,
    QuarterBump,
    Zero,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n: usize,
    pub kappa: f64,
    pub rho_threshold: f64,
    pub firing_kind: FiringKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub kind: InitKind,
    /// CSV with a `value` column, one row per neuron.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub t_end: f64,
    pub snapshot_dt: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_replicas: usize,
    pub parallelism: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub emit_svg: bool,
}

/// Network sizes and horizon of the `chaos` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChaosSection {
    pub ns: Vec<usize>,
    pub t_max: f64,
    pub snapshot_dt: f64,
}

impl Default for ChaosSection {
    fn default() -> Self {
        Self { ns: vec![125, 250, 500, 1000], t_max: 10.0, snapshot_dt: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub init: InitConfig,
    pub sim: SimConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
    #[serde(default)]
    pub chaos: ChaosSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig { n: 500, kappa: 0.05, rho_threshold: 0.5, firing_kind: FiringKind::Sigmoid },
            init: InitConfig { kind: InitKind::Bump, path: None },
            sim: SimConfig { t_end: 500.0, snapshot_dt: 1.0, seed: 1 },
            sweep: SweepConfig { n_replicas: 100, parallelism: 8 },
            output: OutputConfig { directory: PathBuf::from("out"), emit_svg: true },
            chaos: ChaosSection::default(),
        }
    }
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {x}")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.model.n == 0 {
            return Err(CliError::Config("model.n must be at least 1".into()));
        }
        if self.model.firing_kind == FiringKind::Sigmoid {
            positive("model.kappa", self.model.kappa)?;
        }
        if !(self.model.rho_threshold > -1.0 && self.model.rho_threshold < 1.0) {
            return Err(CliError::Config(format!("model.rho_threshold must lie in (-1, 1), got {}", self.model.rho_threshold)));
        }
        positive("sim.t_end", self.sim.t_end)?;
        positive("sim.snapshot_dt", self.sim.snapshot_dt)?;
        if self.sweep.n_replicas == 0 || self.sweep.parallelism == 0 {
            return Err(CliError::Config("sweep.n_replicas and sweep.parallelism must be at least 1".into()));
        }
        positive("chaos.t_max", self.chaos.t_max)?;
        positive("chaos.snapshot_dt", self.chaos.snapshot_dt)?;
        if self.chaos.ns.iter().any(|&n| n == 0) {
            return Err(CliError::Config("chaos.ns entries must be at least 1".into()));
        }
        match (&self.init.kind, &self.init.path) {
            (InitKind::File, None) => Err(CliError::Config("init.kind = file needs init.path".into())),
            (InitKind::File, Some(p)) if !p.is_file() => Err(CliError::Config(format!("init.path {} is not a readable file", p.display()))),
            _ => Ok(()),
        }
    }

    pub fn firing(&self) -> Result<FiringFunction, CliError> {
        let m = &self.model;
        match m.firing_kind {
            FiringKind::Sigmoid => FiringFunction::sigmoid(m.kappa, m.rho_threshold).map_err(|e| CliError::Config(e.to_string())),
            FiringKind::Heaviside => Ok(FiringFunction::heaviside(m.rho_threshold)),
        }
    }

    /// Initial profile, reading per-neuron values for `init.kind = file`.
    pub fn initial_profile(&self) -> Result<InitialProfile, CliError> {
        Ok(match self.init.kind {
            InitKind::Bump => InitialProfile::Bump,
            InitKind::BumpPlusMode2 => InitialProfile::BumpPlusMode2,
            InitKind::QuarterBump => InitialProfile::QuarterBump,
            InitKind::Zero => InitialProfile::Zero,
            InitKind::File => {
                let path = self.init.path.as_ref().ok_or_else(|| CliError::Config("init.path missing".into()))?;
                InitialProfile::Values(read_profile(path)?)
            }
        })
    }
}

#[derive(Deserialize)]
struct ProfileRow {
    value: f64,
}

fn read_profile(path: &Path) -> Result<Vec<f64>, CliError> {
    let bad = |e: csv::Error| CliError::Config(format!("{}: {e}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(bad)?;
    rdr.deserialize::<ProfileRow>().map(|r| r.map(|r| r.value).map_err(bad)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let mut cfg = RunConfig::default();
        cfg.init = InitConfig { kind: InitKind::File, path: Some("rho.csv".into()) };
        cfg.model.kappa = 0.1 + 0.2;
        cfg.chaos.ns = vec![10, 20];
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(RunConfig::from_toml(&RunConfig::default().to_toml()).unwrap(), RunConfig::default());
    }

    #[test]
    fn chaos_section_is_optional() {
        let text = RunConfig::default().to_toml();
        let cut = text.split("[chaos]").next().unwrap();
        assert_eq!(RunConfig::from_toml(cut).unwrap().chaos, ChaosSection::default());
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RunConfig::default();
        cfg.model.kappa = -1.0;
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
        let mut cfg = RunConfig::default();
        cfg.model.firing_kind = FiringKind::Heaviside;
        cfg.model.kappa = 0.0;
        assert!(cfg.validate().is_ok());
        cfg.init.kind = InitKind::File;
        assert!(cfg.validate().is_err());
        cfg.init.path = Some("/no/such/file.csv".into());
        assert!(cfg.validate().is_err());
        assert!(RunConfig::from_toml("[model]\nn = 3").is_err());
    }

    #[test]
    fn reads_profile_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rho.csv");
        std::fs::write(&path, "value\n1.5\n-0.25\n0\n").unwrap();
        let mut cfg = RunConfig::default();
        cfg.init = InitConfig { kind: InitKind::File, path: Some(path) };
        cfg.validate().unwrap();
        assert_eq!(cfg.initial_profile().unwrap(), InitialProfile::Values(vec![1.5, -0.25, 0.0]));
    }
}
