//! Command line front end: configuration, subcommand dispatch and the
//! artifacts each subcommand writes.

mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::run;
pub use config::{ChaosSection, FiringKind, InitConfig, InitKind, ModelConfig, OutputConfig, RunConfig, SimConfig, SweepConfig};
pub use output::{Manifest, OutputDir};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) | Self::Io(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ringbumps", version, about = "Wandering bumps in a ring of Hawkes neurons")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags overriding the configuration file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub rho_threshold: Option<f64>,
    #[arg(long, global = true)]
    pub firing: Option<FiringKind>,
    #[arg(long, global = true)]
    pub init: Option<InitKind>,
    #[arg(long, global = true)]
    pub init_path: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub snapshot_dt: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub replicas: Option<usize>,
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_svg: bool,
    /// Network sizes for `chaos`, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($src:ident => $($dst:tt)+) => {
                if let Some(v) = self.$src.clone() {
                    cfg.$($dst)+ = v;
                }
            };
        }
        set!(n => model.n);
        set!(kappa => model.kappa);
        set!(rho_threshold => model.rho_threshold);
        set!(firing => model.firing_kind);
        set!(init => init.kind);
        set!(t_end => sim.t_end);
        set!(snapshot_dt => sim.snapshot_dt);
        set!(seed => sim.seed);
        set!(replicas => sweep.n_replicas);
        set!(parallelism => sweep.parallelism);
        set!(out => output.directory);
        set!(ns => chaos.ns);
        set!(t_max => chaos.t_max);
        if let Some(p) = &self.init_path {
            cfg.init.path = Some(p.clone());
        }
        if self.no_svg {
            cfg.output.emit_svg = false;
        }
    }

    /// Configuration file (or defaults) with the flags applied, validated.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        self.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureKind {
    /// `G(A)` against `A` with its fixed points, kappa = 0.1, rho = 0.5.
    Fixed,
    /// Space-time voltage, N = 500, T = 500, `A cos + cos 2x` initially.
    Wandering1,
    /// Space-time voltage, N = 500, T = 5, `(A/4) cos` initially.
    Wandering3,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Stationary bump amplitude and its constants.
    Stationary,
    /// Eigenvalues of the discretised linearisation around the bump.
    Spectrum,
    /// Deterministic neural field flow from the initial profile.
    Nfe,
    /// One network run: events and voltage snapshots.
    Simulate,
    /// Replica sweep estimating the phase diffusion coefficient.
    PhaseDiffusion,
    /// Distance to the mean field over a range of network sizes.
    Chaos,
    /// Recipes for the figures.
    Figure {
        #[arg(value_enum)]
        which: FigureKind,
    },
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Self::Stationary => "stationary".into(),
            Self::Spectrum => "spectrum".into(),
            Self::Nfe => "nfe".into(),
            Self::Simulate => "simulate".into(),
            Self::PhaseDiffusion => "phase-diffusion".into(),
            Self::Chaos => "chaos".into(),
            Self::Figure { which } => format!("figure {}", which.to_possible_value().expect("named").get_name()),
        }
    }
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = cli.overrides.resolve().and_then(|cfg| run(&cli.command, &cfg));
    match result {
        Ok(manifest) => {
            println!("wrote {} files, manifest config hash {}", manifest.artifacts.len() + 1, &manifest.config_sha256[..12]);
            0
        }
        Err(e) => {
            eprintln!("ringbumps: {e}");
            e.exit_code()
        }
    }
}
