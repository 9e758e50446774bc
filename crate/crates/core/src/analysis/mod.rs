//! Long-time statistics of simulated networks: distance to the bump circle,
//! phase traces on the slow time scale `tau = t / N`, estimation of the
//! phase diffusion coefficient, finite-horizon mean-field error and
//! seeded replica sweeps.

mod chaos;
mod diffusion;
mod sweep;
mod trace;

use thiserror::Error;

use crate::hawkes::HawkesError;
use crate::nfe::NfeError;

pub use crate::nfe::manifold_distance;
pub use chaos::{chaos_scaling, median as median_of, mean_field_error, ChaosConfig, ChaosRow, ChaosScaling, MeanFieldReference};
pub use diffusion::{
    estimate_sigma, loglog_slope, quadratic_variation_rate, synthetic_trace, DiffusionEstimate, QvCheck, BOOTSTRAP_RESAMPLES,
    BOOTSTRAP_SEED,
};
pub use sweep::{
    effective_parallelism, phase_diffusion, replica_sweep, run_replica, solve_bump, DiffusionConfig, DiffusionReport, ReplicaOutcome,
    ReplicaSummary, SweepResult,
};
pub use trace::{
    burn_in_time, phase_trace, proximity_report, trace_profiles, unwrap_phases, PhaseTrace, ProximityReport, TraceMode, TraceOptions,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("{invalid} of {total} phase samples could not be projected")]
    TraceUnreliable { invalid: usize, total: usize },
    #[error("{failed} of {total} replicas failed")]
    SweepDegraded { failed: usize, total: usize },
    #[error(transparent)]
    Hawkes(#[from] HawkesError),
    #[error(transparent)]
    Nfe(#[from] NfeError),
}
