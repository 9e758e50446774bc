use rayon::prelude::*;

use crate::hawkes::{simulate, HawkesParams, InitialProfile};
use crate::model::{FiringFunction, RingGrid};
use crate::stationary::{solve_amplitude, BumpSolution, Branch};

use super::diffusion::{estimate_sigma, quadratic_variation_rate, DiffusionEstimate, QvCheck};
use super::trace::{phase_trace, proximity_report, PhaseTrace, ProximityReport, TraceOptions};
use super::AnalysisError;

/// Fraction of failed replicas above which a sweep is degraded.
const MAX_FAILED: f64 = 0.2;

/// `requested` capped by `RINGBUMPS_THREADS` when set, and at least 1.
pub fn effective_parallelism(requested: usize) -> usize {
    let cap = std::env::var("RINGBUMPS_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&c| c > 0);
    requested.min(cap.unwrap_or(usize::MAX)).max(1)
}

#[derive(Debug, Clone)]
pub struct ReplicaOutcome<T> {
    pub index: usize,
    pub seed: u64,
    pub result: Result<T, String>,
}

#[derive(Debug, Clone)]
pub struct SweepResult<T> {
    /// In replica order.
    pub outcomes: Vec<ReplicaOutcome<T>>,
    pub failed: usize,
}

impl<T> SweepResult<T> {
    pub fn successes(&self) -> impl Iterator<Item = (usize, &T)> {
        self.outcomes.iter().filter_map(|o| o.result.as_ref().ok().map(|t| (o.index, t)))
    }
}

/// Runs `job(base_seed + r, r)` for `r < n_replicas` on a pool of
/// `effective_parallelism(parallelism)` threads. Results are in replica order
/// whatever the thread count.
pub fn replica_sweep<T, F>(base_seed: u64, n_replicas: usize, parallelism: usize, job: F) -> Result<SweepResult<T>, AnalysisError>
where
    T: Send,
    F: Fn(u64, usize) -> Result<T, AnalysisError> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(effective_parallelism(parallelism))
        .build()
        .expect("thread pool");
    let outcomes: Vec<ReplicaOutcome<T>> = pool.install(|| {
        (0..n_replicas)
            .into_par_iter()
            .map(|r| {
                let seed = base_seed.wrapping_add(r as u64);
                ReplicaOutcome { index: r, seed, result: job(seed, r).map_err(|e| e.to_string()) }
            })
            .collect()
    });
    let failed = outcomes.iter().filter(|o| o.result.is_err()).count();
    if failed as f64 > MAX_FAILED * n_replicas as f64 {
        return Err(AnalysisError::SweepDegraded { failed, total: n_replicas });
    }
    Ok(SweepResult { outcomes, failed })
}

/// Settings for a phase diffusion sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionConfig {
    pub n: usize,
    pub kappa: f64,
    pub rho_threshold: f64,
    pub profile: InitialProfile,
    /// Microscopic end time. `tau_f = t_end / n`.
    pub t_end: f64,
    pub snapshot_dt: f64,
    pub base_seed: u64,
    pub n_replicas: usize,
    pub parallelism: usize,
    pub trace: TraceOptions,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        Self {
            n: 500,
            kappa: 0.05,
            rho_threshold: 0.5,
            profile: InitialProfile::Bump,
            t_end: 500.0,
            snapshot_dt: 1.0,
            base_seed: 1,
            n_replicas: 100,
            parallelism: std::thread::available_parallelism().map_or(1, |p| p.get()),
            trace: TraceOptions::default(),
        }
    }
}

/// What one replica contributes.
#[derive(Debug, Clone)]
pub struct ReplicaSummary {
    pub trace: PhaseTrace,
    pub proximity: ProximityReport,
    pub qv_rate: f64,
    pub events: usize,
}

#[derive(Debug, Clone)]
pub struct DiffusionReport {
    pub bump: BumpSolution,
    pub estimate: DiffusionEstimate,
    pub replicas: SweepResult<ReplicaSummary>,
    /// Quadratic variation with the jump projected by `<v, h> / ||v||`.
    pub qv_as_written: QvCheck,
    /// The same divided by `A^2`, projecting by `<v, h> / ||v||^2`.
    pub qv_corrected: QvCheck,
}

impl DiffusionReport {
    pub fn sigma_theory(&self) -> f64 {
        self.bump.sigma
    }

    /// Diffusion coefficient of the isochronal phase, `sigma / A`.
    pub fn sigma_phase(&self) -> f64 {
        self.bump.sigma / self.bump.amplitude
    }

    pub fn traces(&self) -> impl Iterator<Item = (usize, &PhaseTrace)> {
        self.replicas.successes().map(|(r, s)| (r, &s.trace))
    }
}

pub fn run_replica(cfg: &DiffusionConfig, bump: &BumpSolution, seed: u64) -> Result<ReplicaSummary, AnalysisError> {
    let grid = RingGrid::new(cfg.n).map_err(crate::hawkes::HawkesError::from)?;
    let rho = cfg.profile.values(&grid, bump.amplitude)?;
    let params = HawkesParams::with_values(grid, bump.f.clone(), rho, seed)?;
    let run = simulate(params, cfg.t_end, cfg.snapshot_dt)?;
    let trace = phase_trace(&run, bump, cfg.trace)?;
    let proximity = proximity_report(&run, bump, cfg.trace.burn_in);
    let qv_rate = quadratic_variation_rate(&run, &trace)?;
    Ok(ReplicaSummary { trace, proximity, qv_rate, events: run.state.total_events() })
}

pub fn solve_bump(kappa: f64, rho_threshold: f64) -> Result<BumpSolution, AnalysisError> {
    let f = FiringFunction::sigmoid(kappa, rho_threshold).map_err(|e| AnalysisError::InsufficientData(e.to_string()))?;
    solve_amplitude(&f, Branch::Largest).map_err(|e| AnalysisError::InsufficientData(e.to_string()))
}

/// Simulates `n_replicas` networks, traces their phases and estimates the
/// diffusion coefficient.
pub fn phase_diffusion(cfg: &DiffusionConfig) -> Result<DiffusionReport, AnalysisError> {
    let bump = solve_bump(cfg.kappa, cfg.rho_threshold)?;
    let replicas = replica_sweep(cfg.base_seed, cfg.n_replicas, cfg.parallelism, |seed, _| run_replica(cfg, &bump, seed))?;
    let traces: Vec<PhaseTrace> = replicas.successes().map(|(_, s)| s.trace.clone()).collect();
    let estimate = estimate_sigma(&traces)?;
    let rates: Vec<f64> = replicas.successes().map(|(_, s)| s.qv_rate).collect();
    let qv_as_written = QvCheck::new(&rates, &estimate);
    let qv_corrected = qv_as_written.rescaled(bump.amplitude * bump.amplitude);
    Ok(DiffusionReport { bump, estimate, replicas, qv_as_written, qv_corrected })
}
