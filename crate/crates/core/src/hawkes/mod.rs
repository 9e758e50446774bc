//! Exact event-driven simulation of the `N`-neuron Hawkes ring.
//!
//! Neuron `i` at position `x_i` spikes with intensity `f(U_i(t-))`, where
//!
//! ```text
//! U_i(t) = rho(x_i) e^{-t} + (2 pi / N) sum_j int_0^t e^{-(t-s)} cos(x_i - x_j) dZ_j(s).
//! ```
//!
//! Because the kernel is a single cosine mode the interaction part is
//! `cos(x_i) p(t) + sin(x_i) q(t)`, so a spike costs `O(1)`. Spikes are drawn
//! by thinning a Poisson stream of total rate `N sup f`.

mod log;

use std::f64::consts::PI;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

use crate::model::{BinProfile, FiringFunction, ModelError, RingGrid};

pub use log::{EventLog, SpikeEvent};

#[derive(Debug, Error)]
pub enum HawkesError {
    #[error("end time {t_end} is not after the current time {t}")]
    InvalidTime { t: f64, t_end: f64 },
    #[error("non-finite simulator state at t = {0}")]
    NumericalBlowup(f64),
    #[error("compensators were not tracked for this run")]
    CompensatorsNotTracked,
    #[error("initial profile has {got} values for {n} neurons")]
    ProfileSize { got: usize, n: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("event spill failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Named initial profiles, scaled by the bump amplitude `A`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// `A cos x`.
    Bump,
    /// `A cos x + cos 2x`.
    BumpPlusMode2,
    /// `(A / 4) cos x`.
    QuarterBump,
    Zero,
    /// Explicit per-neuron values.
    Values(Vec<f64>),
}

impl InitialProfile {
    pub fn eval(&self, x: f64, amplitude: f64) -> f64 {
        match self {
            Self::Bump => amplitude * x.cos(),
            Self::BumpPlusMode2 => amplitude * x.cos() + (2.0 * x).cos(),
            Self::QuarterBump => 0.25 * amplitude * x.cos(),
            Self::Zero => 0.0,
            Self::Values(_) => panic!("explicit profiles have no pointwise formula"),
        }
    }

    /// Values at the grid positions.
    pub fn values(&self, grid: &RingGrid, amplitude: f64) -> Result<Vec<f64>, HawkesError> {
        match self {
            Self::Values(v) if v.len() == grid.n() => Ok(v.clone()),
            Self::Values(v) => Err(HawkesError::ProfileSize { got: v.len(), n: grid.n() }),
            _ => Ok(grid.positions().iter().map(|&x| self.eval(x, amplitude)).collect()),
        }
    }
}

/// Network size, nonlinearity, initial voltages and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct HawkesParams {
    pub grid: RingGrid,
    pub f: FiringFunction,
    /// `rho(x_i)`.
    pub rho: Vec<f64>,
    pub seed: u64,
}

impl HawkesParams {
    pub fn new(grid: RingGrid, f: FiringFunction, rho: impl Fn(f64) -> f64, seed: u64) -> Self {
        let rho = grid.positions().iter().map(|&x| rho(x)).collect();
        Self { grid, f, rho, seed }
    }

    pub fn with_values(grid: RingGrid, f: FiringFunction, rho: Vec<f64>, seed: u64) -> Result<Self, HawkesError> {
        if rho.len() != grid.n() {
            return Err(HawkesError::ProfileSize { got: rho.len(), n: grid.n() });
        }
        Ok(Self { grid, f, rho, seed })
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// Voltage of every neuron for the accumulator values of a snapshot.
    pub fn voltages_at(&self, s: &Snapshot) -> Vec<f64> {
        let decay = (-s.t).exp();
        self.grid
            .positions()
            .iter()
            .zip(&self.rho)
            .map(|(x, r)| r * decay + x.cos() * s.p + x.sin() * s.q)
            .collect()
    }

    pub fn profile_at(&self, s: &Snapshot) -> BinProfile {
        BinProfile::new(self.voltages_at(s)).expect("grid is non-empty")
    }
}

/// `(2 pi / N) cos(x_i - x_j)`, the kick to neuron `i` when `j` spikes.
pub fn jump_increment(grid: &RingGrid, i: usize, j: usize) -> f64 {
    2.0 * PI / grid.n() as f64 * (grid.position(i) - grid.position(j)).cos()
}

/// Accumulator values at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone)]
struct Compensators {
    integral: Vec<f64>,
    rate: Vec<f64>,
}

/// Simulator state. Owns its parameters and random stream.
#[derive(Debug, Clone)]
pub struct HawkesState {
    params: HawkesParams,
    pub t: f64,
    pub p: f64,
    pub q: f64,
    counts: Vec<u64>,
    log: EventLog,
    compensators: Option<Compensators>,
    cos: Vec<f64>,
    sin: Vec<f64>,
    rng: ChaCha8Rng,
    pending: Option<f64>,
    proposals: u64,
}

/// Fresh state at `t = 0` with `U_i(0) = rho(x_i)`.
pub fn init_state(params: HawkesParams) -> HawkesState {
    let n = params.n();
    let cos = params.grid.positions().iter().map(|x| x.cos()).collect();
    let sin = params.grid.positions().iter().map(|x| x.sin()).collect();
    let rng = ChaCha8Rng::seed_from_u64(params.seed);
    HawkesState {
        params,
        t: 0.0,
        p: 0.0,
        q: 0.0,
        counts: vec![0; n],
        log: EventLog::default(),
        compensators: None,
        cos,
        sin,
        rng,
        pending: None,
        proposals: 0,
    }
}

impl HawkesState {
    /// Accumulates `int_0^t f(U_i(s)) ds` for every neuron by the trapezoid
    /// rule between proposal times. Adds `O(N)` work per proposal.
    pub fn track_compensators(mut self) -> Self {
        let rate = (0..self.n()).map(|i| self.params.f.eval(self.voltage(i))).collect();
        self.compensators = Some(Compensators { integral: vec![0.0; self.n()], rate });
        self
    }

    /// Streams events to a CSV file whenever more than `cap` are held in
    /// memory.
    pub fn spill_events(mut self, cap: usize, path: impl Into<PathBuf>) -> Self {
        self.log = EventLog::with_spill(cap, path.into());
        self
    }

    pub fn params(&self) -> &HawkesParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn log_mut(&mut self) -> &mut EventLog {
        &mut self.log
    }

    /// In-memory events (all of them unless spilling is enabled).
    pub fn events(&self) -> &[SpikeEvent] {
        self.log.in_memory()
    }

    pub fn total_events(&self) -> usize {
        self.log.total()
    }

    pub fn proposals(&self) -> u64 {
        self.proposals
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot { t: self.t, p: self.p, q: self.q }
    }

    /// `U_i(t) = rho_i e^{-t} + cos(x_i) p + sin(x_i) q`.
    pub fn voltage(&self, i: usize) -> f64 {
        self.params.rho[i] * (-self.t).exp() + self.cos[i] * self.p + self.sin[i] * self.q
    }

    pub fn voltages(&self) -> Vec<f64> {
        let decay = (-self.t).exp();
        (0..self.n()).map(|i| self.params.rho[i] * decay + self.cos[i] * self.p + self.sin[i] * self.q).collect()
    }

    fn decay_to(&mut self, t: f64) {
        let k = (-(t - self.t)).exp();
        self.p *= k;
        self.q *= k;
        if let Some(c) = self.compensators.as_mut() {
            let gap = t - self.t;
            let decay = (-t).exp();
            for i in 0..c.rate.len() {
                let u = self.params.rho[i] * decay + self.cos[i] * self.p + self.sin[i] * self.q;
                let r = self.params.f.eval(u);
                c.integral[i] += 0.5 * gap * (c.rate[i] + r);
                c.rate[i] = r;
            }
        }
        self.t = t;
    }

    fn refresh_rates(&mut self) {
        if self.compensators.is_some() {
            let v = self.voltages();
            let f = self.params.f;
            let c = self.compensators.as_mut().expect("checked");
            for (r, u) in c.rate.iter_mut().zip(v) {
                *r = f.eval(u);
            }
        }
    }

    /// `Z_j(t) - int_0^t lambda_j(s) ds` for every neuron.
    pub fn martingale_residual(&self) -> Result<Vec<f64>, HawkesError> {
        let c = self.compensators.as_ref().ok_or(HawkesError::CompensatorsNotTracked)?;
        Ok(self.counts.iter().zip(&c.integral).map(|(&z, l)| z as f64 - l).collect())
    }

    /// `int_0^t lambda_j(s) ds` for every neuron.
    pub fn compensators(&self) -> Option<&[f64]> {
        self.compensators.as_ref().map(|c| c.integral.as_slice())
    }

    /// Piecewise-constant voltage profile `sum_i U_i(t) 1_{B_i}`.
    pub fn voltage_profile(&self) -> BinProfile {
        BinProfile::new(self.voltages()).expect("grid is non-empty")
    }

    /// Runs to `t_end`. The event stream does not depend on how a run is
    /// split into calls.
    pub fn simulate_until(&mut self, t_end: f64) -> Result<(), HawkesError> {
        self.run(t_end, None)
    }

    /// Runs to `t_end`, recording the accumulators at `t, t + dt, ...`.
    /// Snapshots do not consume randomness.
    pub fn simulate_with_snapshots(&mut self, t_end: f64, dt: f64) -> Result<Vec<Snapshot>, HawkesError> {
        let mut out = Vec::new();
        self.run(t_end, Some((dt, &mut out)))?;
        Ok(out)
    }

    fn run(&mut self, t_end: f64, mut snaps: Option<(f64, &mut Vec<Snapshot>)>) -> Result<(), HawkesError> {
        if !(t_end > self.t) {
            return Err(HawkesError::InvalidTime { t: self.t, t_end });
        }
        let n = self.n();
        let rate = n as f64 * self.params.f.sup();
        let gaps = if rate > 0.0 { Some(Exp::new(rate).expect("positive rate")) } else { None };
        let t0 = self.t;
        let mut k_snap = 0usize;
        loop {
            let next = match (self.pending, &gaps) {
                (Some(t), _) => t,
                (None, Some(exp)) => {
                    let t = self.t + exp.sample(&mut self.rng);
                    self.pending = Some(t);
                    t
                }
                (None, None) => f64::INFINITY,
            };
            if let Some((dt, out)) = snaps.as_mut() {
                loop {
                    let ts = t0 + k_snap as f64 * *dt;
                    if ts > t_end + 1e-12 * t_end.max(1.0) || ts >= next {
                        break;
                    }
                    let k = (-(ts - self.t)).exp();
                    out.push(Snapshot { t: ts, p: self.p * k, q: self.q * k });
                    k_snap += 1;
                }
            }
            if next > t_end {
                self.decay_to(t_end);
                break;
            }
            self.pending = None;
            self.decay_to(next);
            self.proposals += 1;
            let i = self.rng.random_range(0..n);
            let lambda = self.params.f.eval(self.voltage(i));
            let accept = self.rng.random::<f64>() * self.params.f.sup() < lambda;
            if accept {
                let w = 2.0 * PI / n as f64;
                self.p += w * self.cos[i];
                self.q += w * self.sin[i];
                self.counts[i] += 1;
                self.log.push(SpikeEvent { time: self.t, neuron: i })?;
                self.refresh_rates();
                if !(self.p.is_finite() && self.q.is_finite()) {
                    return Err(HawkesError::NumericalBlowup(self.t));
                }
            }
        }
        Ok(())
    }
}

/// Completed run with its snapshots.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub state: HawkesState,
    pub snapshots: Vec<Snapshot>,
}

impl SimulationRun {
    pub fn params(&self) -> &HawkesParams {
        self.state.params()
    }

    pub fn n(&self) -> usize {
        self.state.n()
    }

    /// Voltage profile at snapshot `k`.
    pub fn profile(&self, k: usize) -> BinProfile {
        self.params().profile_at(&self.snapshots[k])
    }
}

/// Runs a fresh state from `t = 0` to `t_end`, snapshotting every
/// `snapshot_dt`.
pub fn simulate(params: HawkesParams, t_end: f64, snapshot_dt: f64) -> Result<SimulationRun, HawkesError> {
    let mut state = init_state(params);
    let snapshots = state.simulate_with_snapshots(t_end, snapshot_dt)?;
    Ok(SimulationRun { state, snapshots })
}
