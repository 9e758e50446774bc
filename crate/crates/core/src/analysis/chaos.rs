use crate::hawkes::{simulate, HawkesParams, InitialProfile};
use crate::model::{Field, RingGrid};
use crate::nfe::{FlowState, DEFAULT_DT};
use crate::stationary::BumpSolution;

use super::diffusion::loglog_slope;
use super::sweep::{replica_sweep, solve_bump};
use super::AnalysisError;

/// Mean-field solution `u_t = e^{-t} rho + a cos + b sin` tabulated at
/// `t = k dt`.
#[derive(Debug, Clone)]
pub struct MeanFieldReference {
    pub profile: InitialProfile,
    pub amplitude: f64,
    pub dt: f64,
    /// `(t, a, b)`.
    pub table: Vec<(f64, f64, f64)>,
}

impl MeanFieldReference {
    pub fn new(bump: &BumpSolution, profile: InitialProfile, t_max: f64, dt: f64) -> Result<Self, AnalysisError> {
        if matches!(profile, InitialProfile::Values(_)) {
            return Err(AnalysisError::InsufficientData("mean-field reference needs a named profile".into()));
        }
        let a0 = bump.amplitude;
        let rho = Field::from_fn(bump.m, |x| profile.eval(x, a0)).map_err(crate::nfe::NfeError::from)?;
        let mut state = FlowState::new(rho);
        let mut table = Vec::new();
        state.advance_observed(&bump.f, t_max, DEFAULT_DT, dt, |s| table.push((s.t, s.a, s.b)))?;
        Ok(Self { profile, amplitude: a0, dt, table })
    }

    pub fn t_max(&self) -> f64 {
        self.table.last().map_or(0.0, |r| r.0)
    }

    pub fn eval(&self, k: usize, x: f64) -> f64 {
        let (t, a, b) = self.table[k];
        (-t).exp() * self.profile.eval(x, self.amplitude) + a * x.cos() + b * x.sin()
    }
}

/// `sup_{t <= t_max} ||U_N(t) - u_t||_2` for one seeded network.
pub fn mean_field_error(n: usize, bump: &BumpSolution, reference: &MeanFieldReference, seed: u64) -> Result<f64, AnalysisError> {
    let grid = RingGrid::new(n).map_err(crate::hawkes::HawkesError::from)?;
    let rho = reference.profile.values(&grid, reference.amplitude)?;
    let params = HawkesParams::with_values(grid, bump.f.clone(), rho, seed)?;
    let run = simulate(params, reference.t_max(), reference.dt)?;
    let mut sup = 0.0f64;
    for (k, s) in run.snapshots.iter().enumerate().take(reference.table.len()) {
        debug_assert!((s.t - reference.table[k].0).abs() < 1e-9);
        let d = run.params().profile_at(s).l2_distance_to(|x| reference.eval(k, x));
        sup = sup.max(d);
    }
    Ok(sup)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaosConfig {
    pub ns: Vec<usize>,
    pub seeds: usize,
    pub base_seed: u64,
    pub t_max: f64,
    pub snapshot_dt: f64,
    pub kappa: f64,
    pub rho_threshold: f64,
    pub profile: InitialProfile,
    pub parallelism: usize,
}

impl Default for ChaosConfig {
    fn default() -> Self {
        Self {
            ns: vec![125, 250, 500, 1000],
            seeds: 20,
            base_seed: 1,
            t_max: 10.0,
            snapshot_dt: 0.1,
            kappa: 0.05,
            rho_threshold: 0.5,
            profile: InitialProfile::Bump,
            parallelism: std::thread::available_parallelism().map_or(1, |p| p.get()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaosRow {
    pub n: usize,
    pub median: f64,
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaosScaling {
    pub rows: Vec<ChaosRow>,
    /// Slope of `log median` against `log N`.
    pub slope: f64,
}

/// Median, averaging the two middle values for even lengths.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Median finite-horizon error against the mean field for each `N`.
pub fn chaos_scaling(cfg: &ChaosConfig) -> Result<ChaosScaling, AnalysisError> {
    let bump = solve_bump(cfg.kappa, cfg.rho_threshold)?;
    let reference = MeanFieldReference::new(&bump, cfg.profile.clone(), cfg.t_max, cfg.snapshot_dt)?;
    let mut rows = Vec::new();
    for &n in &cfg.ns {
        let sweep = replica_sweep(cfg.base_seed, cfg.seeds, cfg.parallelism, |seed, _| mean_field_error(n, &bump, &reference, seed))?;
        let errors: Vec<f64> = sweep.successes().map(|(_, e)| *e).collect();
        rows.push(ChaosRow { n, median: median(&errors), errors });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.median).collect();
    let slope = if rows.len() >= 2 { loglog_slope(&x, &y) } else { f64::NAN };
    Ok(ChaosScaling { rows, slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn bump_reference_is_stationary() {
        let bump = solve_bump(0.05, 0.5).unwrap();
        let r = MeanFieldReference::new(&bump, InitialProfile::Bump, 2.0, 0.5).unwrap();
        assert_eq!(r.table.len(), 5);
        for k in 0..r.table.len() {
            for x in [-2.0, 0.1, 1.3] {
                assert!((r.eval(k, x) - bump.amplitude * f64::cos(x)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn error_is_small_and_shrinks_with_n() {
        let bump = solve_bump(0.05, 0.5).unwrap();
        let r = MeanFieldReference::new(&bump, InitialProfile::Bump, 2.0, 0.1).unwrap();
        let small: Vec<f64> = (0..5).map(|s| mean_field_error(50, &bump, &r, s).unwrap()).collect();
        let large: Vec<f64> = (0..5).map(|s| mean_field_error(800, &bump, &r, s).unwrap()).collect();
        assert!(median(&large) < median(&small));
        assert!(median(&large) < 0.5);
    }
}
