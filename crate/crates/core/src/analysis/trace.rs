use std::f64::consts::PI;

use crate::hawkes::SimulationRun;
use crate::model::{wrap_angle, RingFunction};
use crate::nfe::{isochronal_phase, manifold_distance, variational_phase, InitialCondition};
use crate::stationary::BumpSolution;

use super::AnalysisError;

/// Fraction of invalid samples above which a trace is rejected.
const MAX_INVALID: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceMode {
    #[default]
    Variational,
    Isochronal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub mode: TraceMode,
    /// `C` in the burn-in time `C log N`.
    pub burn_in: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { mode: TraceMode::Variational, burn_in: 5.0 }
    }
}

/// `C log N`, in microscopic time.
pub fn burn_in_time(n: usize, c: f64) -> f64 {
    c * (n as f64).ln()
}

/// Phase of a run on the slow time scale `tau = t / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrace {
    pub times: Vec<f64>,
    /// Phases in `(-pi, pi]`.
    pub raw: Vec<f64>,
    pub phases_unwrapped: Vec<f64>,
    pub valid: Vec<bool>,
}

impl PhaseTrace {
    /// Builds a trace from phases already lifted to the line.
    pub fn from_lifted(times: Vec<f64>, lifted: Vec<f64>) -> Self {
        let raw = lifted.iter().map(|&x| wrap_angle(x)).collect();
        let valid = vec![true; times.len()];
        Self { times, raw, phases_unwrapped: lifted, valid }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn invalid_count(&self) -> usize {
        self.valid.iter().filter(|v| !**v).count()
    }

    /// `(tau, theta)` of the valid samples.
    pub fn valid_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).filter(|&k| self.valid[k]).map(|k| (self.times[k], self.phases_unwrapped[k]))
    }

    /// Macroscopic time covered by the valid samples.
    pub fn span(&self) -> Option<(f64, f64)> {
        let mut it = self.valid_points();
        let first = it.next()?;
        let last = it.last().unwrap_or(first);
        Some((first.0, last.0))
    }

    /// Unwrapped phase at `tau`, linearly interpolated between valid samples.
    pub fn at(&self, tau: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self.valid_points().collect();
        interpolate(&pts, tau)
    }

    /// The same trace multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self::from_lifted(self.times.clone(), self.phases_unwrapped.iter().map(|x| c * x).collect())
            .with_validity(self.valid.clone())
    }

    fn with_validity(mut self, valid: Vec<bool>) -> Self {
        self.valid = valid;
        self
    }
}

pub(crate) fn interpolate(pts: &[(f64, f64)], tau: f64) -> Option<f64> {
    let (first, last) = (pts.first()?, pts.last()?);
    let eps = 1e-9 * last.0.abs().max(1.0);
    if tau < first.0 - eps || tau > last.0 + eps {
        return None;
    }
    let k = pts.partition_point(|p| p.0 <= tau);
    if k == 0 {
        return Some(first.1);
    }
    if k == pts.len() {
        return Some(last.1);
    }
    let (a, b) = (pts[k - 1], pts[k]);
    Some(a.1 + (b.1 - a.1) * (tau - a.0) / (b.0 - a.0))
}

/// Lifts phases in `(-pi, pi]` to the line, each step taken as the
/// representative of the jump in `(-pi, pi]`. `None` entries are skipped and
/// reported as the previous lift.
pub fn unwrap_phases(raw: &[Option<f64>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    let mut prev: Option<(f64, f64)> = None;
    for r in raw {
        let lift = match (r, prev) {
            (Some(x), None) => *x,
            (Some(x), Some((lx, px))) => {
                let turns = ((lx + wrap_angle(x - px) - x) / (2.0 * PI)).round();
                x + 2.0 * PI * turns
            }
            (None, Some((lx, _))) => lx,
            (None, None) => f64::NAN,
        };
        if let Some(x) = r {
            prev = Some((lift, *x));
        }
        out.push(lift);
    }
    // leading invalid samples take the first valid lift
    if let Some(first) = out.iter().copied().find(|x| !x.is_nan()) {
        for x in out.iter_mut().take_while(|x| x.is_nan()) {
            *x = first;
        }
    }
    out
}

fn phase_of<P>(profile: &P, bump: &BumpSolution, mode: TraceMode) -> Option<f64>
where
    P: RingFunction + Clone + Into<InitialCondition>,
{
    match mode {
        TraceMode::Variational => variational_phase(profile, bump).ok(),
        TraceMode::Isochronal => {
            if variational_phase(profile, bump).is_err() {
                return None;
            }
            isochronal_phase(profile.clone(), bump).ok().filter(|r| r.converged).map(|r| r.theta)
        }
    }
}

/// Trace of a sequence of `(t, profile)` pairs for a network of size `n`,
/// dropping samples before the burn-in time.
pub fn trace_profiles<P, I>(n: usize, samples: I, bump: &BumpSolution, opts: TraceOptions) -> Result<PhaseTrace, AnalysisError>
where
    P: RingFunction + Clone + Into<InitialCondition>,
    I: IntoIterator<Item = (f64, P)>,
{
    let t0 = burn_in_time(n, opts.burn_in);
    let nf = n as f64;
    let mut times = Vec::new();
    let mut phases = Vec::new();
    for (t, profile) in samples {
        if t < t0 {
            continue;
        }
        times.push(t / nf);
        phases.push(phase_of(&profile, bump, opts.mode).map(wrap_angle));
    }
    if times.is_empty() {
        return Err(AnalysisError::InsufficientData(format!("no samples after burn-in time {t0}")));
    }
    let invalid = phases.iter().filter(|p| p.is_none()).count();
    if invalid as f64 > MAX_INVALID * times.len() as f64 {
        return Err(AnalysisError::TraceUnreliable { invalid, total: times.len() });
    }
    let phases_unwrapped = unwrap_phases(&phases);
    let raw = phases.iter().zip(&phases_unwrapped).map(|(p, l)| p.unwrap_or_else(|| wrap_angle(*l))).collect();
    let valid = phases.iter().map(Option::is_some).collect();
    Ok(PhaseTrace { times, raw, phases_unwrapped, valid })
}

/// Phase trace of the snapshots of a completed run.
pub fn phase_trace(run: &SimulationRun, bump: &BumpSolution, opts: TraceOptions) -> Result<PhaseTrace, AnalysisError> {
    let params = run.params();
    let samples = run.snapshots.iter().map(|s| (s.t, params.profile_at(s)));
    trace_profiles(run.n(), samples, bump, opts)
}

/// Largest distance to the bump circle after burn-in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProximityReport {
    pub sup_dist: f64,
    /// Microscopic time window `[T0, t_end]`.
    pub window: (f64, f64),
    pub samples: usize,
}

pub fn proximity_report(run: &SimulationRun, bump: &BumpSolution, burn_in: f64) -> ProximityReport {
    let t0 = burn_in_time(run.n(), burn_in);
    let params = run.params();
    let mut sup_dist = 0.0f64;
    let mut samples = 0;
    let mut t_end = t0;
    for s in run.snapshots.iter().filter(|s| s.t >= t0) {
        sup_dist = sup_dist.max(manifold_distance(&params.profile_at(s), bump));
        samples += 1;
        t_end = s.t;
    }
    ProximityReport { sup_dist, window: (t0, t_end), samples }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hawkes::{simulate, HawkesParams, InitialProfile};
    use crate::model::{Field, RingGrid};
    use crate::stationary::{solve_amplitude, Branch};
    use crate::FiringFunction;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bump() -> BumpSolution {
        solve_amplitude(&FiringFunction::sigmoid(0.05, 0.5).unwrap(), Branch::Largest).unwrap()
    }

    #[test]
    fn constant_snapshots_give_a_constant_trace() {
        let b = bump();
        let u = Field::cosine(b.m, b.amplitude, 0.3).unwrap();
        let samples = (0..50).map(|k| (k as f64, u.clone()));
        let tr = trace_profiles(10, samples, &b, TraceOptions::default()).unwrap();
        assert_eq!(tr.len(), 50 - 12);
        for p in &tr.phases_unwrapped {
            assert!((p - 0.3).abs() < 1e-10);
        }
    }

    #[test]
    fn crossing_walk_is_lifted() {
        let b = bump();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut lift = vec![3.0];
        for _ in 0..200 {
            let last = *lift.last().unwrap();
            lift.push(last + rng.random_range(-0.4..0.6));
        }
        assert!(*lift.last().unwrap() > 2.0 * PI);
        let samples = lift.iter().enumerate().map(|(k, &phi)| (k as f64, Field::cosine(b.m, b.amplitude, phi).unwrap()));
        let opts = TraceOptions { burn_in: 0.0, ..Default::default() };
        let tr = trace_profiles(7, samples, &b, opts).unwrap();
        for (got, want) in tr.phases_unwrapped.iter().zip(&lift) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn far_samples_are_invalid() {
        let b = bump();
        let u = Field::cosine(b.m, b.amplitude, 0.3).unwrap();
        let zero = Field::zeros(b.m).unwrap();
        let samples: Vec<(f64, Field)> = (0..20).map(|k| (k as f64, if k == 4 { zero.clone() } else { u.clone() })).collect();
        let opts = TraceOptions { burn_in: 0.0, ..Default::default() };
        let tr = trace_profiles(3, samples.clone(), &b, opts).unwrap();
        assert_eq!(tr.invalid_count(), 1);
        assert!((tr.phases_unwrapped[4] - 0.3).abs() < 1e-10);
        let bad: Vec<(f64, Field)> = samples.into_iter().enumerate().map(|(k, (t, u))| (t, if k % 4 == 0 { zero.clone() } else { u })).collect();
        assert!(matches!(trace_profiles(3, bad, &b, opts), Err(AnalysisError::TraceUnreliable { .. })));
    }

    #[test]
    fn isochronal_mode_matches_on_the_manifold() {
        let b = bump();
        let u = Field::cosine(b.m, b.amplitude, -1.2).unwrap();
        let opts = TraceOptions { mode: TraceMode::Isochronal, burn_in: 0.0 };
        let tr = trace_profiles(3, vec![(0.0, u)], &b, opts).unwrap();
        assert!((tr.phases_unwrapped[0] + 1.2).abs() < 1e-8);
    }

    #[test]
    fn network_run_trace_and_proximity() {
        let b = bump();
        let grid = RingGrid::new(200).unwrap();
        let rho = InitialProfile::Bump.values(&grid, b.amplitude).unwrap();
        let params = HawkesParams::with_values(grid, b.f.clone(), rho, 3).unwrap();
        let run = simulate(params, 60.0, 0.5).unwrap();
        let tr = phase_trace(&run, &b, TraceOptions::default()).unwrap();
        assert_eq!(tr.invalid_count(), 0);
        assert!((tr.times[0] - burn_in_time(200, 5.0) / 200.0).abs() < 0.5 / 200.0 + 1e-12);
        let rep = proximity_report(&run, &b, 5.0);
        assert!(rep.sup_dist > 0.0 && rep.sup_dist < 1.0, "{rep:?}");
        assert_eq!(rep.window.1, 60.0);
    }

    #[test]
    fn interpolation_is_linear() {
        let pts = [(0.0, 0.0), (1.0, 2.0), (3.0, 0.0)];
        assert_eq!(interpolate(&pts, 0.5), Some(1.0));
        assert_eq!(interpolate(&pts, 2.0), Some(1.0));
        assert_eq!(interpolate(&pts, 3.0), Some(0.0));
        assert_eq!(interpolate(&pts, 3.5), None);
    }

    proptest! {
        #[test]
        fn unwrap_inverts_wrap(start in -10.0f64..10.0, steps in prop::collection::vec(-3.1f64..3.1, 1..200)) {
            let mut lift = vec![start];
            for s in steps {
                let l = *lift.last().unwrap() + s;
                lift.push(l);
            }
            let raw: Vec<Option<f64>> = lift.iter().map(|&x| Some(wrap_angle(x))).collect();
            let got = unwrap_phases(&raw);
            let shift = got[0] - lift[0];
            prop_assert!((shift / (2.0 * PI) - (shift / (2.0 * PI)).round()).abs() < 1e-9);
            for ((g, l), r) in got.iter().zip(&lift).zip(&raw) {
                prop_assert!((g - l - shift).abs() < 1e-9);
                prop_assert!(wrap_angle(g - r.unwrap()).abs() < 1e-12);
            }
        }
    }
}
