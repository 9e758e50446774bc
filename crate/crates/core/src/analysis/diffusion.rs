use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hawkes::SimulationRun;

use super::trace::{interpolate, PhaseTrace};
use super::AnalysisError;

pub const BOOTSTRAP_RESAMPLES: usize = 200;
pub const BOOTSTRAP_SEED: u64 = 0x5eed_b007;
/// Window widths are `D / 2^k` for these `k`.
const WIDTH_LEVELS: [u32; 4] = [1, 2, 3, 4];
const DRIFT_REJECT: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionEstimate {
    pub sigma_hat: f64,
    pub stderr: f64,
    pub n_replicas: usize,
    pub r2_linearity: f64,
    pub slope: f64,
    pub intercept: f64,
    pub widths: Vec<f64>,
    pub variances: Vec<f64>,
    /// t statistic of the mean of the finest increments.
    pub drift_t: f64,
    pub drift_rejected: bool,
    pub duration: f64,
}

/// Increments of one trace over disjoint windows of width `w` starting at
/// its first valid sample.
fn increments(pts: &[(f64, f64)], start: f64, w: f64, count: usize) -> Vec<f64> {
    (0..count)
        .filter_map(|k| {
            let a = interpolate(pts, start + k as f64 * w)?;
            let b = interpolate(pts, start + (k + 1) as f64 * w)?;
            Some(b - a)
        })
        .collect()
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = if xs.len() > 1 { xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (m, v)
}

/// Ordinary least squares `y = a + b x`, returning `(a, b, r2)`.
fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (my - slope * mx, slope, r2)
}

/// Slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    ols(&lx, &ly).1
}

struct Prepared {
    /// `incs[r][w]`: increments of replica `r` at width level `w`.
    incs: Vec<Vec<Vec<f64>>>,
    widths: Vec<f64>,
    duration: f64,
}

fn prepare(traces: &[PhaseTrace]) -> Result<Prepared, AnalysisError> {
    if traces.len() < 2 {
        return Err(AnalysisError::InsufficientData(format!("{} traces, need at least 2", traces.len())));
    }
    let mut spans = Vec::with_capacity(traces.len());
    for (r, tr) in traces.iter().enumerate() {
        match tr.span() {
            Some((a, b)) if b > a => spans.push((a, b)),
            _ => return Err(AnalysisError::InsufficientData(format!("trace {r} has no extent"))),
        }
    }
    let duration = spans.iter().map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
    let widths: Vec<f64> = WIDTH_LEVELS.iter().map(|&k| duration / 2f64.powi(k as i32)).collect();
    let incs = traces
        .iter()
        .zip(&spans)
        .map(|(tr, (start, _))| {
            let pts: Vec<(f64, f64)> = tr.valid_points().collect();
            WIDTH_LEVELS.iter().zip(&widths).map(|(&k, &w)| increments(&pts, *start, w, 1 << k)).collect()
        })
        .collect();
    Ok(Prepared { incs, widths, duration })
}

/// `(slope, intercept, r2, variances)` for the replicas listed in `pick`.
fn regress(p: &Prepared, pick: &[usize]) -> (f64, f64, f64, Vec<f64>) {
    let variances: Vec<f64> = (0..p.widths.len())
        .map(|w| {
            let pooled: Vec<f64> = pick.iter().flat_map(|&r| p.incs[r][w].iter().copied()).collect();
            mean_var(&pooled).1
        })
        .collect();
    let (a, b, r2) = ols(&p.widths, &variances);
    (b, a, r2, variances)
}

fn sigma_of(slope: f64) -> f64 {
    slope.max(0.0).sqrt()
}

/// Diffusion coefficient from the growth of increment variance with window
/// width, pooled over replicas.
pub fn estimate_sigma(traces: &[PhaseTrace]) -> Result<DiffusionEstimate, AnalysisError> {
    let p = prepare(traces)?;
    let all: Vec<usize> = (0..traces.len()).collect();
    let (slope, intercept, r2, variances) = regress(&p, &all);
    let sigma_hat = sigma_of(slope);

    let mut rng = ChaCha8Rng::seed_from_u64(BOOTSTRAP_SEED);
    let n = traces.len();
    let boot: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let pick: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            sigma_of(regress(&p, &pick).0)
        })
        .collect();
    let stderr = mean_var(&boot).1.sqrt();

    let finest = p.widths.len() - 1;
    let pooled: Vec<f64> = p.incs.iter().flat_map(|r| r[finest].iter().copied()).collect();
    let (m, v) = mean_var(&pooled);
    let sd = v.sqrt();
    let drift_t = if sd > 0.0 {
        m / (sd / (pooled.len() as f64).sqrt())
    } else if m != 0.0 {
        m.signum() * f64::INFINITY
    } else {
        0.0
    };

    Ok(DiffusionEstimate {
        sigma_hat,
        stderr,
        n_replicas: n,
        r2_linearity: r2,
        slope,
        intercept,
        widths: p.widths,
        variances,
        drift_t,
        drift_rejected: drift_t.abs() > DRIFT_REJECT,
        duration: p.duration,
    })
}

/// Brownian path `drift * tau + sigma * W(tau)` sampled at `steps + 1`
/// points of `[0, tau_f]`.
pub fn synthetic_trace(sigma: f64, drift: f64, tau_f: f64, steps: usize, seed: u64) -> PhaseTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dt = tau_f / steps as f64;
    let mut x = 0.0;
    let mut times = vec![0.0];
    let mut lift = vec![0.0];
    for k in 1..=steps {
        let z: f64 = rng.sample(StandardNormal);
        x += drift * dt + sigma * dt.sqrt() * z;
        times.push(k as f64 * dt);
        lift.push(x);
    }
    PhaseTrace::from_lifted(times, lift)
}

/// Predictable quadratic variation rate of the phase over the trace window,
/// `sum_events 4 pi^2 sin^2(x_j + theta) / N^2` divided by the window length
/// in slow time.
pub fn quadratic_variation_rate(run: &SimulationRun, trace: &PhaseTrace) -> Result<f64, AnalysisError> {
    let (a, b) = trace.span().ok_or_else(|| AnalysisError::InsufficientData("empty trace".into()))?;
    if b <= a {
        return Err(AnalysisError::InsufficientData("trace has no extent".into()));
    }
    let n = run.n();
    let nf = n as f64;
    let pts: Vec<(f64, f64)> = trace.valid_points().collect();
    let grid = &run.params().grid;
    let mut acc = 0.0;
    for e in run.state.events() {
        let tau = e.time / nf;
        if tau < a || tau > b {
            continue;
        }
        let theta = interpolate(&pts, tau).expect("inside span");
        let s = (grid.position(e.neuron) + theta).sin();
        acc += 4.0 * PI * PI * s * s;
    }
    Ok(acc / (nf * nf) / (b - a))
}

/// Per-replica quadratic variation rates compared with `sigma_hat^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QvCheck {
    pub mean: f64,
    pub stderr: f64,
    pub sigma_sq: f64,
    pub sigma_sq_stderr: f64,
}

impl QvCheck {
    pub fn new(rates: &[f64], est: &DiffusionEstimate) -> Self {
        let (mean, var) = mean_var(rates);
        Self {
            mean,
            stderr: (var / rates.len() as f64).sqrt(),
            sigma_sq: est.sigma_hat * est.sigma_hat,
            sigma_sq_stderr: 2.0 * est.sigma_hat * est.stderr,
        }
    }

    /// The same check with every rate divided by `c`.
    pub fn rescaled(&self, c: f64) -> Self {
        Self { mean: self.mean / c, stderr: self.stderr / c, ..*self }
    }

    pub fn combined_stderr(&self) -> f64 {
        self.stderr.hypot(self.sigma_sq_stderr)
    }

    /// Difference in units of the combined standard error.
    pub fn z(&self) -> f64 {
        (self.mean - self.sigma_sq) / self.combined_stderr()
    }

    pub fn agrees(&self, k: f64) -> bool {
        self.z().abs() <= k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brownian(sigma: f64, drift: f64, n: usize, seed: u64) -> Vec<PhaseTrace> {
        (0..n).map(|r| synthetic_trace(sigma, drift, 1.0, 512, seed + r as u64)).collect()
    }

    #[test]
    fn recovers_sigma() {
        let est = estimate_sigma(&brownian(2.0, 0.0, 100, 0)).unwrap();
        assert!((1.8..=2.2).contains(&est.sigma_hat), "{est:?}");
        assert!(est.r2_linearity > 0.9);
        assert!(!est.drift_rejected);
        assert_eq!(est.n_replicas, 100);
    }

    #[test]
    fn constant_traces_give_zero() {
        let tr: Vec<PhaseTrace> = (0..5).map(|_| PhaseTrace::from_lifted(vec![0.0, 0.5, 1.0], vec![1.0; 3])).collect();
        let est = estimate_sigma(&tr).unwrap();
        assert_eq!(est.sigma_hat, 0.0);
        assert_eq!(est.stderr, 0.0);
        assert!(!est.drift_rejected);
    }

    #[test]
    fn drift_is_detected() {
        let est = estimate_sigma(&brownian(0.0, 1.0, 10, 0)).unwrap();
        assert!(est.drift_rejected);
        assert_eq!(est.sigma_hat, 0.0);
    }

    #[test]
    fn needs_two_traces() {
        assert!(matches!(estimate_sigma(&brownian(1.0, 0.0, 1, 0)), Err(AnalysisError::InsufficientData(_))));
    }

    #[test]
    fn scaling_is_linear() {
        let tr = brownian(1.3, 0.0, 20, 7);
        let base = estimate_sigma(&tr).unwrap().sigma_hat;
        for c in [0.5, 3.0] {
            let scaled: Vec<PhaseTrace> = tr.iter().map(|t| t.scaled(c)).collect();
            let got = estimate_sigma(&scaled).unwrap().sigma_hat;
            assert!((got - c * base).abs() < 1e-12 * c * base, "{got} vs {}", c * base);
        }
    }

    #[test]
    fn stderr_shrinks_with_replicas() {
        let small = estimate_sigma(&brownian(2.0, 0.0, 25, 100)).unwrap().stderr;
        let large = estimate_sigma(&brownian(2.0, 0.0, 400, 100)).unwrap().stderr;
        let ratio = small / large;
        assert!((2.5..6.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn loglog_slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-0.5)).collect();
        assert!((loglog_slope(&x, &y) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn qv_check_arithmetic() {
        let est = estimate_sigma(&brownian(1.0, 0.0, 50, 3)).unwrap();
        let q = QvCheck::new(&[1.0, 1.0, 1.0], &est);
        assert_eq!(q.stderr, 0.0);
        assert!((q.combined_stderr() - 2.0 * est.sigma_hat * est.stderr).abs() < 1e-12);
        assert_eq!(q.rescaled(2.0).mean, 0.5);
    }
}
