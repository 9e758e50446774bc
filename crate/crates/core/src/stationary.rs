//! Stationary bumps `u = A cos(. + phi)` of the neural field equation.
//!
//! A bump amplitude is a fixed point of `G(A) = int_S cos(y) f(A cos y) dy`.
//! The Heaviside case has closed forms; the sigmoid case is located by a
//! scan for sign changes of `G(A) - A` followed by bisection.

use std::f64::consts::PI;

use thiserror::Error;

use crate::model::{nodes, resolution_for_kappa, FiringFunction, ModelError, DEFAULT_RESOLUTION};

/// Number of equal subintervals in the bracketing scan.
pub const SCAN_INTERVALS: usize = 400;
/// Upper end of the scan; `|G(A)| <= int |cos| = 4` bounds every root.
pub const SCAN_UPPER: f64 = 4.0;
const SCAN_OFFSET: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StationaryError {
    #[error("threshold {0} outside [-1, 1]: only the zero solution exists")]
    NoNonzeroSolution(f64),
    #[error("no sign change of G(A) - A on the scan range for {0:?}")]
    NoFixedPoint(FiringFunction),
    #[error("spectral gap {0} outside (-1, 0): the branch is not linearly stable")]
    UnstableBranch(f64),
    #[error("unsupported firing function for this operation: {0:?}")]
    Unsupported(FiringFunction),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Largest,
    Smallest,
}

/// A stationary amplitude together with the constants derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSolution {
    pub amplitude: f64,
    pub f: FiringFunction,
    /// `|G(A) - A|`.
    pub residual: f64,
    /// `I(1) = int_S f'(A cos x) dx`.
    pub i1: f64,
    /// `I(1) - 2`, the nonzero eigenvalue of the linearisation.
    pub gamma: f64,
    /// `(2 pi int_S sin^2(x) f(A cos x) dx)^(1/2)`.
    pub sigma: f64,
    /// Quadrature resolution used for every integral of this bump.
    pub m: usize,
}

/// `A = 0`, `A_-(0) = sqrt(1+rho) - sqrt(1-rho)` and `A_+(0) = sqrt(1+rho) + sqrt(1-rho)`.
pub fn heaviside_fixed_points(rho: f64) -> Result<(f64, f64, f64), StationaryError> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(StationaryError::NoNonzeroSolution(rho));
    }
    let (p, m) = ((1.0 + rho).sqrt(), (1.0 - rho).sqrt());
    Ok((0.0, p - m, p + m))
}

/// `G(A)` on an `m`-point rule; closed form for the Heaviside step.
pub fn fixed_point_map(f: &FiringFunction, a: f64, m: usize) -> f64 {
    if let FiringFunction::Heaviside { rho } = *f {
        return heaviside_g(rho, a);
    }
    let h = 2.0 * PI / m as f64;
    h * nodes(m).iter().map(|y| y.cos() * f.eval(a * y.cos())).sum::<f64>()
}

fn heaviside_g(rho: f64, a: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let r = rho / a;
    if r > 1.0 {
        0.0
    } else if r < -1.0 {
        // f == 1 everywhere
        0.0
    } else {
        2.0 * (1.0 - r * r).sqrt()
    }
}

/// Every root of `G(A) = A` found on the scan range `(1e-6, 4]`, in
/// increasing order. For a sigmoid the smaller root can sit below `|rho|`
/// (about 0.447 at `kappa = 0.1`, `rho = 0.5`), so the scan starts near 0.
pub fn fixed_points(f: &FiringFunction, m: usize) -> Vec<f64> {
    let lo = SCAN_OFFSET;
    let step = (SCAN_UPPER - lo) / SCAN_INTERVALS as f64;
    let h = |a: f64| fixed_point_map(f, a, m) - a;
    let mut roots = Vec::new();
    let mut a_prev = lo;
    let mut h_prev = h(lo);
    if h_prev == 0.0 {
        roots.push(lo);
    }
    for k in 1..=SCAN_INTERVALS {
        let a = lo + k as f64 * step;
        let hv = h(a);
        if hv == 0.0 {
            roots.push(a);
        } else if h_prev != 0.0 && (h_prev < 0.0) != (hv < 0.0) {
            roots.push(bisect(&h, a_prev, a, h_prev));
        }
        a_prev = a;
        h_prev = hv;
    }
    roots
}

fn bisect(h: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut h_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let hm = h(mid);
        if hm == 0.0 {
            return mid;
        }
        if (hm < 0.0) == (h_lo < 0.0) {
            lo = mid;
            h_lo = hm;
        } else {
            hi = mid;
        }
    }
    if h(lo).abs() <= h(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Solves `G(A) = A` for the requested root and fills in `I(1)`, `gamma` and
/// `sigma`. The quadrature resolution follows [`resolution_for_kappa`].
pub fn solve_amplitude(f: &FiringFunction, branch: Branch) -> Result<BumpSolution, StationaryError> {
    let m = match f.kappa() {
        Some(kappa) => resolution_for_kappa(kappa),
        None => DEFAULT_RESOLUTION,
    };
    solve_amplitude_with_resolution(f, branch, m)
}

pub fn solve_amplitude_with_resolution(
    f: &FiringFunction,
    branch: Branch,
    m: usize,
) -> Result<BumpSolution, StationaryError> {
    match *f {
        FiringFunction::Heaviside { rho } => {
            let (_, minus, plus) = heaviside_fixed_points(rho)?;
            let a = match branch {
                Branch::Largest => plus,
                Branch::Smallest => minus,
            };
            if a <= 0.0 {
                return Err(StationaryError::NoFixedPoint(*f));
            }
            Ok(BumpSolution::at_amplitude(*f, a, m))
        }
        FiringFunction::Sigmoid { .. } => {
            let roots = fixed_points(f, m);
            let a = match branch {
                Branch::Largest => roots.last(),
                Branch::Smallest => roots.first(),
            }
            .copied()
            .ok_or(StationaryError::NoFixedPoint(*f))?;
            let sol = BumpSolution::at_amplitude(*f, a, m);
            if sol.residual >= RESIDUAL_TOL {
                return Err(StationaryError::NoFixedPoint(*f));
            }
            Ok(sol)
        }
        FiringFunction::Constant { .. } => Err(StationaryError::Unsupported(*f)),
    }
}

impl BumpSolution {
    /// Evaluates every derived constant at amplitude `a`, whether or not `a`
    /// is a fixed point.
    pub fn at_amplitude(f: FiringFunction, a: f64, m: usize) -> Self {
        let residual = (fixed_point_map(&f, a, m) - a).abs();
        let (i1, sigma) = match f {
            FiringFunction::Heaviside { rho } => heaviside_constants(rho, a),
            _ => {
                let h = 2.0 * PI / m as f64;
                let ys = nodes(m);
                let i1 = h * ys.iter().map(|y| f.d1(a * y.cos()).expect("smooth")).sum::<f64>();
                let s2 = h * ys.iter().map(|y| y.sin().powi(2) * f.eval(a * y.cos())).sum::<f64>();
                (i1, (2.0 * PI * s2).max(0.0).sqrt())
            }
        };
        Self { amplitude: a, f, residual, i1, gamma: i1 - 2.0, sigma, m }
    }

    /// `I(r) = int_S r(y) f'(A cos y) dy`.
    pub fn weight_integral(&self, r: impl Fn(f64) -> f64) -> Result<f64, StationaryError> {
        let h = 2.0 * PI / self.m as f64;
        let mut acc = 0.0;
        for y in nodes(self.m) {
            acc += r(y) * self.f.d1(self.amplitude * y.cos())?;
        }
        Ok(h * acc)
    }
}

/// `I(1) = 2 / (A sqrt(1 - (rho/A)^2))` and `sigma^2 = 2 pi (x_c - sin(2 x_c) / 2)`
/// with `x_c = arccos(rho / A)`.
fn heaviside_constants(rho: f64, a: f64) -> (f64, f64) {
    let r = (rho / a).clamp(-1.0, 1.0);
    let i1 = 2.0 / (a * (1.0 - r * r).sqrt());
    let xc = r.acos();
    let s2 = xc - (2.0 * xc).sin() / 2.0;
    (i1, (2.0 * PI * s2).max(0.0).sqrt())
}

/// `gamma = I(1) - 2`, required to lie in `(-1, 0)`.
pub fn spectral_gap(sol: &BumpSolution) -> Result<f64, StationaryError> {
    if sol.gamma > -1.0 && sol.gamma < 0.0 {
        Ok(sol.gamma)
    } else {
        Err(StationaryError::UnstableBranch(sol.gamma))
    }
}

pub fn diffusion_sigma(sol: &BumpSolution) -> f64 {
    sol.sigma
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracles: closed forms evaluated directly.
    const A_PLUS_HALF: f64 = 1.931_851_652_578_136_6; // sqrt(1.5) + sqrt(0.5)
    const A_MINUS_HALF: f64 = 0.517_638_090_205_041_5; // sqrt(1.5) - sqrt(0.5)
    const GAMMA_HEAVISIDE_HALF: f64 = -0.928_203_230_275_509_2; // 2/sqrt(2 + 2 sqrt(.75) - .25) - 2

    fn sigmoid(kappa: f64) -> FiringFunction {
        FiringFunction::sigmoid(kappa, 0.5).unwrap()
    }

    #[test]
    fn heaviside_closed_forms() {
        assert_eq!(heaviside_fixed_points(0.0).unwrap(), (0.0, 0.0, 2.0));
        let (_, minus, plus) = heaviside_fixed_points(0.5).unwrap();
        assert!((plus - A_PLUS_HALF).abs() < 1e-15);
        assert!((minus - A_MINUS_HALF).abs() < 1e-15);
        let (_, minus, plus) = heaviside_fixed_points(1.0).unwrap();
        assert!((plus - 2f64.sqrt()).abs() < 1e-15 && (minus - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(heaviside_fixed_points(1.2), Err(StationaryError::NoNonzeroSolution(_))));
    }

    #[test]
    fn heaviside_roots_are_self_consistent() {
        for rho in [-0.9, -0.3, 0.0, 0.2, 0.5, 0.8, 1.0] {
            let (_, minus, plus) = heaviside_fixed_points(rho).unwrap();
            for a in [minus, plus] {
                if a <= 0.0 {
                    continue;
                }
                assert!((a - 2.0 * (1.0 - (rho / a).powi(2)).sqrt()).abs() < 1e-12, "rho={rho} a={a}");
            }
        }
    }

    #[test]
    fn heaviside_gap_and_sigma() {
        let sol = solve_amplitude(&FiringFunction::heaviside(0.5), Branch::Largest).unwrap();
        assert!((sol.gamma - GAMMA_HEAVISIDE_HALF).abs() < 1e-12);
        let xc = (0.5 / A_PLUS_HALF).acos();
        assert!((xc - 1.308_996_9).abs() < 1e-7);
        let sigma = (2.0 * PI * (xc - (2.0 * xc).sin() / 2.0)).sqrt();
        assert!((sol.sigma - sigma).abs() < 1e-12);
        assert!((sol.sigma - 2.5796).abs() < 1e-4);
    }

    #[test]
    fn sigmoid_largest_root() {
        let sol = solve_amplitude(&sigmoid(0.1), Branch::Largest).unwrap();
        assert!(sol.residual < 1e-10);
        assert!((sol.amplitude - A_PLUS_HALF).abs() < 0.2);
    }

    #[test]
    fn sigmoid_smallest_root_tracks_unstable_heaviside_root() {
        let sol = solve_amplitude(&sigmoid(0.1), Branch::Smallest).unwrap();
        assert!(sol.residual < 1e-10);
        assert!((sol.amplitude - A_MINUS_HALF).abs() < 0.1, "{}", sol.amplitude);
        // this root is a saddle: gamma > 0
        assert!(spectral_gap(&sol).is_err());
    }

    #[test]
    fn small_kappa_convergence() {
        let errs: Vec<f64> = [0.1, 0.05, 0.02, 0.01]
            .iter()
            .map(|&k| (solve_amplitude(&sigmoid(k), Branch::Largest).unwrap().amplitude - A_PLUS_HALF).abs())
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0], "{errs:?}");
        }
    }

    #[test]
    fn spectral_gap_in_stable_range_and_approaches_heaviside() {
        let g05 = spectral_gap(&solve_amplitude(&sigmoid(0.05), Branch::Largest).unwrap()).unwrap();
        let g01 = spectral_gap(&solve_amplitude(&sigmoid(0.01), Branch::Largest).unwrap()).unwrap();
        assert!(g05 > -1.0 && g05 < 0.0);
        assert!((g01 - GAMMA_HEAVISIDE_HALF).abs() < (g05 - GAMMA_HEAVISIDE_HALF).abs());
    }

    #[test]
    fn sigma_near_heaviside_oracle() {
        let sol = solve_amplitude(&sigmoid(0.05), Branch::Largest).unwrap();
        assert!((sol.sigma / 2.5796 - 1.0).abs() < 0.05, "{}", sol.sigma);
    }

    #[test]
    fn zero_firing_has_zero_sigma() {
        let sol = BumpSolution::at_amplitude(FiringFunction::constant(0.0).unwrap(), 1.0, 256);
        assert_eq!(diffusion_sigma(&sol), 0.0);
    }

    #[test]
    fn weight_identities_at_solved_bump() {
        let sol = solve_amplitude(&sigmoid(0.05), Branch::Largest).unwrap();
        let s2 = sol.weight_integral(|y| y.sin().powi(2)).unwrap();
        let sc = sol.weight_integral(|y| y.sin() * y.cos()).unwrap();
        let c2 = sol.weight_integral(|y| y.cos().powi(2)).unwrap();
        assert!((s2 - 1.0).abs() < 1e-8, "{s2}");
        assert!(sc.abs() < 1e-12, "{sc}");
        assert!((c2 - (sol.i1 - 1.0)).abs() < 1e-8);
        // integration by parts: A I(sin^2) = G(A)
        let g = fixed_point_map(&sol.f, sol.amplitude, sol.m);
        assert!((sol.amplitude * s2 - g).abs() < 1e-8);
    }

    #[test]
    fn deterministic() {
        let a = solve_amplitude(&sigmoid(0.07), Branch::Largest).unwrap();
        let b = solve_amplitude(&sigmoid(0.07), Branch::Largest).unwrap();
        assert_eq!(a.amplitude.to_bits(), b.amplitude.to_bits());
        assert_eq!(a.sigma.to_bits(), b.sigma.to_bits());
    }

    #[test]
    fn too_smooth_sigmoid_has_no_bump() {
        let f = FiringFunction::sigmoid(2.0, 0.5).unwrap();
        assert!(matches!(solve_amplitude(&f, Branch::Largest), Err(StationaryError::NoFixedPoint(_))));
    }
}
