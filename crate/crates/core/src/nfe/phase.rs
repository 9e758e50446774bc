use std::f64::consts::PI;

use crate::field_ops::PhaseFrame;
use crate::model::{wrap_angle, Field, Quadrature, RingFunction};
use crate::stationary::BumpSolution;

use super::flow::{FlowState, InitialCondition, DEFAULT_DT};
use super::NfeError;

/// Residual accepted for the variational phase equation.
pub const PHASE_TOL: f64 = 1e-10;
const NEWTON_MAX: usize = 60;
const SCAN_POINTS: usize = 720;

/// Largest distance to the bump circle at which a phase is assigned: half
/// the distance from the origin, `A sqrt(pi) / 2`.
pub fn projection_radius(bump: &BumpSolution) -> f64 {
    0.5 * bump.amplitude * PI.sqrt()
}

/// `min_phi ||u - A cos(. + phi)||_2` from the first Fourier mode of `u`.
pub fn manifold_distance(u: &impl RingFunction, bump: &BumpSolution) -> f64 {
    let (c, s) = u.first_mode();
    let r = c.hypot(s) / PI - bump.amplitude;
    (u.off_mode_norm_sq() + PI * r * r).sqrt()
}

/// Phase `phi` with `<g - u_phi, v_phi>_phi = 0`, the root continuing the
/// Fourier angle of `g`.
pub fn variational_phase(g: &impl RingFunction, bump: &BumpSolution) -> Result<f64, NfeError> {
    let distance = manifold_distance(g, bump);
    let radius = projection_radius(bump);
    if !(distance <= radius) {
        return Err(NfeError::TooFarFromManifold { distance, radius });
    }
    let (c, s) = g.first_mode();
    solve_phase(&g.quadrature(), (-s).atan2(c), bump)
}

struct PhaseEquation<'a> {
    bump: &'a BumpSolution,
    wg: Vec<f64>,
    w: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl PhaseEquation<'_> {
    /// `F(phi) = int (g - u_phi) v_phi f'(u_phi)`.
    fn eval(&self, phi: f64) -> f64 {
        let a = self.bump.amplitude;
        let (sp, cp) = phi.sin_cos();
        let mut acc = 0.0;
        for q in 0..self.w.len() {
            let cq = self.cos[q] * cp - self.sin[q] * sp;
            let sq = self.sin[q] * cp + self.cos[q] * sp;
            let fp = self.bump.f.d1(a * cq).expect("derivative checked on construction");
            acc += (self.wg[q] - self.w[q] * a * cq) * (-a * sq) * fp;
        }
        acc
    }
}

fn solve_phase(q: &Quadrature, seed: f64, bump: &BumpSolution) -> Result<f64, NfeError> {
    bump.f.d1(0.0)?;
    let eq = PhaseEquation {
        bump,
        wg: q.weights.iter().zip(&q.values).map(|(w, g)| w * g).collect(),
        w: q.weights.clone(),
        cos: q.nodes.iter().map(|y| y.cos()).collect(),
        sin: q.nodes.iter().map(|y| y.sin()).collect(),
    };
    let slope = -bump.amplitude * bump.amplitude;

    let mut phi = seed;
    let mut best = f64::INFINITY;
    let mut worse = 0;
    for _ in 0..NEWTON_MAX {
        let value = eq.eval(phi);
        if value.abs() < PHASE_TOL {
            return Ok(wrap_angle(phi));
        }
        if value.abs() < best {
            best = value.abs();
            worse = 0;
        } else {
            worse += 1;
            if worse >= 3 {
                break;
            }
        }
        phi -= value / slope;
    }
    scan_and_bisect(&eq, seed)
}

fn scan_and_bisect(eq: &PhaseEquation<'_>, seed: f64) -> Result<f64, NfeError> {
    let step = 2.0 * PI / SCAN_POINTS as f64;
    let grid: Vec<f64> = (0..=SCAN_POINTS).map(|k| -PI + k as f64 * step).collect();
    let values: Vec<f64> = grid.iter().map(|&p| eq.eval(p)).collect();
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for k in 0..SCAN_POINTS {
        // the attracting root is where F crosses from positive to negative
        if values[k] > 0.0 && values[k + 1] <= 0.0 {
            let gap = wrap_angle(grid[k] - seed).abs();
            if best.map_or(true, |b| gap < wrap_angle(b.0 - seed).abs()) {
                best = Some((grid[k], grid[k + 1], values[k], values[k + 1]));
            }
        }
    }
    let fail = || NfeError::TooFarFromManifold { distance: f64::NAN, radius: f64::NAN };
    let (mut lo, mut hi, mut f_lo, f_hi) = best.ok_or_else(fail)?;
    if f_hi.abs() < PHASE_TOL {
        return Ok(wrap_angle(hi));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = eq.eval(mid);
        if f_mid.abs() < PHASE_TOL {
            return Ok(wrap_angle(mid));
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(fail())
}

/// Stopping and step parameters of [`isochronal_phase_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsochronOptions {
    pub tol: f64,
    pub horizon: f64,
    pub dt: f64,
    pub checkpoint: f64,
    /// Consecutive non-decreasing checkpoints tolerated before giving up.
    pub patience: usize,
}

impl Default for IsochronOptions {
    fn default() -> Self {
        Self { tol: 1e-8, horizon: 200.0, dt: DEFAULT_DT, checkpoint: 0.5, patience: 5 }
    }
}

// Distances below this are treated as converged for the basin test; the flow
// of a piecewise-constant profile settles on a circle whose radius differs
// from A by its quadrature error.
const BASIN_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsochronResult {
    pub theta: f64,
    pub converged: bool,
    /// RK4 steps taken.
    pub iterations: usize,
    /// Terminal `L^2` distance to the bump circle.
    pub final_dist: f64,
    pub t_final: f64,
}

/// Phase of the bump the flow from `g` converges to.
pub fn isochronal_phase(g: impl Into<InitialCondition>, bump: &BumpSolution) -> Result<IsochronResult, NfeError> {
    isochronal_phase_with(g, bump, IsochronOptions::default())
}

/// Runs the flow until its speed drops below `|gamma| tol`, which bounds the
/// distance to the nearest stationary bump of the discretised flow by about
/// `tol`, then projects variationally.
pub fn isochronal_phase_with(
    g: impl Into<InitialCondition>,
    bump: &BumpSolution,
    opts: IsochronOptions,
) -> Result<IsochronResult, NfeError> {
    let f = bump.f;
    let mut state = FlowState::new(g);
    let speed_tol = bump.gamma.abs().max(1e-3) * opts.tol;
    let mut iterations = 0;
    let mut next_check = opts.checkpoint;
    let mut last = state.distance_to_circle(bump.amplitude);
    let mut stalled = 0;
    let converged = loop {
        if state.speed(&f) < speed_tol {
            break true;
        }
        if state.t >= opts.horizon {
            break false;
        }
        state.step(&f, opts.dt)?;
        iterations += 1;
        if state.t >= next_check - 1e-12 {
            next_check += opts.checkpoint;
            let d = state.distance_to_circle(bump.amplitude);
            if d >= last && d > BASIN_FLOOR {
                stalled += 1;
                if stalled >= opts.patience {
                    return Err(NfeError::OutsideBasin { t: state.t, distance: d });
                }
            } else {
                stalled = 0;
            }
            last = d;
        }
    };
    let final_dist = state.distance_to_circle(bump.amplitude);
    let radius = projection_radius(bump);
    if !(final_dist <= radius) {
        return Err(NfeError::TooFarFromManifold { distance: final_dist, radius });
    }
    let (c, s) = state.first_mode();
    let theta = solve_phase(&state.quadrature(), (-s).atan2(c), bump)?;
    Ok(IsochronResult { theta, converged, iterations, final_dist, t_final: state.t })
}

/// First derivative of the isochron map at `u_phi`:
/// `<v_phi, h>_phi / ||v_phi||_phi^2`.
pub fn dtheta(frame: &PhaseFrame, h: &Field) -> f64 {
    frame.weighted_inner(&frame.v_phi, h) / frame.v_norm_sq()
}

/// Coordinate of `h` along the unit tangent, `<v_phi, h>_phi / ||v_phi||_phi`.
/// This is `A` times [`dtheta`].
pub fn tangent_coordinate(frame: &PhaseFrame, h: &Field) -> f64 {
    frame.weighted_inner(&frame.v_phi, h) / frame.v_norm_sq().sqrt()
}

/// `int f''(u_phi) v_phi h l`.
pub fn beta(frame: &PhaseFrame, h: &Field, l: &Field) -> Result<f64, NfeError> {
    let m = frame.m();
    let f = frame.bump.f;
    let (u, v) = (frame.u_phi.samples(), frame.v_phi.samples());
    let mut acc = 0.0;
    for k in 0..m {
        acc += f.d2(u[k])? * v[k] * (h.samples()[k] * l.samples()[k]);
    }
    Ok(acc * 2.0 * PI / m as f64)
}

/// Second derivative of the isochron map at `u_phi`, i.e.
/// `A^{-2} int_0^inf beta(e^{sL} h, e^{sL} l) ds` expanded on the three
/// eigenspaces of `L_phi`. Coefficients are expansion coefficients along
/// `v_phi` and `u_phi`.
pub fn d2theta(frame: &PhaseFrame, h: &Field, l: &Field) -> Result<f64, NfeError> {
    let a2 = frame.amplitude().powi(2);
    let g = frame.gamma();
    let (ch, cl) = (frame.alpha_circ(h), frame.alpha_circ(l));
    let (gh, gl) = (frame.alpha_gamma(h), frame.alpha_gamma(l));
    let (v, u) = (&frame.v_phi, &frame.u_phi);
    let k = (1.0 + g) / (2.0 * (1.0 - g));
    let value = 0.5 * (ch * beta(frame, v, l)? + cl * beta(frame, v, h)?)
        + k * (gh * beta(frame, u, l)? + gl * beta(frame, u, h)?)
        - a2 * (2.0 - g) * k * (ch * gl + cl * gh)
        + 0.5 * beta(frame, h, l)?;
    Ok(value / a2)
}

/// Variant of the second-derivative formula built from unit-normalised
/// coefficients `<g, e>_phi / ||e||_phi` and diagonal quadratic terms. Kept
/// for comparison with [`d2theta`]; it does not match finite differences of
/// the isochron map.
pub fn d2theta_unit_normalized(frame: &PhaseFrame, h: &Field, l: &Field) -> Result<f64, NfeError> {
    let a2 = frame.amplitude().powi(2);
    let g = frame.gamma();
    let nv = frame.v_norm_sq().sqrt();
    let nu = frame.u_norm_sq().sqrt();
    let (v, u) = (&frame.v_phi, &frame.u_phi);
    let (ch, cl) = (frame.weighted_inner(h, v) / nv, frame.weighted_inner(l, v) / nv);
    let (gh, gl) = (frame.weighted_inner(h, u) / nu, frame.weighted_inner(l, u) / nu);
    let value = (ch * beta(frame, v, l)? + cl * beta(frame, v, h)? + beta(frame, h, l)?) / (2.0 * a2)
        + (1.0 + g) / (2.0 * a2 * (1.0 - g)) * (gh * beta(frame, u, l)? + gl * beta(frame, u, h)?)
        - (2.0 - g) * (1.0 + g) / (2.0 * (1.0 - g)) * (ch * cl + gh * gl);
    Ok(value)
}
