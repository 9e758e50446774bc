use std::f64::consts::PI;

use crate::model::{BinProfile, Field, FiringFunction, Quadrature, RingFunction, DEFAULT_RESOLUTION};

use super::NfeError;

/// Default RK4 step.
pub const DEFAULT_DT: f64 = 1e-3;
/// Largest accepted RK4 step.
pub const MAX_DT: f64 = 0.01;

/// Initial profile of a flow: a sampled field or a piecewise-constant profile.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Field(Field),
    Bins(BinProfile),
}

impl InitialCondition {
    fn quadrature(&self) -> Quadrature {
        match self {
            Self::Field(g) => g.quadrature(),
            Self::Bins(p) => p.quadrature(),
        }
    }

    fn first_mode(&self) -> (f64, f64) {
        match self {
            Self::Field(g) => g.first_mode(),
            Self::Bins(p) => p.first_mode(),
        }
    }

    fn off_mode_norm_sq(&self) -> f64 {
        match self {
            Self::Field(g) => g.off_mode_norm_sq(),
            Self::Bins(p) => p.off_mode_norm_sq(),
        }
    }

    /// Resolution used by [`FlowState::current`].
    pub fn resolution(&self) -> usize {
        match self {
            Self::Field(g) => g.m(),
            Self::Bins(_) => DEFAULT_RESOLUTION,
        }
    }

    /// Samples on an `m`-point quadrature grid.
    pub fn sample(&self, m: usize) -> Result<Field, NfeError> {
        match self {
            Self::Field(g) if g.m() == m => Ok(g.clone()),
            Self::Field(g) => Ok(Field::from_fn(m, |x| g.eval_at(x))?),
            Self::Bins(p) => Ok(p.to_field(m)?),
        }
    }
}

impl From<Field> for InitialCondition {
    fn from(g: Field) -> Self {
        Self::Field(g)
    }
}

impl From<BinProfile> for InitialCondition {
    fn from(p: BinProfile) -> Self {
        Self::Bins(p)
    }
}

/// State of the flow `u_t = e^{-t} rho + a cos + b sin`.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    rho0: InitialCondition,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rho_q: Vec<f64>,
    cos_q: Vec<f64>,
    sin_q: Vec<f64>,
    rho_mode: (f64, f64),
    rho_off_sq: f64,
    m: usize,
}

impl FlowState {
    pub fn new(rho0: impl Into<InitialCondition>) -> Self {
        let rho0 = rho0.into();
        let q = rho0.quadrature();
        let rho_mode = rho0.first_mode();
        let rho_off_sq = rho0.off_mode_norm_sq();
        let m = rho0.resolution();
        Self {
            t: 0.0,
            a: 0.0,
            b: 0.0,
            weights: q.weights,
            rho_q: q.values,
            cos_q: q.nodes.iter().map(|y| y.cos()).collect(),
            sin_q: q.nodes.iter().map(|y| y.sin()).collect(),
            nodes: q.nodes,
            rho0,
            rho_mode,
            rho_off_sq,
            m,
        }
    }

    pub fn rho0(&self) -> &InitialCondition {
        &self.rho0
    }

    /// `u_t` on the resolution of the initial field (or the default
    /// resolution for piecewise-constant profiles).
    pub fn current(&self) -> Field {
        self.current_at(self.m).expect("resolution of the initial condition is valid")
    }

    pub fn current_at(&self, m: usize) -> Result<Field, NfeError> {
        let rho = self.rho0.sample(m)?;
        let decay = (-self.t).exp();
        let cos = Field::cosine(m, 1.0, 0.0)?;
        let sin = Field::cosine(m, 1.0, -PI / 2.0)?;
        Ok(rho.scale(decay).axpy(self.a, &cos).axpy(self.b, &sin))
    }

    /// Coefficients `(c, s)` of the first Fourier mode, `u_t ~ c cos + s sin`.
    pub fn first_mode(&self) -> (f64, f64) {
        let decay = (-self.t).exp();
        (decay * self.rho_mode.0 / PI + self.a, decay * self.rho_mode.1 / PI + self.b)
    }

    /// `||u_t - (c cos + s sin)||_2^2`, i.e. `e^{-2t}` times that of `rho`.
    pub fn off_mode_norm_sq(&self) -> f64 {
        (-2.0 * self.t).exp() * self.rho_off_sq
    }

    /// `L^2` distance from `u_t` to the circle of bumps of amplitude `a`.
    pub fn distance_to_circle(&self, amplitude: f64) -> f64 {
        let (c, s) = self.first_mode();
        let r = c.hypot(s) - amplitude;
        (self.off_mode_norm_sq() + PI * r * r).sqrt()
    }

    /// `||du_t/dt||_2`.
    pub fn speed(&self, f: &FiringFunction) -> f64 {
        let (c, s) = self.drive(f, self.t, self.a, self.b);
        let decay = (-self.t).exp();
        let dc = c - self.a - decay * self.rho_mode.0 / PI;
        let ds = s - self.b - decay * self.rho_mode.1 / PI;
        (self.off_mode_norm_sq() + PI * (dc * dc + ds * ds)).sqrt()
    }

    /// Quadrature rule carrying the current values of `u_t`.
    pub fn quadrature(&self) -> Quadrature {
        let decay = (-self.t).exp();
        let values = (0..self.rho_q.len())
            .map(|q| decay * self.rho_q[q] + self.a * self.cos_q[q] + self.b * self.sin_q[q])
            .collect();
        Quadrature { nodes: self.nodes.clone(), weights: self.weights.clone(), values }
    }

    /// `(C, S) = (int cos f(u), int sin f(u))` for `u = e^{-t} rho + a cos + b sin`.
    fn drive(&self, f: &FiringFunction, t: f64, a: f64, b: f64) -> (f64, f64) {
        let decay = (-t).exp();
        let (mut c, mut s) = (0.0, 0.0);
        for q in 0..self.rho_q.len() {
            let u = decay * self.rho_q[q] + a * self.cos_q[q] + b * self.sin_q[q];
            let wf = self.weights[q] * f.eval(u);
            c += wf * self.cos_q[q];
            s += wf * self.sin_q[q];
        }
        (c, s)
    }

    fn rhs(&self, f: &FiringFunction, t: f64, a: f64, b: f64) -> (f64, f64) {
        let (c, s) = self.drive(f, t, a, b);
        (c - a, s - b)
    }

    /// One classical RK4 step of length `h`.
    pub fn step(&mut self, f: &FiringFunction, h: f64) -> Result<(), NfeError> {
        let (t, a, b) = (self.t, self.a, self.b);
        let k1 = self.rhs(f, t, a, b);
        let k2 = self.rhs(f, t + 0.5 * h, a + 0.5 * h * k1.0, b + 0.5 * h * k1.1);
        let k3 = self.rhs(f, t + 0.5 * h, a + 0.5 * h * k2.0, b + 0.5 * h * k2.1);
        let k4 = self.rhs(f, t + h, a + h * k3.0, b + h * k3.1);
        self.a = a + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        self.b = b + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        self.t = t + h;
        if !(self.a.is_finite() && self.b.is_finite()) {
            return Err(NfeError::NumericalBlowup(self.t));
        }
        Ok(())
    }

    /// Advances to `t_end` with steps no longer than `dt`, landing on `t_end`
    /// exactly.
    pub fn advance(&mut self, f: &FiringFunction, t_end: f64, dt: f64) -> Result<(), NfeError> {
        check_step(dt)?;
        if !(t_end >= self.t) {
            return Err(NfeError::InvalidTime { t: self.t, t_end });
        }
        let span = t_end - self.t;
        if span == 0.0 {
            return Ok(());
        }
        let n = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
        let h = span / n as f64;
        let t0 = self.t;
        for k in 1..=n {
            self.step(f, h)?;
            self.t = t0 + k as f64 * h;
        }
        self.t = t_end;
        Ok(())
    }

    /// Like [`advance`](Self::advance), calling `observe` at `t` and at every
    /// multiple of `every` up to `t_end`.
    pub fn advance_observed(
        &mut self,
        f: &FiringFunction,
        t_end: f64,
        dt: f64,
        every: f64,
        mut observe: impl FnMut(&FlowState),
    ) -> Result<(), NfeError> {
        check_step(dt)?;
        observe(self);
        let t0 = self.t;
        let mut k = 1;
        loop {
            let next = (t0 + k as f64 * every).min(t_end);
            self.advance(f, next, dt)?;
            observe(self);
            if next >= t_end {
                return Ok(());
            }
            k += 1;
        }
    }
}

fn check_step(dt: f64) -> Result<(), NfeError> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(NfeError::InvalidStep { dt, max: MAX_DT });
    }
    Ok(())
}

/// Integrates the flow from `g` up to `t_end`.
pub fn flow(g: &Field, f: &FiringFunction, t_end: f64, dt: f64) -> Result<FlowState, NfeError> {
    if !(t_end > 0.0) {
        return Err(NfeError::InvalidTime { t: 0.0, t_end });
    }
    let mut state = FlowState::new(g.clone());
    state.advance(f, t_end, dt)?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::{solve_amplitude, Branch};

    fn sig() -> FiringFunction {
        FiringFunction::sigmoid(0.05, 0.5).unwrap()
    }

    #[test]
    fn initial_state() {
        let g = Field::from_fn(128, |x| x.sin().powi(3) + 0.2).unwrap();
        let s = FlowState::new(g.clone());
        assert_eq!((s.t, s.a, s.b), (0.0, 0.0, 0.0));
        assert_eq!(s.current(), g);
    }

    #[test]
    fn stationary_bump_does_not_move() {
        let f = sig();
        let bump = solve_amplitude(&f, Branch::Largest).unwrap();
        let g = Field::cosine(bump.m, bump.amplitude, 0.4).unwrap();
        let mut s = FlowState::new(g.clone());
        let mut worst: f64 = 0.0;
        s.advance_observed(&f, 10.0, DEFAULT_DT, 0.5, |st| worst = worst.max(st.current().axpy(-1.0, &g).norm()))
            .unwrap();
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn zero_stays_near_zero() {
        let f = sig();
        let s = flow(&Field::zeros(512).unwrap(), &f, 5.0, DEFAULT_DT).unwrap();
        assert!(s.current().norm() < 1e-2);
    }

    #[test]
    fn quarter_bump_collapses() {
        let f = sig();
        let bump = solve_amplitude(&f, Branch::Largest).unwrap();
        let a = bump.amplitude;
        let g = Field::cosine(bump.m, a / 4.0, 0.0).unwrap();
        let s = flow(&g, &f, 5.0, DEFAULT_DT).unwrap();
        assert!(s.current().norm() < 0.2 * a * PI.sqrt());
    }

    #[test]
    fn bounded() {
        let f = sig();
        let g = Field::from_fn(512, |x| 3.0 * (2.0 * x).cos() - 1.0).unwrap();
        let bound = g.sup_norm() + 4.0;
        let mut s = FlowState::new(g);
        s.advance_observed(&f, 20.0, DEFAULT_DT, 0.25, |st| assert!(st.current().sup_norm() <= bound)).unwrap();
    }

    #[test]
    fn closed_form_distance_matches_reconstruction() {
        let f = sig();
        let bump = solve_amplitude(&f, Branch::Largest).unwrap();
        let g = Field::from_fn(bump.m, |x| 1.8 * (x - 0.3).cos() + 0.2 * (2.0 * x).sin() + 0.1).unwrap();
        let s = flow(&g, &f, 2.0, DEFAULT_DT).unwrap();
        let u = s.current();
        let brute = (0..3600)
            .map(|k| {
                let phi = -PI + 2.0 * PI * k as f64 / 3600.0;
                u.axpy(-1.0, &Field::cosine(bump.m, bump.amplitude, phi).unwrap()).norm()
            })
            .fold(f64::INFINITY, f64::min);
        let d = s.distance_to_circle(bump.amplitude);
        assert!(d <= brute + 1e-12 && brute - d < 1e-5, "{d} {brute}");
    }

    #[test]
    fn rejects_bad_steps() {
        let g = Field::zeros(64).unwrap();
        assert!(matches!(flow(&g, &sig(), 1.0, 0.02), Err(NfeError::InvalidStep { .. })));
        assert!(matches!(flow(&g, &sig(), 1.0, 0.0), Err(NfeError::InvalidStep { .. })));
        assert!(matches!(flow(&g, &sig(), -1.0, 0.001), Err(NfeError::InvalidTime { .. })));
    }

    #[test]
    fn bin_profile_initial_condition() {
        let f = sig();
        let bump = solve_amplitude(&f, Branch::Largest).unwrap();
        let grid = crate::model::RingGrid::new(400).unwrap();
        let p = BinProfile::new(grid.positions().iter().map(|x| bump.amplitude * x.cos()).collect()).unwrap();
        let mut s = FlowState::new(p);
        s.advance(&f, 20.0, DEFAULT_DT).unwrap();
        // piecewise-constant sampling shifts the phase by about half a bin
        let (c, sn) = s.first_mode();
        assert!((c.hypot(sn) - bump.amplitude).abs() < 1e-6);
        assert!(((-sn).atan2(c) - PI / 400.0).abs() < 1e-3);
    }
}
