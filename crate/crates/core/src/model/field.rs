use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use super::{ModelError, Quadrature, RingFunction};

/// Smallest quadrature resolution accepted for a [`Field`].
pub const MIN_RESOLUTION: usize = 64;
/// Quadrature resolution used when nothing finer is needed.
pub const DEFAULT_RESOLUTION: usize = 512;

/// Quadrature nodes `y_k = pi (2k - M) / M`, `k = 1..M`.
pub fn nodes(m: usize) -> Vec<f64> {
    let mf = m as f64;
    (1..=m).map(|k| PI * (2.0 * k as f64 - mf) / mf).collect()
}

/// Resolution at which the rectangle rule integrates `g(A cos y)` for a
/// sigmoid of slope `kappa` to roughly machine precision.
///
/// The logistic has poles at imaginary distance `pi kappa` in `u`, which
/// become poles at distance about `pi kappa / A` in `y`; the periodic rule
/// converges like `exp(-M * distance)`.
pub fn resolution_for_kappa(kappa: f64) -> usize {
    let needed = (23.0 / kappa).ceil();
    if !needed.is_finite() || needed <= DEFAULT_RESOLUTION as f64 {
        return DEFAULT_RESOLUTION;
    }
    (needed as usize).next_power_of_two().min(1 << 16)
}

/// Optional closed form carried alongside the samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldTag {
    /// `amplitude * cos(x + phase)`, amplitude non-negative.
    Cosine { amplitude: f64, phase: f64 },
    General,
}

/// A real function on the circle, sampled on the uniform quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    samples: Vec<f64>,
    tag: FieldTag,
}

fn check_resolution(m: usize) -> Result<(), ModelError> {
    if m < MIN_RESOLUTION || m % 2 != 0 {
        return Err(ModelError::InvalidSize(format!(
            "quadrature resolution must be even and at least {MIN_RESOLUTION}, got {m}"
        )));
    }
    Ok(())
}

impl Field {
    pub fn from_samples(samples: Vec<f64>) -> Result<Self, ModelError> {
        check_resolution(samples.len())?;
        Ok(Self { samples, tag: FieldTag::General })
    }

    pub fn from_fn(m: usize, g: impl Fn(f64) -> f64) -> Result<Self, ModelError> {
        check_resolution(m)?;
        Ok(Self { samples: nodes(m).into_iter().map(g).collect(), tag: FieldTag::General })
    }

    pub fn zeros(m: usize) -> Result<Self, ModelError> {
        check_resolution(m)?;
        Ok(Self { samples: vec![0.0; m], tag: FieldTag::General })
    }

    /// `amplitude * cos(x + phase)`; negative amplitudes are folded into the
    /// phase.
    pub fn cosine(m: usize, amplitude: f64, phase: f64) -> Result<Self, ModelError> {
        check_resolution(m)?;
        let (amplitude, phase) = if amplitude < 0.0 {
            (-amplitude, super::wrap_angle(phase + PI))
        } else {
            (amplitude, super::wrap_angle(phase))
        };
        let samples = nodes(m).into_iter().map(|y| amplitude * (y + phase).cos()).collect();
        Ok(Self { samples, tag: FieldTag::Cosine { amplitude, phase } })
    }

    pub fn m(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn nodes(&self) -> Vec<f64> {
        nodes(self.m())
    }

    pub fn quad_weight(&self) -> f64 {
        2.0 * PI / self.m() as f64
    }

    /// Periodic rectangle rule `(2 pi / M) sum_k g(y_k)`.
    pub fn integrate(&self) -> f64 {
        self.quad_weight() * self.samples.iter().sum::<f64>()
    }

    /// Plain `L^2(S)` inner product.
    pub fn inner(&self, other: &Field) -> f64 {
        assert_eq!(self.m(), other.m(), "fields on different grids");
        self.quad_weight() * self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn map(&self, g: impl Fn(f64) -> f64) -> Field {
        Field { samples: self.samples.iter().map(|&v| g(v)).collect(), tag: FieldTag::General }
    }

    /// Pointwise product.
    pub fn product(&self, other: &Field) -> Field {
        assert_eq!(self.m(), other.m(), "fields on different grids");
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        Field { samples, tag: FieldTag::General }
    }

    pub fn scale(&self, c: f64) -> Field {
        match self.tag {
            FieldTag::Cosine { amplitude, phase } => {
                Field::cosine(self.m(), c * amplitude, phase).expect("resolution already checked")
            }
            FieldTag::General => Field {
                samples: self.samples.iter().map(|v| c * v).collect(),
                tag: FieldTag::General,
            },
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Field) -> Field {
        assert_eq!(self.m(), other.m(), "fields on different grids");
        if let (
            FieldTag::Cosine { amplitude: a1, phase: p1 },
            FieldTag::Cosine { amplitude: a2, phase: p2 },
        ) = (self.tag, other.tag)
        {
            let re = a1 * p1.cos() + c * a2 * p2.cos();
            let im = a1 * p1.sin() + c * a2 * p2.sin();
            return Field::cosine(self.m(), re.hypot(im), im.atan2(re)).expect("resolution already checked");
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a + c * b).collect();
        Field { samples, tag: FieldTag::General }
    }

    /// Real Fourier coefficients `(a_j, b_j)` of `g = a_0/2 + sum a_j cos(jx) + b_j sin(jx)`
    /// for `j = 0..=M/2`.
    fn fourier(&self) -> Vec<(f64, f64)> {
        let m = self.m();
        let ys = self.nodes();
        (0..=m / 2)
            .map(|j| {
                let jf = j as f64;
                let (mut a, mut b) = (0.0, 0.0);
                for (y, v) in ys.iter().zip(&self.samples) {
                    let (s, c) = (jf * y).sin_cos();
                    a += v * c;
                    b += v * s;
                }
                let scale = 2.0 / m as f64;
                (a * scale, b * scale)
            })
            .collect()
    }

    /// Trigonometric interpolant evaluated at `x`. Costs `O(M^2)`; exact for
    /// band-limited fields.
    pub fn eval_at(&self, x: f64) -> f64 {
        if let FieldTag::Cosine { amplitude, phase } = self.tag {
            return amplitude * (x + phase).cos();
        }
        let coeffs = self.fourier();
        let half = self.m() / 2;
        let mut acc = 0.5 * coeffs[0].0;
        for (j, &(a, b)) in coeffs.iter().enumerate().skip(1) {
            let w = if j == half { 0.5 } else { 1.0 };
            let (s, c) = (j as f64 * x).sin_cos();
            acc += w * (a * c + b * s);
        }
        acc
    }

    /// `x -> g(x + psi)`. Exact for cosine-tagged fields and for shifts by
    /// whole grid steps, spectral interpolation otherwise.
    pub fn rotate(&self, psi: f64) -> Field {
        let m = self.m();
        if let FieldTag::Cosine { amplitude, phase } = self.tag {
            return Field::cosine(m, amplitude, phase + psi).expect("resolution already checked");
        }
        let h = 2.0 * PI / m as f64;
        let steps = psi / h;
        if (steps - steps.round()).abs() < 1e-12 {
            let k = (steps.round() as i64).rem_euclid(m as i64) as usize;
            let samples = (0..m).map(|i| self.samples[(i + k) % m]).collect();
            return Field { samples, tag: FieldTag::General };
        }
        let coeffs = self.fourier();
        let half = m / 2;
        let samples = self
            .nodes()
            .into_iter()
            .map(|y| {
                let x = y + psi;
                let mut acc = 0.5 * coeffs[0].0;
                for (j, &(a, b)) in coeffs.iter().enumerate().skip(1) {
                    let w = if j == half { 0.5 } else { 1.0 };
                    let (s, c) = (j as f64 * x).sin_cos();
                    acc += w * (a * c + b * s);
                }
                acc
            })
            .collect();
        Field { samples, tag: FieldTag::General }
    }
}

impl RingFunction for Field {
    fn integrate_against<W: Fn(f64) -> f64>(&self, w: W) -> f64 {
        let mf = self.m() as f64;
        let sum: f64 = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, v)| v * w(PI * (2.0 * (k + 1) as f64 - mf) / mf))
            .sum();
        self.quad_weight() * sum
    }

    fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    fn quadrature(&self) -> Quadrature {
        Quadrature { nodes: self.nodes(), weights: vec![self.quad_weight(); self.m()], values: self.samples.clone() }
    }

    fn off_mode_norm_sq(&self) -> f64 {
        let (c, s) = self.first_mode();
        let h = self.quad_weight();
        self.nodes()
            .iter()
            .zip(&self.samples)
            .map(|(y, g)| {
                let r = g - (c * y.cos() + s * y.sin()) / PI;
                r * r
            })
            .sum::<f64>()
            * h
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, c: f64) -> Field {
        self.scale(c)
    }
}

/// Rectangle-rule integral of a sampled field.
pub fn quad_integrate(g: &Field) -> f64 {
    g.integrate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trigonometric_integrals() {
        for m in [128usize, 512, 2048] {
            let s2 = Field::from_fn(m, |x| x.sin().powi(2)).unwrap();
            let c2 = Field::from_fn(m, |x| x.cos().powi(2)).unwrap();
            let one = Field::from_fn(m, |_| 1.0).unwrap();
            let sc = Field::from_fn(m, |x| x.sin() * x.cos()).unwrap();
            assert!((quad_integrate(&s2) - PI).abs() < 1e-12);
            assert!((quad_integrate(&c2) - PI).abs() < 1e-12);
            assert!((quad_integrate(&one) - 2.0 * PI).abs() < 1e-12);
            assert!(quad_integrate(&sc).abs() < 1e-12);
        }
    }

    #[test]
    fn resolution_floor() {
        assert!(Field::zeros(32).is_err());
        assert!(Field::zeros(65).is_err());
        assert!(Field::zeros(64).is_ok());
    }

    #[test]
    fn cosine_tag_matches_samples() {
        let g = Field::cosine(512, 1.7, 0.3).unwrap();
        for (y, v) in g.nodes().iter().zip(g.samples()) {
            assert!((v - 1.7 * (y + 0.3).cos()).abs() < 1e-15);
        }
        let neg = Field::cosine(256, -2.0, 0.1).unwrap();
        match neg.tag() {
            FieldTag::Cosine { amplitude, phase } => {
                assert_eq!(amplitude, 2.0);
                assert!((phase - (0.1 + PI - 2.0 * PI)).abs() < 1e-15);
            }
            FieldTag::General => panic!("tag lost"),
        }
    }

    #[test]
    fn cosine_sums_stay_tagged() {
        let u = Field::cosine(256, 2.0, 0.4).unwrap();
        let v = Field::cosine(256, 2.0, 0.4 + PI / 2.0).unwrap();
        let w = u.axpy(0.5, &v);
        assert!(matches!(w.tag(), FieldTag::Cosine { .. }));
        let direct: Vec<f64> = u.samples().iter().zip(v.samples()).map(|(a, b)| a + 0.5 * b).collect();
        for (a, b) in w.samples().iter().zip(direct) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn spectral_rotation_of_band_limited_field() {
        let g = Field::from_fn(128, |x| (2.0 * x).cos() + 0.3 * (5.0 * x).sin() + 0.1).unwrap();
        let r = g.rotate(0.37);
        let expected = Field::from_fn(128, |x| (2.0 * (x + 0.37)).cos() + 0.3 * (5.0 * (x + 0.37)).sin() + 0.1).unwrap();
        for (a, b) in r.samples().iter().zip(expected.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((g.eval_at(0.2) - ((0.4f64).cos() + 0.3 * (1.0f64).sin() + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn grid_step_rotation_is_a_shift() {
        let g = Field::from_fn(64, |x| x.sin().exp()).unwrap();
        let h = 2.0 * PI / 64.0;
        let r = g.rotate(3.0 * h);
        assert_eq!(r.samples()[0], g.samples()[3]);
        assert_eq!(r.samples()[63], g.samples()[2]);
    }

    proptest! {
        #[test]
        fn exact_for_low_degree_trig_polynomials(a in -2.0f64..2.0, b in -2.0f64..2.0, j in 1usize..60) {
            let m = 128;
            let g = Field::from_fn(m, |x| a * (j as f64 * x).cos() * (j as f64 * x).cos() + b).unwrap();
            // degree 2j < M, so the rule is exact
            let exact = a * PI + 2.0 * PI * b;
            prop_assert!((quad_integrate(&g) - exact).abs() < 1e-11);
        }
    }
}
