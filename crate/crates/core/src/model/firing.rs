use serde::{Deserialize, Serialize};

use super::ModelError;

/// Exponent clamp for the logistic; `exp(700)` is still finite.
const EXP_CLAMP: f64 = 700.0;

/// Nonlinearity mapping a synaptic voltage to a firing rate in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiringFunction {
    /// Logistic `1 / (1 + exp(-(u - rho) / kappa))`.
    Sigmoid { kappa: f64, rho: f64 },
    /// Step `1_{u >= rho}`, the `kappa -> 0` limit of the sigmoid.
    Heaviside { rho: f64 },
    /// Voltage-independent rate. Only useful as a diagnostic: it turns the
    /// network into independent Poisson processes.
    Constant { rate: f64 },
}

impl FiringFunction {
    pub fn sigmoid(kappa: f64, rho: f64) -> Result<Self, ModelError> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(ModelError::InvalidParameter(format!(
                "sigmoid slope kappa must be positive, got {kappa}"
            )));
        }
        if !rho.is_finite() {
            return Err(ModelError::InvalidParameter(format!("threshold must be finite, got {rho}")));
        }
        Ok(Self::Sigmoid { kappa, rho })
    }

    pub fn heaviside(rho: f64) -> Self {
        Self::Heaviside { rho }
    }

    pub fn constant(rate: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(ModelError::InvalidParameter(format!(
                "constant rate must lie in [0, 1], got {rate}"
            )));
        }
        Ok(Self::Constant { rate })
    }

    /// Threshold `rho`, or `None` for the constant rate.
    pub fn threshold(&self) -> Option<f64> {
        match *self {
            Self::Sigmoid { rho, .. } | Self::Heaviside { rho } => Some(rho),
            Self::Constant { .. } => None,
        }
    }

    pub fn kappa(&self) -> Option<f64> {
        match *self {
            Self::Sigmoid { kappa, .. } => Some(kappa),
            _ => None,
        }
    }

    /// Largest value the function can take. The thinning simulator relies on
    /// this being at most one.
    pub fn sup(&self) -> f64 {
        match *self {
            Self::Constant { rate } => rate,
            _ => 1.0,
        }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            Self::Sigmoid { kappa, rho } => {
                let z = ((u - rho) / kappa).clamp(-EXP_CLAMP, EXP_CLAMP);
                1.0 / (1.0 + (-z).exp())
            }
            Self::Heaviside { rho } => {
                if u >= rho {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Constant { rate } => rate,
        }
    }

    /// First (`order = 1`) or second (`order = 2`) derivative.
    pub fn deriv(&self, u: f64, order: u8) -> Result<f64, ModelError> {
        match order {
            1 => self.d1(u),
            2 => self.d2(u),
            _ => Err(ModelError::InvalidParameter(format!(
                "derivative order must be 1 or 2, got {order}"
            ))),
        }
    }

    /// `f'(u) = f (1 - f) / kappa`, evaluated through `exp(-|z|)` so the tails
    /// do not cancel.
    pub fn d1(&self, u: f64) -> Result<f64, ModelError> {
        match *self {
            Self::Sigmoid { kappa, rho } => {
                let z = ((u - rho) / kappa).clamp(-EXP_CLAMP, EXP_CLAMP);
                let e = (-z.abs()).exp();
                Ok(e / ((1.0 + e) * (1.0 + e)) / kappa)
            }
            Self::Heaviside { .. } => Err(ModelError::UnsupportedDerivative),
            Self::Constant { .. } => Ok(0.0),
        }
    }

    /// `f''(u) = f'(u) (1 - 2 f(u)) / kappa`.
    pub fn d2(&self, u: f64) -> Result<f64, ModelError> {
        match *self {
            Self::Sigmoid { kappa, rho } => {
                let z = ((u - rho) / kappa).clamp(-EXP_CLAMP, EXP_CLAMP);
                let e = (-z.abs()).exp();
                let d1 = e / ((1.0 + e) * (1.0 + e)) / kappa;
                // 1 - 2 f = -tanh(z / 2)
                let one_minus_2f = -(z * 0.5).tanh();
                Ok(d1 * one_minus_2f / kappa)
            }
            Self::Heaviside { .. } => Err(ModelError::UnsupportedDerivative),
            Self::Constant { .. } => Ok(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sig() -> FiringFunction {
        FiringFunction::sigmoid(0.1, 0.5).unwrap()
    }

    #[test]
    fn values_at_reference_points() {
        assert_eq!(sig().eval(0.5), 0.5);
        let expected = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((sig().eval(0.6) - expected).abs() < 1e-15);
        assert!((sig().eval(0.6) - 0.7310586).abs() < 1e-7);
        assert_eq!(FiringFunction::heaviside(0.5).eval(0.4), 0.0);
        assert_eq!(FiringFunction::heaviside(0.5).eval(0.5), 1.0);
    }

    #[test]
    fn derivatives_at_midpoint() {
        assert!((sig().d1(0.5).unwrap() - 2.5).abs() < 1e-14);
        assert_eq!(sig().d2(0.5).unwrap(), 0.0);
        assert!(matches!(
            FiringFunction::heaviside(0.5).deriv(0.4, 1),
            Err(ModelError::UnsupportedDerivative)
        ));
        assert!(matches!(
            FiringFunction::heaviside(0.5).deriv(0.4, 2),
            Err(ModelError::UnsupportedDerivative)
        ));
    }

    #[test]
    fn no_overflow_far_from_threshold() {
        let f = sig();
        for &u in &[-1e3, -500.0, 500.0, 1e3, 1e300, -1e300] {
            let v = f.eval(u);
            assert!(v.is_finite() && (0.0..=1.0).contains(&v));
            assert!(f.d1(u).unwrap().is_finite());
            assert!(f.d2(u).unwrap().is_finite());
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FiringFunction::sigmoid(0.0, 0.5).is_err());
        assert!(FiringFunction::sigmoid(-1.0, 0.5).is_err());
        assert!(FiringFunction::constant(1.5).is_err());
    }

    proptest! {
        #[test]
        fn sigmoid_in_open_unit_interval(u in -2.0f64..3.0) {
            let v = sig().eval(u);
            prop_assert!(v > 0.0 && v < 1.0);
        }

        #[test]
        fn sigmoid_strictly_increasing(u in -2.0f64..3.0, du in 1e-6f64..1.0) {
            prop_assert!(sig().eval(u) < sig().eval(u + du));
        }

        #[test]
        fn derivative_identity(u in -5.0f64..5.0) {
            let f = sig();
            let v = f.eval(u);
            let d = f.d1(u).unwrap();
            prop_assert!((d - v * (1.0 - v) / 0.1).abs() <= 1e-12 * (1.0 + d));
            prop_assert!(d >= 0.0);
        }

        #[test]
        fn first_derivative_matches_central_difference(u in -5.0f64..5.0) {
            let f = sig();
            let h = 1e-5;
            let fd = (f.eval(u + h) - f.eval(u - h)) / (2.0 * h);
            let d = f.d1(u).unwrap();
            // In the upper tail f rounds to within 1e-16 of one, so the
            // difference quotient carries ~1e-11 absolute noise.
            if d > 1e-3 {
                prop_assert!(((fd - d) / d).abs() < 1e-7, "u={u} fd={fd} d={d}");
            } else {
                prop_assert!((fd - d).abs() < 1e-10, "u={u} fd={fd} d={d}");
            }
        }

        #[test]
        fn second_derivative_matches_central_difference(u in -1.0f64..2.0) {
            let f = sig();
            let h = 1e-5;
            let fd = (f.d1(u + h).unwrap() - f.d1(u - h).unwrap()) / (2.0 * h);
            let d = f.d2(u).unwrap();
            prop_assert!((fd - d).abs() < 1e-6 * (1.0 + d.abs()));
        }
    }
}
