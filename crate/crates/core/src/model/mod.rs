//! Parameters, firing nonlinearities, ring geometry and periodic quadrature.
//!
//! All integrals over the circle `S = (-pi, pi]` use the plain Lebesgue
//! measure `dy`; the microscopic interaction weights are `2 pi / N`.

mod field;
mod firing;
mod grid;
mod profile;

use std::f64::consts::PI;

use thiserror::Error;

pub use field::{nodes, quad_integrate, resolution_for_kappa, Field, FieldTag, DEFAULT_RESOLUTION, MIN_RESOLUTION};
pub use firing::FiringFunction;
pub use grid::RingGrid;
pub use profile::BinProfile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("the Heaviside nonlinearity has no pointwise derivative")]
    UnsupportedDerivative,
}

/// Anything on the circle that can be integrated against a smooth weight.
pub trait RingFunction {
    /// `int_S g(x) w(x) dx`.
    fn integrate_against<W: Fn(f64) -> f64>(&self, w: W) -> f64;

    /// `||g||_2^2`.
    fn norm_sq(&self) -> f64;

    /// Nodes, weights and values of a rule that integrates `g` times a
    /// smooth function.
    fn quadrature(&self) -> Quadrature;

    /// `(int g cos, int g sin)`.
    fn first_mode(&self) -> (f64, f64) {
        (self.integrate_against(f64::cos), self.integrate_against(f64::sin))
    }

    /// Squared `L^2` norm of `g` minus its projection on `span(cos, sin)`.
    fn off_mode_norm_sq(&self) -> f64 {
        let (c, s) = self.first_mode();
        (self.norm_sq() - (c * c + s * s) / PI).max(0.0)
    }
}

/// Discrete rule `int g w ~ sum_q weights[q] values[q] w(nodes[q])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Wraps an angle onto `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = (x + PI).rem_euclid(two_pi) - PI;
    if y <= -PI {
        y += two_pi;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_angle(0.3 + 8.0 * PI) - 0.3).abs() < 1e-13);
    }
}
