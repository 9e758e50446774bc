//! Linearisation of the neural field equation around a stationary bump.
//!
//! At phase `phi` the bump is `u_phi = A cos(. + phi)` and its tangent is
//! `v_phi = -A sin(. + phi)`. The linearised operator
//! `L_phi psi = -psi + int cos(x - y) f'(u_phi(y)) psi(y) dy` is self-adjoint
//! for the weighted product `<g1, g2>_phi = int g1 g2 f'(u_phi)` and has the
//! three eigenspaces `span(v_phi)` (0), `span(u_phi)` (gamma) and their
//! weighted orthogonal complement (-1).
//!
//! Projection coefficients are expansion coefficients along the eigenvectors,
//! `<g, e>_phi / ||e||_phi^2`, so that `P g = coefficient * e` is idempotent.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::model::{nodes, Field, ModelError};
use crate::stationary::BumpSolution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldOpsError {
    #[error("semigroup time must be non-negative, got {0}")]
    InvalidTime(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which projection to apply in [`PhaseFrame::project`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// Onto `span(v_phi)`.
    Circ,
    /// Complement of `Circ`.
    Perp,
    /// Onto `span(u_phi)`.
    Gamma,
}

/// Output of [`PhaseFrame::project`].
#[derive(Debug, Clone, PartialEq)]
pub struct Projected {
    pub coefficient: f64,
    pub field: Field,
}

/// Bump, tangent and weight at one phase of the stationary manifold.
#[derive(Debug, Clone)]
pub struct PhaseFrame {
    pub phi: f64,
    pub bump: BumpSolution,
    pub u_phi: Field,
    pub v_phi: Field,
    /// `f'(u_phi(y_k))`.
    pub weight: Field,
    cos: Vec<f64>,
    sin: Vec<f64>,
    v_norm_sq: f64,
    u_norm_sq: f64,
}

impl PhaseFrame {
    /// Builds the frame on the bump's own quadrature resolution. Fails for
    /// nonlinearities without a pointwise derivative.
    pub fn new(bump: &BumpSolution, phi: f64) -> Result<Self, FieldOpsError> {
        let m = bump.m;
        let a = bump.amplitude;
        let u_phi = Field::cosine(m, a, phi)?;
        let v_phi = Field::cosine(m, a, phi + PI / 2.0)?;
        let mut weight = Vec::with_capacity(m);
        for &u in u_phi.samples() {
            weight.push(bump.f.d1(u)?);
        }
        let weight = Field::from_samples(weight)?;
        let ys = nodes(m);
        let cos = ys.iter().map(|y| y.cos()).collect();
        let sin = ys.iter().map(|y| y.sin()).collect();
        let mut frame = Self {
            phi,
            bump: bump.clone(),
            u_phi,
            v_phi,
            weight,
            cos,
            sin,
            v_norm_sq: 0.0,
            u_norm_sq: 0.0,
        };
        frame.v_norm_sq = frame.weighted_inner(&frame.v_phi, &frame.v_phi);
        frame.u_norm_sq = frame.weighted_inner(&frame.u_phi, &frame.u_phi);
        Ok(frame)
    }

    pub fn m(&self) -> usize {
        self.bump.m
    }

    pub fn amplitude(&self) -> f64 {
        self.bump.amplitude
    }

    pub fn gamma(&self) -> f64 {
        self.bump.gamma
    }

    /// `||v_phi||_phi^2`, equal to `A^2` at a fixed point.
    pub fn v_norm_sq(&self) -> f64 {
        self.v_norm_sq
    }

    /// `||u_phi||_phi^2`, equal to `A^2 (I(1) - 1)` at a fixed point.
    pub fn u_norm_sq(&self) -> f64 {
        self.u_norm_sq
    }

    fn h(&self) -> f64 {
        2.0 * PI / self.m() as f64
    }

    /// `int g1 g2 f'(u_phi)`.
    pub fn weighted_inner(&self, g1: &Field, g2: &Field) -> f64 {
        assert_eq!(g1.m(), self.m(), "field resolution does not match the frame");
        assert_eq!(g2.m(), self.m(), "field resolution does not match the frame");
        let w = self.weight.samples();
        self.h() * g1.samples().iter().zip(g2.samples()).zip(w).map(|((a, b), w)| a * b * w).sum::<f64>()
    }

    pub fn weighted_norm(&self, g: &Field) -> f64 {
        self.weighted_inner(g, g).sqrt()
    }

    /// Coefficients `(int cos(y) f'(u_phi) psi, int sin(y) f'(u_phi) psi)` of
    /// the rank-2 kernel expansion.
    pub fn kernel_coefficients(&self, psi: &Field) -> (f64, f64) {
        assert_eq!(psi.m(), self.m(), "field resolution does not match the frame");
        let w = self.weight.samples();
        let (mut a, mut b) = (0.0, 0.0);
        for k in 0..self.m() {
            let wp = w[k] * psi.samples()[k];
            a += self.cos[k] * wp;
            b += self.sin[k] * wp;
        }
        (self.h() * a, self.h() * b)
    }

    /// `T_phi psi = A_phi(psi) cos + B_phi(psi) sin`.
    pub fn apply_t(&self, psi: &Field) -> Field {
        let (a, b) = self.kernel_coefficients(psi);
        let (amp, phase) = (a.hypot(b), (-b).atan2(a));
        Field::cosine(self.m(), amp, phase).expect("frame resolution is valid")
    }

    /// `L_phi psi = -psi + T_phi psi`.
    pub fn apply_l(&self, psi: &Field) -> Field {
        self.apply_t(psi).axpy(-1.0, psi)
    }

    /// Expansion coefficient of `g` along `v_phi`.
    pub fn alpha_circ(&self, g: &Field) -> f64 {
        self.weighted_inner(g, &self.v_phi) / self.v_norm_sq
    }

    /// Expansion coefficient of `g` along `u_phi`.
    pub fn alpha_gamma(&self, g: &Field) -> f64 {
        self.weighted_inner(g, &self.u_phi) / self.u_norm_sq
    }

    pub fn project(&self, g: &Field, which: Projection) -> Projected {
        match which {
            Projection::Circ => {
                let c = self.alpha_circ(g);
                Projected { coefficient: c, field: self.v_phi.scale(c) }
            }
            Projection::Perp => {
                let c = self.alpha_circ(g);
                Projected { coefficient: c, field: g.axpy(-c, &self.v_phi) }
            }
            Projection::Gamma => {
                let c = self.alpha_gamma(g);
                Projected { coefficient: c, field: self.u_phi.scale(c) }
            }
        }
    }

    /// `e^{t L_phi} g` from the three-eigenspace decomposition.
    pub fn semigroup_apply(&self, t: f64, g: &Field) -> Result<Field, FieldOpsError> {
        if !(t >= 0.0) {
            return Err(FieldOpsError::InvalidTime(t));
        }
        let c0 = self.alpha_circ(g);
        let cg = self.alpha_gamma(g);
        let decay = (-t).exp();
        // e^{-t} g + c0 (1 - e^{-t}) v + cg (e^{gamma t} - e^{-t}) u
        let out = g
            .scale(decay)
            .axpy(c0 * (1.0 - decay), &self.v_phi)
            .axpy(cg * ((self.gamma() * t).exp() - decay), &self.u_phi);
        Ok(out)
    }

    /// Eigen-decomposition of the discretised operator in the weighted
    /// formulation `-I + h D C D`, `C_kl = cos(y_k - y_l)`, `D = diag(sqrt f')`.
    /// Cost is `O(M^3)`.
    pub fn discretized_spectrum(&self) -> DiscreteSpectrum {
        let m = self.m();
        let h = self.h();
        let d: Vec<f64> = self.weight.samples().iter().map(|w| w.sqrt()).collect();
        let mut s = DMatrix::<f64>::zeros(m, m);
        for k in 0..m {
            for l in 0..m {
                let c = self.cos[k] * self.cos[l] + self.sin[k] * self.sin[l];
                s[(k, l)] = h * d[k] * c * d[l];
            }
            s[(k, k)] -= 1.0;
        }
        let eig = SymmetricEigen::new(s);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

        // weighted cosine similarity of the top eigenvector with v_phi
        let top = eig.eigenvectors.column(*order.last().expect("non-empty"));
        let dv: Vec<f64> = d.iter().zip(self.v_phi.samples()).map(|(a, b)| a * b).collect();
        let dot: f64 = top.iter().zip(&dv).map(|(a, b)| a * b).sum();
        let nz = top.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nv = dv.iter().map(|a| a * a).sum::<f64>().sqrt();
        DiscreteSpectrum { values, kernel_similarity: (dot / (nz * nv)).abs() }
    }
}

/// Eigenvalues of the discretised linearisation, ascending.
#[derive(Debug, Clone)]
pub struct DiscreteSpectrum {
    pub values: Vec<f64>,
    /// `|cos angle|` between the eigenvector of the largest eigenvalue and
    /// `v_phi`, measured in the weighted product.
    pub kernel_similarity: f64,
}

impl DiscreteSpectrum {
    /// Expected cluster (`-1`, `gamma` or `0`) for each eigenvalue.
    pub fn clusters(&self, gamma: f64) -> Vec<f64> {
        let m = self.values.len();
        (0..m)
            .map(|i| {
                if i + 1 == m {
                    0.0
                } else if i + 2 == m {
                    gamma
                } else {
                    -1.0
                }
            })
            .collect()
    }

    /// Largest distance between an eigenvalue and its expected cluster.
    pub fn max_cluster_error(&self, gamma: f64) -> f64 {
        self.values.iter().zip(self.clusters(gamma)).map(|(v, c)| (v - c).abs()).fold(0.0, f64::max)
    }
}
