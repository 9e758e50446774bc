use std::f64::consts::PI;

use super::{Field, ModelError, Quadrature, RingFunction};

// 4-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GL_WEIGHTS: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

/// Piecewise-constant profile `sum_i U_i 1_{B_i}` over the `N` bins of a ring
/// grid. Integrals against smooth weights use Gauss-Legendre inside each bin,
/// so no error comes from the jumps between bins.
#[derive(Debug, Clone, PartialEq)]
pub struct BinProfile {
    values: Vec<f64>,
}

impl BinProfile {
    pub fn new(values: Vec<f64>) -> Result<Self, ModelError> {
        if values.is_empty() {
            return Err(ModelError::InvalidSize("profile needs at least one bin".into()));
        }
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bin_width(&self) -> f64 {
        2.0 * PI / self.n() as f64
    }

    fn bin_left(&self, i: usize) -> f64 {
        -PI + i as f64 * self.bin_width()
    }

    /// `sqrt(int_S (U(x) - g(x))^2 dx)` for a smooth `g`.
    pub fn l2_distance_to(&self, g: impl Fn(f64) -> f64) -> f64 {
        let h = self.bin_width();
        let half = 0.5 * h;
        let mut acc = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let mid = self.bin_left(i) + half;
            for (t, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                let d = v - g(mid + half * t);
                acc += w * half * d * d;
            }
        }
        acc.sqrt()
    }

    /// Samples the profile at the quadrature nodes of an `m`-point field.
    pub fn to_field(&self, m: usize) -> Result<Field, ModelError> {
        let grid = super::RingGrid::new(self.n())?;
        Field::from_fn(m, |y| self.values[grid.bin_of(y)])
    }
}

impl RingFunction for BinProfile {
    fn integrate_against<W: Fn(f64) -> f64>(&self, w: W) -> f64 {
        let h = self.bin_width();
        let half = 0.5 * h;
        let mut acc = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let mid = self.bin_left(i) + half;
            let mut local = 0.0;
            for (t, gw) in GL_NODES.iter().zip(GL_WEIGHTS) {
                local += gw * w(mid + half * t);
            }
            acc += v * half * local;
        }
        acc
    }

    fn norm_sq(&self) -> f64 {
        self.bin_width() * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    fn quadrature(&self) -> Quadrature {
        let half = 0.5 * self.bin_width();
        let cap = 4 * self.n();
        let mut q = Quadrature { nodes: Vec::with_capacity(cap), weights: Vec::with_capacity(cap), values: Vec::with_capacity(cap) };
        for (i, &v) in self.values.iter().enumerate() {
            let mid = self.bin_left(i) + half;
            for (t, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                q.nodes.push(mid + half * t);
                q.weights.push(w * half);
                q.values.push(v);
            }
        }
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrals_of_smooth_weights() {
        let p = BinProfile::new(vec![1.0; 10]).unwrap();
        assert!((p.integrate_against(|x| x.cos().powi(2)) - PI).abs() < 1e-10);
        assert!((p.norm_sq() - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn sampling_error_is_first_order() {
        // ||pc(A cos) - A cos||_2 shrinks like 1/N.
        let a = 1.9;
        let err = |n: usize| {
            let grid = super::super::RingGrid::new(n).unwrap();
            let p = BinProfile::new(grid.positions().iter().map(|x| a * x.cos()).collect()).unwrap();
            p.l2_distance_to(|x| a * x.cos())
        };
        let (e1, e2) = (err(100), err(200));
        assert!((e1 / e2 - 2.0).abs() < 0.05, "{e1} {e2}");
        // right-endpoint sampling: error^2 ~ (h^2/3) int A^2 sin^2
        let h = 2.0 * PI / 100.0;
        let predicted = (h * h / 3.0 * a * a * PI).sqrt();
        assert!((e1 / predicted - 1.0).abs() < 0.02, "{e1} vs {predicted}");
    }
}
