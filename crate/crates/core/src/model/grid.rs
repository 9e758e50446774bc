use std::f64::consts::PI;

use super::ModelError;

/// `N` neurons at `x_i = pi (2i - N) / N`, `i = 1..N`, each owning the bin
/// `(x_{i-1}, x_i]` with `x_0 = -pi`.
///
/// Indices are zero-based in the API: neuron `i` here is neuron `i + 1` in
/// the one-based convention used by the CSV outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct RingGrid {
    n: usize,
    positions: Vec<f64>,
}

impl RingGrid {
    pub fn new(n: usize) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::InvalidSize("ring grid needs at least one neuron".into()));
        }
        let nf = n as f64;
        let positions = (1..=n).map(|i| PI * (2.0 * i as f64 - nf) / nf).collect();
        Ok(Self { n, positions })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> f64 {
        self.positions[i]
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Bin `(left, right]` of neuron `i`.
    pub fn bin(&self, i: usize) -> (f64, f64) {
        let left = if i == 0 { -PI } else { self.positions[i - 1] };
        (left, self.positions[i])
    }

    /// Neuron whose bin contains `x`, after wrapping `x` onto `(-pi, pi]`.
    pub fn bin_of(&self, x: f64) -> usize {
        let x = super::wrap_angle(x);
        // Right endpoints land on integers up to rounding.
        let k = ((x + PI) / self.spacing() - 1e-9).ceil() as isize - 1;
        k.clamp(0, self.n as isize - 1) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_neurons() {
        let g = RingGrid::new(4).unwrap();
        let expected = [-PI / 2.0, 0.0, PI / 2.0, PI];
        for (x, e) in g.positions().iter().zip(expected) {
            assert!((x - e).abs() < 1e-15);
        }
    }

    #[test]
    fn single_neuron() {
        let g = RingGrid::new(1).unwrap();
        assert_eq!(g.positions(), &[PI]);
        assert_eq!(g.bin(0), (-PI, PI));
    }

    #[test]
    fn two_bins() {
        let g = RingGrid::new(2).unwrap();
        assert_eq!(g.bin(0), (-PI, 0.0));
        assert_eq!(g.bin(1), (0.0, PI));
    }

    #[test]
    fn zero_is_rejected() {
        assert!(matches!(RingGrid::new(0), Err(ModelError::InvalidSize(_))));
    }

    #[test]
    fn spacing_and_partition() {
        for n in [1usize, 2, 3, 7, 64, 500, 1000] {
            let g = RingGrid::new(n).unwrap();
            assert_eq!(*g.positions().last().unwrap(), PI);
            let h = 2.0 * PI / n as f64;
            let mut total = 0.0;
            for i in 0..n {
                let (l, r) = g.bin(i);
                assert!(r > l);
                assert!((r - l - h).abs() < 1e-13);
                total += r - l;
            }
            assert!((total - 2.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn bin_lookup_respects_half_open_bins() {
        let g = RingGrid::new(8).unwrap();
        for i in 0..8 {
            let (l, r) = g.bin(i);
            assert_eq!(g.bin_of(r), i);
            assert_eq!(g.bin_of(0.5 * (l + r)), i);
        }
        assert_eq!(g.bin_of(-PI), 7);
        assert_eq!(g.bin_of(PI + 0.1), g.bin_of(-PI + 0.1));
    }
}
