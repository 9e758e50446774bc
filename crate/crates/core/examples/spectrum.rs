//! Spectrum of the linearisation around a bump: one zero eigenvalue along
//! the circle, one at `gamma` along the bump and the rest at `-1`.
//!
//! cargo run --release --example spectrum

use ringbumps::field_ops::PhaseFrame;
use ringbumps::{solve_amplitude, Branch, FiringFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bump = solve_amplitude(&FiringFunction::sigmoid(0.05, 0.5)?, Branch::Largest)?;
    let frame = PhaseFrame::new(&bump, 0.7)?;
    let spec = frame.discretized_spectrum();
    let top: Vec<String> = spec.values.iter().rev().take(4).map(|v| format!("{v:.8}")).collect();
    println!("M = {}, gamma = {:.8}", spec.values.len(), bump.gamma);
    println!("largest eigenvalues {}", top.join(", "));
    println!("distance to the expected clusters {:.2e}", spec.max_cluster_error(bump.gamma));
    println!("kernel eigenvector vs tangent {:.8}", spec.kernel_similarity);

    // the semigroup contracts everything but the tangent direction
    let g = ringbumps::Field::from_fn(bump.m, |x| (x + 0.3).sin() + (2.0 * x).cos())?;
    for t in [0.0, 1.0, 5.0, 20.0] {
        let p = frame.semigroup_apply(t, &g)?;
        println!("t = {t:>4}: ||P_t g|| = {:.6}, tangent part {:.6}", p.norm(), frame.alpha_circ(&p));
    }
    Ok(())
}
