//! Isochronal phase of a perturbed bump and its first two derivatives.
//!
//! cargo run --release --example isochron

use ringbumps::field_ops::PhaseFrame;
use ringbumps::nfe::{d2theta, dtheta, isochronal_phase, variational_phase};
use ringbumps::{solve_amplitude, Branch, Field, FiringFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bump = solve_amplitude(&FiringFunction::sigmoid(0.05, 0.5)?, Branch::Largest)?;
    let phi = 0.4;
    let frame = PhaseFrame::new(&bump, phi)?;
    let h = Field::from_fn(bump.m, |x| (x + 1.0).sin() + 0.5 * (2.0 * x).cos())?;

    for eps in [0.0, 0.05, 0.2] {
        let g = frame.u_phi.axpy(eps, &h);
        let iso = isochronal_phase(g.clone(), &bump)?;
        let var = variational_phase(&g, &bump)?;
        let taylor = phi + eps * dtheta(&frame, &h) + 0.5 * eps * eps * d2theta(&frame, &h, &h)?;
        println!(
            "eps = {eps:.2}: isochron {:.8} ({} steps, t = {:.1}), variational {var:.8}, second order {taylor:.8}",
            iso.theta, iso.iterations, iso.t_final
        );
    }
    Ok(())
}
