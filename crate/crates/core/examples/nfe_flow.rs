//! Neural field flow from three initial profiles: a perturbed bump returns
//! to the circle, a quarter bump collapses to zero.
//!
//! cargo run --release --example nfe_flow

use ringbumps::hawkes::InitialProfile;
use ringbumps::nfe::{variational_phase, FlowState, DEFAULT_DT};
use ringbumps::{solve_amplitude, Branch, Field, FiringFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bump = solve_amplitude(&FiringFunction::sigmoid(0.05, 0.5)?, Branch::Largest)?;
    for (name, profile) in [
        ("bump", InitialProfile::Bump),
        ("bump + cos 2x", InitialProfile::BumpPlusMode2),
        ("quarter bump", InitialProfile::QuarterBump),
    ] {
        let rho = Field::from_fn(bump.m, |x| profile.eval(x, bump.amplitude))?;
        let mut state = FlowState::new(rho);
        println!("{name}");
        state.advance_observed(&bump.f, 20.0, DEFAULT_DT, 5.0, |s| {
            let phase = variational_phase(&s.current(), &bump).map_or("-".to_string(), |p| format!("{p:.6}"));
            println!("  t = {:>4}: distance {:.3e}, phase {phase}", s.t, s.distance_to_circle(bump.amplitude));
        })?;
    }
    Ok(())
}
