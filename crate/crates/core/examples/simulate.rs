//! One run of the Hawkes network started on the bump: event counts and the
//! phase and distance of the voltage profile along the run.
//!
//! cargo run --release --example simulate -- [N] [T] [seed]

use ringbumps::hawkes::{init_state, HawkesParams, InitialProfile};
use ringbumps::nfe::{manifold_distance, variational_phase};
use ringbumps::{solve_amplitude, Branch, FiringFunction, RingGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(500);
    let t_end: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100.0);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let bump = solve_amplitude(&FiringFunction::sigmoid(0.05, 0.5)?, Branch::Largest)?;
    let grid = RingGrid::new(n)?;
    let rho = InitialProfile::Bump.values(&grid, bump.amplitude)?;
    let mut state = init_state(HawkesParams::with_values(grid, bump.f, rho, seed)?);
    let snaps = state.simulate_with_snapshots(t_end, t_end / 10.0)?;
    for s in &snaps {
        let u = state.params().profile_at(s);
        let phase = variational_phase(&u, &bump).map_or(f64::NAN, |p| p);
        println!("t = {:>7.1}: phase {phase:>9.5}, distance {:.4}", s.t, manifold_distance(&u, &bump));
    }
    let busiest = state.counts().iter().max().copied().unwrap_or(0);
    println!(
        "{} spikes from {} proposals, busiest neuron fired {busiest} times",
        state.total_events(),
        state.proposals()
    );
    Ok(())
}
