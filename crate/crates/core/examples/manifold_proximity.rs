//! Distance of simulated networks to the circle of stationary bumps.
//!
//! cargo run --release --example manifold_proximity -- [seeds]

use ringbumps::analysis::{burn_in_time, proximity_report, replica_sweep, solve_bump};
use ringbumps::hawkes::{simulate, HawkesParams, InitialProfile};
use ringbumps::RingGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seeds: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(10);
    let bump = solve_bump(0.05, 0.5)?;
    for n in [125usize, 500] {
        let sweep = replica_sweep(1, seeds, 8, |seed, _| {
            let grid = RingGrid::new(n).map_err(ringbumps::hawkes::HawkesError::from)?;
            let rho = InitialProfile::Bump.values(&grid, bump.amplitude)?;
            let run = simulate(HawkesParams::with_values(grid, bump.f.clone(), rho, seed)?, 500.0, 0.5)?;
            Ok(proximity_report(&run, &bump, 5.0).sup_dist)
        })?;
        let mut d: Vec<f64> = sweep.successes().map(|(_, d)| *d).collect();
        d.sort_by(f64::total_cmp);
        println!("N = {n:4}  window [{:.1}, 500]", burn_in_time(n, 5.0));
        println!("  sup distances {:?}", d.iter().map(|x| (x * 1000.0).round() / 1000.0).collect::<Vec<_>>());
        println!("  median {:.4}, below 0.5: {} of {}", d[d.len() / 2], d.iter().filter(|&&x| x < 0.5).count(), d.len());
    }
    Ok(())
}
