//! Stationary bump amplitudes and the constants derived from them.
//!
//! cargo run --release --example stationary_bump

use ringbumps::stationary::{fixed_points, heaviside_fixed_points};
use ringbumps::model::resolution_for_kappa;
use ringbumps::{solve_amplitude, Branch, FiringFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rho = 0.5;
    let (_, minus, plus) = heaviside_fixed_points(rho)?;
    println!("Heaviside, rho = {rho}: A- = {minus:.7}, A+ = {plus:.7}");

    println!("{:>6} {:>12} {:>10} {:>10} {:>8}", "kappa", "A", "gamma", "sigma", "roots");
    for kappa in [0.1, 0.05, 0.02, 0.01] {
        let f = FiringFunction::sigmoid(kappa, rho)?;
        let sol = solve_amplitude(&f, Branch::Largest)?;
        let roots = fixed_points(&f, resolution_for_kappa(kappa));
        println!("{kappa:>6} {:>12.8} {:>10.6} {:>10.5} {:>8}", sol.amplitude, sol.gamma, sol.sigma, roots.len());
    }
    let hv = solve_amplitude(&FiringFunction::heaviside(rho), Branch::Largest)?;
    println!("{:>6} {:>12.8} {:>10.6} {:>10.5}", "0", hv.amplitude, hv.gamma, hv.sigma);
    Ok(())
}
