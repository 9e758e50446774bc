//! Finite-horizon distance between the network and the mean-field solution.
//!
//! cargo run --release --example chaos_scaling -- [seeds]

use ringbumps::analysis::{chaos_scaling, ChaosConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seeds = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(10);
    let cfg = ChaosConfig { seeds, ..Default::default() };
    let started = std::time::Instant::now();
    let s = chaos_scaling(&cfg)?;
    println!("{:>6} {:>12}", "N", "median sup");
    for r in &s.rows {
        println!("{:>6} {:>12.5}", r.n, r.median);
    }
    println!("log-log slope {:.3} (wall time {:.1?})", s.slope, started.elapsed());
    Ok(())
}
