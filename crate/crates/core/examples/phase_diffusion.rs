//! Wandering of the bump phase on the slow time scale.
//!
//! cargo run --release --example phase_diffusion -- [replicas] [N]

use ringbumps::analysis::{phase_diffusion, DiffusionConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n_replicas = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(500);
    let cfg = DiffusionConfig { n, t_end: n as f64, n_replicas, ..Default::default() };
    let started = std::time::Instant::now();
    let report = phase_diffusion(&cfg)?;
    let est = &report.estimate;

    println!("N = {n}, {} replicas, tau_f = 1", est.n_replicas);
    println!("sigma (theory)       {:.4}", report.sigma_theory());
    println!("sigma / A            {:.4}", report.sigma_phase());
    println!("sigma_hat            {:.4} +/- {:.4}", est.sigma_hat, est.stderr);
    println!("r2 of variance fit   {:.4}", est.r2_linearity);
    println!("drift t statistic    {:.3}", est.drift_t);
    for (w, v) in est.widths.iter().zip(&est.variances) {
        println!("  width {w:.4}  variance {v:.5}");
    }
    let qv = report.qv_corrected;
    println!("quadratic variation  {:.4} +/- {:.4} (sigma_hat^2 = {:.4}, z = {:.2})", qv.mean, qv.stderr, qv.sigma_sq, qv.z());
    let sup = report.replicas.successes().map(|(_, s)| s.proximity.sup_dist).fold(0.0, f64::max);
    println!("largest distance to the bump circle after burn-in {sup:.4}");
    println!("failed replicas {}, wall time {:.1?}", report.replicas.failed, started.elapsed());
    Ok(())
}
