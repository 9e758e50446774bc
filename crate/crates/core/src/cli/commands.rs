use std::f64::consts::PI;
use std::fmt::Display;
use std::time::Instant;

use serde::Serialize;

use crate::analysis::{
    burn_in_time, chaos_scaling, phase_diffusion, ChaosConfig, DiffusionConfig, TraceOptions,
};
use crate::field_ops::PhaseFrame;
use crate::hawkes::{init_state, HawkesParams, InitialProfile, Snapshot};
use crate::model::{resolution_for_kappa, BinProfile, Field, FiringFunction, RingGrid};
use crate::nfe::{manifold_distance, variational_phase, FlowState, InitialCondition, DEFAULT_DT};
use crate::stationary::{fixed_point_map, fixed_points, heaviside_fixed_points, solve_amplitude, Branch, BumpSolution};

use super::config::{FiringKind, RunConfig};
use super::output::{Manifest, OutputDir};
use super::svg::{heatmap, line_plot, Series};
use super::{CliError, Command, FigureKind};

fn numerical(e: impl Display) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Runs one subcommand and writes its artifacts and manifest.
pub fn run(command: &Command, cfg: &RunConfig) -> Result<Manifest, CliError> {
    let started = Instant::now();
    let mut out = OutputDir::create(&cfg.output.directory)?;
    match command {
        Command::Stationary => stationary(cfg, &mut out)?,
        Command::Spectrum => spectrum(cfg, &mut out)?,
        Command::Nfe => nfe(cfg, &mut out)?,
        Command::Simulate => simulate(cfg, &mut out)?,
        Command::PhaseDiffusion => diffusion(cfg, &mut out)?,
        Command::Chaos => chaos(cfg, &mut out)?,
        Command::Figure { which: FigureKind::Fixed } => figure_fixed(cfg, &mut out)?,
        Command::Figure { which: FigureKind::Wandering1 } => {
            network_figure(cfg, &mut out, "wandering1", InitialProfile::BumpPlusMode2, 500.0)?
        }
        Command::Figure { which: FigureKind::Wandering3 } => {
            network_figure(cfg, &mut out, "wandering3", InitialProfile::QuarterBump, 5.0)?
        }
    }
    out.finish(cfg, &command.name(), cfg.sim.seed, started.elapsed())
}

fn bump(cfg: &RunConfig) -> Result<BumpSolution, CliError> {
    solve_amplitude(&cfg.firing()?, Branch::Largest).map_err(numerical)
}

#[derive(Serialize)]
struct StationaryRow {
    kappa: Option<f64>,
    rho: f64,
    #[serde(rename = "A")]
    a: f64,
    residual: f64,
    #[serde(rename = "I1")]
    i1: f64,
    gamma: f64,
    sigma: f64,
}

fn stationary(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let sol = bump(cfg)?;
    println!("A = {:.10}, residual {:.2e}, gamma = {:.7}, sigma = {:.5}", sol.amplitude, sol.residual, sol.gamma, sol.sigma);
    out.csv(
        "stationary.csv",
        [StationaryRow {
            kappa: sol.f.kappa(),
            rho: cfg.model.rho_threshold,
            a: sol.amplitude,
            residual: sol.residual,
            i1: sol.i1,
            gamma: sol.gamma,
            sigma: sol.sigma,
        }],
    )
}

#[derive(Serialize)]
struct EigenRow {
    index: usize,
    value: f64,
    expected_cluster: f64,
    kernel_similarity: f64,
}

fn spectrum(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let sol = bump(cfg)?;
    let frame = PhaseFrame::new(&sol, 0.0).map_err(numerical)?;
    if sol.f.d1(0.0).is_err() {
        return Err(CliError::Config("spectrum needs a differentiable firing function".into()));
    }
    let spec = frame.discretized_spectrum();
    let clusters = spec.clusters(sol.gamma);
    println!(
        "M = {}, largest cluster error {:.2e}, kernel similarity {:.6}",
        spec.values.len(),
        spec.max_cluster_error(sol.gamma),
        spec.kernel_similarity
    );
    out.csv(
        "spectrum.csv",
        spec.values.iter().zip(&clusters).enumerate().map(|(index, (&value, &expected_cluster))| EigenRow {
            index,
            value,
            expected_cluster,
            kernel_similarity: spec.kernel_similarity,
        }),
    )?;
    if cfg.output.emit_svg {
        let pts = spec.values.iter().enumerate().map(|(i, v)| (i as f64, *v)).collect();
        let svg = line_plot("eigenvalues", "index", "value", &[Series { label: "eigenvalue", points: pts, markers: true }]);
        out.write("spectrum.svg", svg.as_bytes())?;
    }
    Ok(())
}

fn initial_condition(profile: &InitialProfile, sol: &BumpSolution) -> Result<InitialCondition, CliError> {
    Ok(match profile {
        InitialProfile::Values(v) => BinProfile::new(v.clone()).map_err(numerical)?.into(),
        p => Field::from_fn(sol.m, |x| p.eval(x, sol.amplitude)).map_err(numerical)?.into(),
    })
}

#[derive(Serialize)]
struct FlowRow {
    t: f64,
    a: f64,
    b: f64,
    dist_to_manifold: f64,
    variational_phase: f64,
}

fn nfe(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let sol = bump(cfg)?;
    let ic = initial_condition(&cfg.initial_profile()?, &sol)?;
    let mut state = FlowState::new(ic);
    let mut rows = Vec::new();
    let mut failure = None;
    state
        .advance_observed(&sol.f, cfg.sim.t_end, DEFAULT_DT, cfg.sim.snapshot_dt, |s| {
            let (a, b) = s.first_mode();
            let phase = match s.current_at(sol.m) {
                Ok(u) => variational_phase(&u, &sol).unwrap_or(f64::NAN),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            };
            rows.push(FlowRow { t: s.t, a, b, dist_to_manifold: s.distance_to_circle(sol.amplitude), variational_phase: phase });
        })
        .map_err(numerical)?;
    if let Some(e) = failure {
        return Err(numerical(e));
    }
    let last = rows.last().expect("at least the initial row");
    println!("t = {}: distance {:.3e}, phase {:.6}", last.t, last.dist_to_manifold, last.variational_phase);
    if cfg.output.emit_svg {
        let dist = rows.iter().map(|r| (r.t, r.dist_to_manifold)).collect();
        let svg = line_plot("distance to the bump circle", "t", "L2 distance", &[Series { label: "distance", points: dist, markers: false }]);
        out.write("nfe.svg", svg.as_bytes())?;
    }
    out.csv("nfe.csv", rows)
}

fn network_params(n: usize, f: FiringFunction, profile: &InitialProfile, amplitude: f64, seed: u64) -> Result<HawkesParams, CliError> {
    let grid = RingGrid::new(n).map_err(numerical)?;
    let rho = profile.values(&grid, amplitude).map_err(|e| CliError::Config(e.to_string()))?;
    HawkesParams::with_values(grid, f, rho, seed).map_err(|e| CliError::Config(e.to_string()))
}

#[derive(Serialize)]
struct VoltageRow {
    t: f64,
    i: usize,
    #[serde(rename = "U")]
    u: f64,
}

/// Runs a network, writing `{prefix}events.csv`, `{prefix}snapshots.csv` and
/// a heatmap. Returns the snapshots.
fn run_network(
    cfg: &RunConfig,
    out: &mut OutputDir,
    prefix: &str,
    params: HawkesParams,
    t_end: f64,
    dt: f64,
) -> Result<(Vec<Snapshot>, HawkesParams), CliError> {
    let events = format!("{prefix}events.csv");
    let mut state = init_state(params.clone()).spill_events(1 << 16, out.path(&events));
    let snaps = state.simulate_with_snapshots(t_end, dt).map_err(numerical)?;
    state.log_mut().flush().map_err(|e| CliError::Io(e.to_string()))?;
    out.register(&events)?;
    out.add_events(state.total_events() as u64);
    println!("{} events in {} proposals up to t = {t_end}", state.total_events(), state.proposals());
    let rows = snaps.iter().flat_map(|s| {
        let v = params.voltages_at(s);
        v.into_iter().enumerate().map(move |(i, u)| VoltageRow { t: s.t, i: i + 1, u })
    });
    out.csv(&format!("{prefix}snapshots.csv"), rows)?;
    if cfg.output.emit_svg {
        let svg = voltage_heatmap(&params, &snaps);
        out.write(&format!("{prefix}voltage.svg"), svg.as_bytes())?;
    }
    Ok((snaps, params))
}

fn voltage_heatmap(params: &HawkesParams, snaps: &[Snapshot]) -> String {
    let ts = snaps.len().div_ceil(240).max(1);
    let xs = params.n().div_ceil(120).max(1);
    let kept: Vec<&Snapshot> = snaps.iter().step_by(ts).collect();
    let times: Vec<f64> = kept.iter().map(|s| s.t).collect();
    let positions: Vec<f64> = params.grid.positions().iter().step_by(xs).copied().collect();
    let values: Vec<Vec<f64>> = kept.iter().map(|s| params.voltages_at(s).into_iter().step_by(xs).collect()).collect();
    heatmap("voltage", &times, &positions, &values, "U")
}

#[derive(Serialize)]
struct DistanceRow {
    t: f64,
    dist_to_manifold: f64,
}

fn simulate(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let profile = cfg.initial_profile()?;
    let f = cfg.firing()?;
    let sol = solve_amplitude(&f, Branch::Largest).ok();
    let amplitude = match (&sol, &profile) {
        (Some(s), _) => s.amplitude,
        (None, InitialProfile::Zero | InitialProfile::Values(_)) => 0.0,
        (None, _) => return Err(CliError::Numerical("no stationary amplitude to scale the initial profile".into())),
    };
    let params = network_params(cfg.model.n, f, &profile, amplitude, cfg.sim.seed)?;
    let (snaps, params) = run_network(cfg, out, "", params, cfg.sim.t_end, cfg.sim.snapshot_dt)?;
    if let Some(sol) = sol {
        let rows = snaps.iter().map(|s| DistanceRow { t: s.t, dist_to_manifold: manifold_distance(&params.profile_at(s), &sol) });
        out.csv("distance.csv", rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TraceRow {
    replica: usize,
    tau: f64,
    theta_unwrapped: f64,
    valid: bool,
}

#[derive(Serialize)]
struct EstimateRow {
    sigma_hat: f64,
    stderr: f64,
    r2: f64,
    sigma_theory: f64,
    n_replicas: usize,
}

#[derive(Serialize)]
struct Quantity<'a> {
    quantity: &'a str,
    value: f64,
}

#[derive(Serialize)]
struct VarianceRow {
    width: f64,
    variance: f64,
}

fn diffusion(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    if cfg.model.firing_kind != FiringKind::Sigmoid {
        return Err(CliError::Config("phase-diffusion needs the sigmoid firing function".into()));
    }
    if cfg.sweep.n_replicas < 2 {
        return Err(CliError::Config("phase-diffusion needs at least 2 replicas".into()));
    }
    if cfg.sim.snapshot_dt > 1.0 {
        return Err(CliError::Config("phase-diffusion needs sim.snapshot_dt <= 1".into()));
    }
    let dc = DiffusionConfig {
        n: cfg.model.n,
        kappa: cfg.model.kappa,
        rho_threshold: cfg.model.rho_threshold,
        profile: cfg.initial_profile()?,
        t_end: cfg.sim.t_end,
        snapshot_dt: cfg.sim.snapshot_dt,
        base_seed: cfg.sim.seed,
        n_replicas: cfg.sweep.n_replicas,
        parallelism: cfg.sweep.parallelism,
        trace: TraceOptions::default(),
    };
    let report = phase_diffusion(&dc).map_err(numerical)?;
    let est = &report.estimate;
    println!(
        "sigma_hat = {:.4} +/- {:.4} (r2 {:.3}); sigma = {:.4}, sigma / A = {:.4}",
        est.sigma_hat,
        est.stderr,
        est.r2_linearity,
        report.sigma_theory(),
        report.sigma_phase()
    );
    for o in report.replicas.outcomes.iter().filter(|o| o.result.is_err()) {
        eprintln!("replica {} (seed {}) failed: {}", o.index, o.seed, o.result.as_ref().err().expect("failed"));
    }
    let events: usize = report.replicas.successes().map(|(_, s)| s.events).sum();
    out.add_events(events as u64);
    let rows = report.traces().flat_map(|(r, tr)| {
        (0..tr.len()).map(move |k| TraceRow { replica: r, tau: tr.times[k], theta_unwrapped: tr.phases_unwrapped[k], valid: tr.valid[k] })
    });
    out.csv("traces.csv", rows)?;
    out.csv(
        "estimate.csv",
        [EstimateRow {
            sigma_hat: est.sigma_hat,
            stderr: est.stderr,
            r2: est.r2_linearity,
            sigma_theory: report.sigma_theory(),
            n_replicas: est.n_replicas,
        }],
    )?;
    out.csv("variance.csv", est.widths.iter().zip(&est.variances).map(|(&width, &variance)| VarianceRow { width, variance }))?;
    let sup = report.replicas.successes().map(|(_, s)| s.proximity.sup_dist).fold(0.0, f64::max);
    let diagnostics = [
        Quantity { quantity: "sigma_over_amplitude", value: report.sigma_phase() },
        Quantity { quantity: "amplitude", value: report.bump.amplitude },
        Quantity { quantity: "drift_t", value: est.drift_t },
        Quantity { quantity: "qv_rate", value: report.qv_as_written.mean },
        Quantity { quantity: "qv_rate_stderr", value: report.qv_as_written.stderr },
        Quantity { quantity: "qv_z", value: report.qv_as_written.z() },
        Quantity { quantity: "qv_rate_over_amplitude_sq", value: report.qv_corrected.mean },
        Quantity { quantity: "qv_over_amplitude_sq_z", value: report.qv_corrected.z() },
        Quantity { quantity: "failed_replicas", value: report.replicas.failed as f64 },
        Quantity { quantity: "sup_dist_after_burn_in", value: sup },
    ];
    out.csv("diagnostics.csv", diagnostics)?;
    if cfg.output.emit_svg {
        let series: Vec<Series> = report
            .traces()
            .take(10)
            .map(|(_, tr)| Series { label: "", points: tr.valid_points().collect(), markers: false })
            .collect();
        out.write("traces.svg", line_plot("unwrapped phase", "tau", "theta", &series).as_bytes())?;
        let fit = est.widths.iter().map(|w| (*w, est.intercept + est.slope * w)).collect();
        let pts = est.widths.iter().copied().zip(est.variances.iter().copied()).collect();
        let svg = line_plot(
            "increment variance",
            "window width",
            "variance",
            &[Series { label: "pooled", points: pts, markers: true }, Series { label: "fit", points: fit, markers: false }],
        );
        out.write("variance.svg", svg.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ScalingRow {
    #[serde(rename = "N")]
    n: usize,
    median_sup_dist: f64,
    slope: f64,
}

#[derive(Serialize)]
struct ChaosRow {
    #[serde(rename = "N")]
    n: usize,
    seed: u64,
    sup_dist: f64,
}

fn chaos(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    if cfg.model.firing_kind != FiringKind::Sigmoid {
        return Err(CliError::Config("chaos needs the sigmoid firing function".into()));
    }
    let profile = cfg.initial_profile()?;
    if matches!(profile, InitialProfile::Values(_)) {
        return Err(CliError::Config("chaos needs a named initial profile".into()));
    }
    let cc = ChaosConfig {
        ns: cfg.chaos.ns.clone(),
        seeds: cfg.sweep.n_replicas,
        base_seed: cfg.sim.seed,
        t_max: cfg.chaos.t_max,
        snapshot_dt: cfg.chaos.snapshot_dt,
        kappa: cfg.model.kappa,
        rho_threshold: cfg.model.rho_threshold,
        profile,
        parallelism: cfg.sweep.parallelism,
    };
    let s = chaos_scaling(&cc).map_err(numerical)?;
    for r in &s.rows {
        println!("N = {:5}: median sup distance {:.5}", r.n, r.median);
    }
    println!("log-log slope {:.4}", s.slope);
    out.csv("scaling.csv", s.rows.iter().map(|r| ScalingRow { n: r.n, median_sup_dist: r.median, slope: s.slope }))?;
    let per_seed = s.rows.iter().flat_map(|r| {
        r.errors.iter().enumerate().map(move |(k, &e)| ChaosRow { n: r.n, seed: cc.base_seed + k as u64, sup_dist: e })
    });
    out.csv("chaos_errors.csv", per_seed)?;
    if cfg.output.emit_svg {
        let pts = s.rows.iter().map(|r| ((r.n as f64).ln(), r.median.ln())).collect();
        let svg = line_plot("median sup distance to the mean field", "log N", "log distance", &[Series { label: "median", points: pts, markers: true }]);
        out.write("scaling.svg", svg.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FixedRow {
    #[serde(rename = "A")]
    a: f64,
    g_sigmoid: f64,
    g_heaviside: f64,
}

#[derive(Serialize)]
struct CrossingRow {
    kind: &'static str,
    amplitude: f64,
}

const FIXED_KAPPA: f64 = 0.1;
const FIXED_RHO: f64 = 0.5;

fn figure_fixed(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let sig = FiringFunction::sigmoid(FIXED_KAPPA, FIXED_RHO).map_err(numerical)?;
    let hv = FiringFunction::heaviside(FIXED_RHO);
    let m = resolution_for_kappa(FIXED_KAPPA);
    let rows: Vec<FixedRow> = (0..=500)
        .map(|k| {
            let a = 2.5 * k as f64 / 500.0;
            FixedRow { a, g_sigmoid: fixed_point_map(&sig, a, m), g_heaviside: fixed_point_map(&hv, a, m) }
        })
        .collect();
    let mut crossings = vec![CrossingRow { kind: "sigmoid", amplitude: 0.0 }];
    crossings.extend(fixed_points(&sig, m).into_iter().map(|amplitude| CrossingRow { kind: "sigmoid", amplitude }));
    let (zero, minus, plus) = heaviside_fixed_points(FIXED_RHO).map_err(numerical)?;
    crossings.extend([zero, minus, plus].map(|amplitude| CrossingRow { kind: "heaviside", amplitude }));
    for c in &crossings {
        println!("{:9} fixed point A = {:.7}", c.kind, c.amplitude);
    }
    if cfg.output.emit_svg {
        let series = [
            Series { label: "G sigmoid", points: rows.iter().map(|r| (r.a, r.g_sigmoid)).collect(), markers: false },
            Series { label: "G Heaviside", points: rows.iter().map(|r| (r.a, r.g_heaviside)).collect(), markers: false },
            Series { label: "A", points: vec![(0.0, 0.0), (2.5, 2.5)], markers: false },
            Series { label: "fixed points", points: crossings.iter().map(|c| (c.amplitude, c.amplitude)).collect(), markers: true },
        ];
        out.write("fixed.svg", line_plot("fixed points of G", "A", "G(A)", &series).as_bytes())?;
    }
    out.csv("fixed.csv", rows)?;
    out.csv("crossings.csv", crossings)
}

const FIGURE_N: usize = 500;
const FIGURE_KAPPA: f64 = 0.05;
const FIGURE_RHO: f64 = 0.5;

#[derive(Serialize)]
struct FigureTrackRow {
    t: f64,
    dist_to_manifold: f64,
    l2_norm: f64,
    variational_phase: f64,
}

fn network_figure(cfg: &RunConfig, out: &mut OutputDir, name: &str, profile: InitialProfile, t_end: f64) -> Result<(), CliError> {
    let f = FiringFunction::sigmoid(FIGURE_KAPPA, FIGURE_RHO).map_err(numerical)?;
    let sol = solve_amplitude(&f, Branch::Largest).map_err(numerical)?;
    let params = network_params(FIGURE_N, f, &profile, sol.amplitude, cfg.sim.seed)?;
    let dt = cfg.sim.snapshot_dt.min(t_end / 100.0);
    let (snaps, params) = run_network(cfg, out, &format!("{name}_"), params, t_end, dt)?;
    let rows: Vec<FigureTrackRow> = snaps
        .iter()
        .map(|s| {
            let p = params.profile_at(s);
            FigureTrackRow {
                t: s.t,
                dist_to_manifold: manifold_distance(&p, &sol),
                l2_norm: p.l2_distance_to(|_| 0.0),
                variational_phase: variational_phase(&p, &sol).unwrap_or(f64::NAN),
            }
        })
        .collect();
    let t0 = burn_in_time(FIGURE_N, TraceOptions::default().burn_in);
    // NaN when the run ends before the burn-in time
    let sup = rows.iter().filter(|r| r.t >= t0).map(|r| r.dist_to_manifold).reduce(f64::max).unwrap_or(f64::NAN);
    let last = rows.last().expect("snapshots");
    let radius = sol.amplitude * PI.sqrt();
    println!("final norm {:.4} ({:.3} of A sqrt(pi)); sup distance after t = {t0:.1}: {sup:.4}", last.l2_norm, last.l2_norm / radius);
    let summary = [
        Quantity { quantity: "amplitude", value: sol.amplitude },
        Quantity { quantity: "burn_in", value: t0 },
        Quantity { quantity: "sup_dist_after_burn_in", value: sup },
        Quantity { quantity: "final_l2_norm", value: last.l2_norm },
        Quantity { quantity: "final_norm_over_bump_norm", value: last.l2_norm / radius },
    ];
    out.csv(&format!("{name}_track.csv"), rows)?;
    out.csv(&format!("{name}_summary.csv"), summary)
}
