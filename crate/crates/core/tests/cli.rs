use std::path::Path;

use ringbumps::cli::{main_with_args, run, Command, FigureKind, Manifest, RunConfig};

fn config(dir: &Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.model.n = 60;
    cfg.sim.t_end = 80.0;
    cfg.sweep.n_replicas = 6;
    cfg.output.directory = dir.to_path_buf();
    cfg
}

fn assert_rectangular(path: &Path) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let width = rdr.headers().unwrap().len();
    assert!(width > 0);
    for rec in rdr.records() {
        assert_eq!(rec.unwrap().len(), width, "{}", path.display());
    }
}

fn csv_hashes(m: &Manifest) -> Vec<(String, String)> {
    m.artifacts.iter().filter(|a| a.file.ends_with(".csv")).map(|a| (a.file.clone(), a.sha256.clone())).collect()
}

#[test]
fn reruns_and_thread_counts_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut hashes = Vec::new();
    for (k, threads) in [1, 1, 4].into_iter().enumerate() {
        let mut cfg = config(&dir.path().join(format!("run{k}")));
        cfg.sweep.parallelism = threads;
        let m = run(&Command::PhaseDiffusion, &cfg).unwrap();
        for a in &m.artifacts {
            if a.file.ends_with(".csv") {
                assert_rectangular(&cfg.output.directory.join(&a.file));
            }
        }
        hashes.push(csv_hashes(&m));
    }
    assert_eq!(hashes[0], hashes[1]);
    assert_eq!(hashes[0], hashes[2]);
    assert!(hashes[0].iter().any(|(f, _)| f == "traces.csv"));
}

#[test]
fn every_subcommand_writes_rectangular_csv() {
    let dir = tempfile::tempdir().unwrap();
    let commands = [
        Command::Stationary,
        Command::Spectrum,
        Command::Nfe,
        Command::Simulate,
        Command::Chaos,
        Command::Figure { which: FigureKind::Fixed },
        Command::Figure { which: FigureKind::Wandering3 },
    ];
    for (k, c) in commands.iter().enumerate() {
        let mut cfg = config(&dir.path().join(format!("c{k}")));
        cfg.sim.t_end = 5.0;
        cfg.chaos.ns = vec![30, 60];
        cfg.sweep.n_replicas = 3;
        let m = run(c, &cfg).unwrap();
        assert!(!m.artifacts.is_empty(), "{}", c.name());
        for a in &m.artifacts {
            let path = cfg.output.directory.join(&a.file);
            assert!(path.is_file());
            if a.file.ends_with(".csv") {
                assert_rectangular(&path);
            }
        }
        assert!(cfg.output.directory.join("manifest.toml").is_file());
    }
}

#[test]
fn simulate_writes_declared_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    run(&Command::Simulate, &cfg).unwrap();
    let header = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header("events.csv"), "time,neuron");
    assert_eq!(header("snapshots.csv"), "t,i,U");
    let rows = csv::Reader::from_path(dir.path().join("snapshots.csv")).unwrap().records().count();
    assert_eq!(rows, 60 * 81);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(main_with_args(["ringbumps", "stationary", "--out", out]), 0);
    assert_eq!(main_with_args(["ringbumps", "no-such-command"]), 2);
    assert_eq!(main_with_args(["ringbumps", "stationary", "--kappa", "-1", "--out", out]), 2);
    assert_eq!(main_with_args(["ringbumps", "simulate", "--init", "file", "--out", out]), 2);
    assert_eq!(main_with_args(["ringbumps", "stationary", "--rho-threshold", "0.999", "--kappa", "0.5", "--out", out]), 3);
    let blocked = dir.path().join("file");
    std::fs::write(&blocked, "x").unwrap();
    let inside = blocked.join("sub");
    assert_eq!(main_with_args(["ringbumps", "stationary", "--out", inside.to_str().unwrap()]), 3);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(&dir.path().join("out"));
    cfg.sim.seed = 77;
    let path = dir.path().join("run.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    let code = main_with_args(["ringbumps", "--config", path.to_str().unwrap(), "stationary", "--kappa", "0.1"]);
    assert_eq!(code, 0);
    let m: Manifest = toml::from_str(&std::fs::read_to_string(dir.path().join("out/manifest.toml")).unwrap()).unwrap();
    assert_eq!(m.seed, 77);
    let text = std::fs::read_to_string(dir.path().join("out/stationary.csv")).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("0.1,"));
}
