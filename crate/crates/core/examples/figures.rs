//! Writes the three figure recipes (CSV, SVG, manifest) under a directory.
//!
//! cargo run --release --example figures -- [directory]

use ringbumps::cli::{run, Command, FigureKind, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    for (name, which) in [("fixed", FigureKind::Fixed), ("wandering1", FigureKind::Wandering1), ("wandering3", FigureKind::Wandering3)] {
        let mut cfg = RunConfig::default();
        cfg.output.directory = root.join(name);
        let manifest = run(&Command::Figure { which }, &cfg)?;
        for a in &manifest.artifacts {
            println!("  {}/{}", cfg.output.directory.display(), a.file);
        }
    }
    Ok(())
}
