use std::fs::OpenOptions;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// One spike. `neuron` is zero-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeEvent {
    pub time: f64,
    pub neuron: usize,
}

#[derive(Debug, Clone, PartialEq)]
struct Spill {
    cap: usize,
    path: PathBuf,
    started: bool,
}

/// Append-only event log, optionally spilling to a CSV file (`time,neuron`
/// with one-based neuron indices) once `cap` events are held in memory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    events: Vec<SpikeEvent>,
    total: usize,
    spill: Option<Spill>,
}

impl EventLog {
    pub fn with_spill(cap: usize, path: PathBuf) -> Self {
        Self { events: Vec::new(), total: 0, spill: Some(Spill { cap: cap.max(1), path, started: false }) }
    }

    pub fn push(&mut self, e: SpikeEvent) -> std::io::Result<()> {
        self.events.push(e);
        self.total += 1;
        if matches!(&self.spill, Some(s) if self.events.len() >= s.cap) {
            self.flush()?;
        }
        Ok(())
    }

    /// Writes in-memory events to the spill file, if any.
    pub fn flush(&mut self) -> std::io::Result<()> {
        let Some(spill) = self.spill.as_mut() else { return Ok(()) };
        let file = OpenOptions::new().create(true).append(spill.started).write(true).truncate(!spill.started).open(&spill.path)?;
        let mut w = BufWriter::new(file);
        if !spill.started {
            writeln!(w, "time,neuron")?;
            spill.started = true;
        }
        for e in &self.events {
            writeln!(w, "{},{}", e.time, e.neuron + 1)?;
        }
        w.flush()?;
        self.events.clear();
        Ok(())
    }

    pub fn in_memory(&self) -> &[SpikeEvent] {
        &self.events
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn spill_path(&self) -> Option<&Path> {
        self.spill.as_ref().map(|s| s.path.as_path())
    }
}
