use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

/// Provenance block written at the head of every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest<A: Serialize> {
    pub command: &'static str,
    pub args: A,
    pub seed: u64,
    pub version: &'static str,
    pub duration_secs: f64,
    /// Total-variation budget of the limit truncation, where one applies.
    pub tv_truncation_bound: Option<f64>,
}

/// The JSON document. Everything after `manifest` is the data section and
/// is reproduced byte for byte by a rerun with the same arguments.
#[derive(Debug, Serialize)]
pub struct Report<A: Serialize, S: Serialize> {
    pub manifest: RunManifest<A>,
    pub d: usize,
    pub pmf: Vec<f64>,
    pub se: Vec<f64>,
    pub tv_truncation_bound: Option<f64>,
    pub stats: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub fn sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    w.flush()
}

/// Header line, then one comma-joined row per entry.
pub fn write_csv(w: &mut dyn Write, header: &str, rows: impl IntoIterator<Item = String>) -> io::Result<()> {
    writeln!(w, "{header}")?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush()
}

pub fn pmf_rows(pmf: &[f64], se: &[f64]) -> Vec<String> {
    pmf.iter().zip(se).enumerate().map(|(k, (p, s))| format!("{k},{p},{s}")).collect()
}
