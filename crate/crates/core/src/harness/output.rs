use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ExperimentConfig, Peak, Series};
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;

/// What a command produced; any part may be empty.
#[derive(Clone, Debug, Default)]
pub struct Outputs {
    pub rows: Vec<MetricsReport>,
    pub series: Vec<Series>,
    pub peaks: Vec<Peak>,
}

fn csv_bytes<T: Serialize>(records: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)
            .map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| Error::Config(format!("csv: {e}")))
}

pub fn write_results_csv(rows: &[MetricsReport]) -> Result<Vec<u8>> {
    if rows.is_empty() {
        // Header only.
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(MetricsReport::default())
            .map_err(|e| Error::Config(format!("csv: {e}")))?;
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Config(format!("csv: {e}")))?;
        let header_end = bytes
            .iter()
            .position(|&b| b == b'\n')
            .map_or(bytes.len(), |i| i + 1);
        return Ok(bytes[..header_end].to_vec());
    }
    csv_bytes(rows)
}

#[derive(Serialize)]
struct SeriesRow {
    x: f64,
    links_saved_pct: f64,
}

pub fn write_series_csv(series: &Series) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record([series.parameter.as_str(), "links_saved_pct"])
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    for p in &series.points {
        w.serialize(SeriesRow {
            x: p.x,
            links_saved_pct: p.links_saved_pct,
        })
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| Error::Config(format!("csv: {e}")))
}

#[derive(Serialize)]
struct Manifest<'a> {
    format: u32,
    generator: &'static str,
    version: &'static str,
    seed: u64,
    config: &'a ExperimentConfig,
    files: Vec<String>,
    rows: usize,
    error_rows: usize,
    invalid_points: Vec<InvalidPoint<'a>>,
}

#[derive(Serialize)]
struct InvalidPoint<'a> {
    series: &'a str,
    x: f64,
    error: &'a str,
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<PathBuf> {
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `results.csv` (when there are rows), one `series_<name>.csv` per
/// sweep, `series_peaks.csv` (when there are peaks) and `manifest.json`.
/// Nothing time-dependent is written, so equal inputs give equal bytes.
pub fn emit_outputs(out: &Outputs, config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    if !out.rows.is_empty() {
        written.push(write(
            dir.join("results.csv"),
            &write_results_csv(&out.rows)?,
        )?);
    }
    for s in &out.series {
        written.push(write(
            dir.join(format!("series_{}.csv", s.name)),
            &write_series_csv(s)?,
        )?);
    }
    if !out.peaks.is_empty() {
        written.push(write(
            dir.join("series_peaks.csv"),
            &csv_bytes(&out.peaks)?,
        )?);
    }
    let manifest = Manifest {
        format: 1,
        generator: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
        config,
        files: written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
        rows: out.rows.len(),
        error_rows: out.rows.iter().filter(|r| r.is_error()).count(),
        invalid_points: out
            .series
            .iter()
            .flat_map(|s| {
                s.invalid.iter().map(move |(x, e)| InvalidPoint {
                    series: &s.name,
                    x: *x,
                    error: e,
                })
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest: {e}")))?;
    written.push(write(dir.join("manifest.json"), json.as_bytes())?);
    Ok(written)
}
