//! Time series and their CSV form.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::config::Backend;

pub const CSV_HEADER: [&str; 9] = ["t", "value", "stderr", "backend", "model", "n", "t2", "shots", "seed"];
pub const DIAGNOSTICS_HEADER: [&str; 7] = ["t", "backend", "model", "n", "t2", "fidelity", "leakage"];

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub backend: Backend,
    pub model: String,
    pub steps: usize,
    pub t2: Option<f64>,
    pub shots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    /// Dimensionless time.
    pub t: f64,
    pub value: f64,
    /// Standard error of a sampled estimate.
    pub stderr: Option<f64>,
    /// Fidelity of the backend's state to the noiseless circuit's state.
    pub fidelity: Option<f64>,
    /// Population outside the device's computational subspace.
    pub leakage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub meta: SeriesMeta,
    pub points: Vec<SeriesPoint>,
}

impl TimeSeries {
    pub fn new(meta: SeriesMeta) -> Self {
        Self { meta, points: vec![] }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Checks that times increase strictly and that a standard error is
    /// present exactly when the series was sampled.
    pub fn validate(&self) -> Result<()> {
        if self.points.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::InvalidState("series times are not strictly increasing".into()));
        }
        let sampled = self.meta.shots > 0;
        if self.points.iter().any(|p| p.stderr.is_some() != sampled) {
            return Err(Error::InvalidState(format!(
                "standard errors must be {} for shots = {}",
                if sampled { "present" } else { "absent" },
                self.meta.shots
            )));
        }
        Ok(())
    }

    /// `max_k |a_k - b_k|` over a common grid.
    pub fn max_abs_diff(&self, other: &TimeSeries) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| (a.value - b.value).abs())
            .fold(0.0, f64::max))
    }

    /// Mean of the per-point fidelities, if every point has one.
    pub fn mean_fidelity(&self) -> Option<f64> {
        let f: Option<Vec<f64>> = self.points.iter().map(|p| p.fidelity).collect();
        let f = f?;
        (!f.is_empty()).then(|| f.iter().sum::<f64>() / f.len() as f64)
    }

    pub fn max_leakage(&self) -> Option<f64> {
        self.points.iter().filter_map(|p| p.leakage).reduce(f64::max)
    }
}

/// `f64` as its shortest round-trip decimal, `inf` for infinity.
fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn write_rows<W: Write>(w: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(&r)?;
    }
    out.flush()?;
    Ok(())
}

/// One row per point, series in the given order, under [`CSV_HEADER`].
pub fn write_csv_to<W: Write>(w: W, series: &[TimeSeries]) -> Result<()> {
    let rows = series.iter().flat_map(|s| {
        let m = &s.meta;
        s.points.iter().map(move |p| {
            vec![
                num(p.t),
                num(p.value),
                opt(p.stderr),
                m.backend.to_string(),
                m.model.clone(),
                m.steps.to_string(),
                opt(m.t2),
                m.shots.to_string(),
                m.seed.to_string(),
            ]
        })
    });
    write_rows(w, &CSV_HEADER, rows)
}

pub fn write_csv(series: &[TimeSeries], path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_csv_to(std::io::BufWriter::new(f), series)
}

/// Per-point fidelity and leakage under [`DIAGNOSTICS_HEADER`].
pub fn write_diagnostics_to<W: Write>(w: W, series: &[TimeSeries]) -> Result<()> {
    let rows = series.iter().flat_map(|s| {
        let m = &s.meta;
        s.points.iter().map(move |p| {
            vec![
                num(p.t),
                m.backend.to_string(),
                m.model.clone(),
                m.steps.to_string(),
                opt(m.t2),
                opt(p.fidelity),
                opt(p.leakage),
            ]
        })
    });
    write_rows(w, &DIAGNOSTICS_HEADER, rows)
}

pub fn write_diagnostics(series: &[TimeSeries], path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_diagnostics_to(std::io::BufWriter::new(f), series)
}

/// `<stem>.diag.csv` next to a CSV output path.
pub fn diagnostics_path(csv: &Path) -> std::path::PathBuf {
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("series");
    csv.with_file_name(format!("{stem}.diag.csv"))
}
