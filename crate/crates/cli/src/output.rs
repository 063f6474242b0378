//! CSV and manifest emission.
//!
//! All CSV files are headered; floating-point columns are printed with 17
//! significant digits so files round-trip to the in-memory values exactly
//! (up to the usual decimal/binary conversion, < 1 ulp).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;

/// Units convention recorded in every manifest.
pub const UNITS: &str =
    "eps/delta/J in GHz; time in ns; dynamics uses energy/hbar = 2*pi*f rad/ns";

/// 17-significant-digit decimal rendering of a float.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a headered CSV file and records it in `written`.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: impl IntoIterator<Item = String>,
    written: &mut Vec<String>,
) -> Result<PathBuf> {
    let mut body = String::from(header);
    body.push('\n');
    for row in rows {
        body.push_str(&row);
        body.push('\n');
    }
    let path = dir.join(name);
    fs::write(&path, body)?;
    written.push(name.to_string());
    Ok(path)
}

/// Reproducibility record written next to the data files.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    /// Fully resolved configuration; re-running it reproduces every output
    /// file bit-identically (the manifest itself carries the wall clock).
    pub config: ExperimentConfig,
    pub version: String,
    pub units: String,
    pub duration_seconds: f64,
    /// Every data file emitted by the run.
    pub outputs: Vec<String>,
    /// Degeneracy flags and accuracy notices raised during the run.
    pub warnings: Vec<String>,
    /// Scalar summary quantities (fit parameters, drift, fidelity, ...).
    pub stats: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self)
            .expect("manifest serialization cannot fail");
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Parses a float column back from an emitted CSV (used by round-trip
/// tests and downstream tooling).
pub fn parse_csv_column(text: &str, column: usize) -> Vec<f64> {
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .nth(column)
                .expect("column present")
                .parse::<f64>()
                .expect("numeric column")
        })
        .collect()
}
