//! Result files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::Format;
use crate::error::CliError;
use crate::record::ResultRecord;

pub const RESULTS_FILE: &str = "results.json";
pub const PHASES_FILE: &str = "phases.csv";
pub const POINTS_FILE: &str = "points.csv";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write(path: PathBuf, body: String) -> Result<PathBuf, CliError> {
    fs::write(&path, body).map_err(io_err(&path))?;
    Ok(path)
}

/// Writes `results.json`, plus `phases.csv` when the task produced an
/// `s`-sweep and `points.csv` for the csv format.
pub fn write_outputs(dir: &Path, rec: &ResultRecord, format: Format) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut json = serde_json::to_string_pretty(rec).expect("record serializes");
    json.push('\n');
    let mut written = vec![write(dir.join(RESULTS_FILE), json)?];
    if !rec.plot.is_empty() {
        let mut csv = String::from("s,phase_rev,kappa_re,kappa_im\n");
        for r in &rec.plot {
            writeln!(csv, "{},{},{},{}", r.s, r.phase_rev, r.kappa_re, r.kappa_im).unwrap();
        }
        written.push(write(dir.join(PHASES_FILE), csv)?);
    }
    if format == Format::Csv && !rec.points.is_empty() {
        let mut csv = String::from("theta,phi,phase_rev,kappa_re,kappa_im\n");
        for p in &rec.points {
            writeln!(csv, "{},{},{},{},{}", p.theta, p.phi, p.phase_rev, p.kappa_re, p.kappa_im).unwrap();
        }
        written.push(write(dir.join(POINTS_FILE), csv)?);
    }
    Ok(written)
}
