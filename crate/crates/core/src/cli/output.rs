//! CSV tables and the manifest runner.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::cli::config::{ConfigError, Product, RunManifest};
use crate::cycle::{run_cycle, sweep_tau, ModeRecord, SweepRow};

/// Placeholder written in every numeric field of a failed row.
pub const ERROR_MARKER: &str = "error";

pub const SWEEP_HEADER: [&str; 8] = ["variant", "tau", "W", "abs_W", "eta", "P", "Q_in", "Q_out"];
pub const MODES_HEADER: [&str; 9] = [
    "k",
    "gap_h1",
    "gap_h2",
    "Q_in_k",
    "Q_out_k",
    "W_k",
    "engine_mode",
    "frozen_hot",
    "frozen_cold",
];

/// Twelve significant digits in scientific notation; `NaN` and `inf` spelled out.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.11e}")
    }
}

/// Writes sweep rows in the order given.
pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for row in rows {
        let mut record = vec![row.variant.to_string(), format_number(row.tau)];
        match &row.outcome {
            Ok(r) => record.extend([r.w, r.w.abs(), r.eta, r.power, r.q_in, r.q_out].map(format_number)),
            Err(_) => record.extend([ERROR_MARKER; 6].map(String::from)),
        }
        w.write_record(&record)?;
    }
    w.flush()
}

/// Writes the per-mode breakdown of one run.
pub fn write_modes<W: Write>(out: W, modes: &[ModeRecord]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MODES_HEADER)?;
    for m in modes {
        let mut record: Vec<String> = [m.k, m.gap_h1, m.gap_h2, m.q_in, m.q_out, m.w]
            .map(format_number)
            .into();
        record.extend([m.engine_mode, m.frozen_hot, m.frozen_cold].map(|b| b.to_string()));
        w.write_record(&record)?;
    }
    w.flush()
}

/// Failure of a manifest run, mapped onto the process exit status.
#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    /// Some rows failed; the file was still written with error markers.
    Compute {
        path: PathBuf,
        failures: Vec<String>,
    },
    Io {
        path: PathBuf,
        source: io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Compute { .. } => 3,
            RunError::Io { .. } => 4,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "configuration error: {e}"),
            RunError::Compute { path, failures } => {
                write!(f, "{} failed row(s) in {}", failures.len(), path.display())?;
                for m in failures {
                    write!(f, "\n  {m}")?;
                }
                Ok(())
            }
            RunError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let io_err = |source| RunError::Io {
        path: path.to_owned(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    fs::write(path, bytes).map_err(io_err)
}

/// Renders the manifest's table into memory.
pub fn render(manifest: &RunManifest) -> Result<(Vec<u8>, Vec<String>), RunError> {
    manifest.validate()?;
    let mut buf = Vec::new();
    let io_err = |source| RunError::Io {
        path: manifest.output.clone(),
        source,
    };
    let failures = match manifest.product {
        Product::Sweep => {
            let rows =
                sweep_tau(&manifest.config, &manifest.tau_grid, &manifest.variants).map_err(ConfigError::from)?;
            write_sweep(&mut buf, &rows).map_err(io_err)?;
            rows.iter()
                .filter_map(|r| {
                    r.outcome
                        .as_ref()
                        .err()
                        .map(|e| format!("{} at tau = {}: {e}", r.variant, r.tau))
                })
                .collect()
        }
        Product::Modes => {
            let config = manifest
                .config
                .clone()
                .with_variant(manifest.variants[0])
                .with_tau(manifest.tau_grid[0]);
            match run_cycle(&config) {
                Ok(r) => {
                    write_modes(&mut buf, &r.per_mode).map_err(io_err)?;
                    Vec::new()
                }
                Err(e) => {
                    write_modes(&mut buf, &[]).map_err(io_err)?;
                    vec![e.to_string()]
                }
            }
        }
    };
    Ok((buf, failures))
}

/// Runs the manifest and writes its CSV file. Nothing is written when the
/// manifest does not validate.
pub fn run_manifest(manifest: &RunManifest) -> Result<PathBuf, RunError> {
    let (bytes, failures) = render(manifest)?;
    write_file(&manifest.output, &bytes)?;
    if failures.is_empty() {
        Ok(manifest.output.clone())
    } else {
        Err(RunError::Compute {
            path: manifest.output.clone(),
            failures,
        })
    }
}
