//! Run documents, figure presets and CSV output behind the `critical-otto`
//! binary.
//!
//! Exit statuses: 0 success, 2 configuration error, 3 failed rows (the CSV
//! is still written with error markers), 4 I/O error.

pub mod config;
pub mod output;
pub mod presets;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::{parse_config, ConfigError, Product, RunManifest};
pub use output::{format_number, render, run_manifest, write_modes, write_sweep, RunError, ERROR_MARKER};
pub use presets::{default_tau_grid, preset, PRESETS};

#[derive(Debug, Parser)]
#[command(
    name = "critical-otto",
    version,
    about = "Finite-time quantum Otto engines on Ising chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep the ramp duration for every listed variant.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
    /// Per-mode heats of one run of the free-fermion engine.
    Modes {
        config: PathBuf,
        #[arg(long, default_value = "modes.csv")]
        out: PathBuf,
    },
    /// Run a built-in figure preset.
    Preset {
        name: String,
        /// Directory receiving the CSV files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Parse and check a run document without computing anything.
    Validate { config: PathBuf },
}

fn load(path: &Path) -> Result<RunManifest, RunError> {
    let text = fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_owned(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

fn execute(command: Command) -> Result<Vec<String>, RunError> {
    match command {
        Command::Sweep { config, out } => {
            let mut m = load(&config)?;
            m.output = out;
            Ok(vec![run_manifest(&m)?.display().to_string()])
        }
        Command::Modes { config, out } => {
            let mut m = load(&config)?;
            m.output = out;
            m.product = Product::Modes;
            m.validate()?;
            Ok(vec![run_manifest(&m)?.display().to_string()])
        }
        Command::Preset { name, out } => {
            let manifests = preset(&name, &out)?;
            let mut written = Vec::new();
            for m in &manifests {
                written.push(run_manifest(m)?.display().to_string());
            }
            Ok(written)
        }
        Command::Validate { config } => {
            let m = load(&config)?;
            Ok(vec![format!(
                "ok: {} variant(s) x {} duration(s)",
                m.variants.len(),
                m.tau_grid.len()
            )])
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
