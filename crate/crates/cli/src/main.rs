//! `uncbench`: scenario reports, parameter sweeps, saturation and violation
//! searches, and the built-in verification suite.
//!
//! Exit codes: 0 success, 1 certified violation (`search`) or failed checks
//! (`selftest`), 2 input or schema errors. Negative margins in reports are
//! data, never failures.

use uncbench::run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "uncbench", version, about = "Uncertainty-bound workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every applicable bound for one scenario file.
    Report {
        /// Scenario JSON file.
        spec: PathBuf,
        /// Output path for the run record (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sweep one scenario parameter and write margin curves as CSV.
    Sweep {
        /// Sweep JSON file (scenario plus one parameter range).
        spec: PathBuf,
        /// Output CSV path.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run a saturation or violation search from a search spec.
    Search {
        /// Search JSON file.
        spec: PathBuf,
        /// Output path for the search record (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Seed for the deterministic search streams.
        #[arg(long)]
        seed: u64,
    },
    /// Run the full invariant and scenario suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn tol_scale_from_env() -> Result<f64, String> {
    match std::env::var("UNCBENCH_TOL_SCALE") {
        Ok(raw) => {
            let value: f64 = raw
                .trim()
                .parse()
                .map_err(|_| format!("UNCBENCH_TOL_SCALE: not a number: `{raw}`"))?;
            if !value.is_finite() || value <= 0.0 {
                return Err(format!(
                    "UNCBENCH_TOL_SCALE: must be finite and positive, got {value}"
                ));
            }
            Ok(value)
        }
        Err(std::env::VarError::NotPresent) => Ok(1.0),
        Err(e) => Err(format!("UNCBENCH_TOL_SCALE: {e}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol_scale = match tol_scale_from_env() {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Report { spec, output } => run::cmd_report(spec, output.as_ref(), tol_scale),
        Command::Sweep { spec, output } => run::cmd_sweep(spec, output, tol_scale),
        Command::Search { spec, output, seed } => {
            run::cmd_search(spec, output.as_ref(), *seed, tol_scale)
        }
        Command::Selftest { seed } => run::cmd_selftest(*seed, tol_scale),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
