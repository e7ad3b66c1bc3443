//! Command-line front end for the split equality fixed-point solvers.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sefpp::TerminationReason;
use sefpp_cli::{config, export, tables};

#[derive(Parser)]
#[command(name = "sefpp", version, about = "Split equality fixed-point solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem described by a config file and export the trace.
    ///
    /// Exits 0 when the run converged, 1 on a config or I/O error, 2 when
    /// the iteration budget ran out, 3 on a numerical failure.
    Run { config: PathBuf },
    /// Parse a config file and report whether it describes a valid run.
    Validate { config: PathBuf },
    /// Re-run a stored reference table and compare against its pinned values.
    ///
    /// Exits 0 when every pinned value is within tolerance (or the table
    /// ships without pinned checks), 1 on a mismatch.
    ReproduceTables {
        /// Table id.
        #[arg(value_parser = clap::value_parser!(u64).range(1..=2))]
        id: u64,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config } => run(&config),
        Command::Validate { config } => validate(&config),
        Command::ReproduceTables { id } => reproduce_tables(id as usize),
    }
}

fn config_error(e: &anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    ExitCode::from(1)
}

fn run(path: &Path) -> ExitCode {
    let loaded = match config::load_run(path) {
        Ok(loaded) => loaded,
        Err(e) => return config_error(&e),
    };
    let trace = match sefpp::solve(&loaded.problem, &loaded.solver) {
        Ok(trace) => trace,
        // Pre-flight rejections (schedule rules, missing Lipschitz
        // declarations, weight ranges) count as config errors.
        Err(e) => return config_error(&e.into()),
    };
    for warning in &trace.warnings {
        eprintln!("warning: {warning}");
    }

    let rows = export::select_rows(&trace, loaded.output.log_every_k);
    let out_path = export::resolve_out_path(&loaded.output.path);
    if let Err(e) = export::write_rows(&out_path, loaded.output.format, &rows) {
        return config_error(&e);
    }

    let last = trace.final_record();
    println!(
        "trace: {} of {} records written to {}",
        rows.len(),
        trace.len(),
        out_path.display()
    );
    println!(
        "final residuals at n={}: coupling {:.6e}, fix_x {:.6e}, fix_y {:.6e}",
        last.n, last.coupling_residual, last.fix_residual_x, last.fix_residual_y
    );
    match trace.termination {
        TerminationReason::Converged => {
            println!("converged within tolerance");
            ExitCode::SUCCESS
        }
        TerminationReason::MaxIterations => {
            println!("stopped: iteration budget exhausted before convergence");
            ExitCode::from(2)
        }
        TerminationReason::NumericalFailure => {
            let detail = trace.failure_detail.as_deref().unwrap_or("no detail");
            println!("stopped: numerical failure ({detail})");
            ExitCode::from(3)
        }
    }
}

fn validate(path: &Path) -> ExitCode {
    match config::load_run(path) {
        Ok(loaded) => {
            println!("ok: {} describes a valid run", path.display());
            println!("  {}", loaded.summary);
            ExitCode::SUCCESS
        }
        Err(e) => config_error(&e),
    }
}

fn reproduce_tables(id: usize) -> ExitCode {
    match tables::run_and_render(id) {
        Ok((report, passed)) => {
            print!("{report}");
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => config_error(&e),
    }
}
