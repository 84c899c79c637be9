use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hilfer::exec::init_threads_from_env;
use hilfer::harness::{converge, run, verify, Scenario, Suite};
use hilfer::{Error, Exec};

/// Mild solutions of Hilfer fractional Cauchy problems with nonlocal conditions.
///
/// The worker thread count is read from HILFER_THREADS.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and write the trajectory CSV and residual report.
    Run {
        /// Scenario file, or the builtin name `example-sec5`.
        #[arg(long)]
        config: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a property suite: specfun, fracops, operators, solver, harness or all.
    Verify {
        #[arg(long)]
        suite: String,
    },
    /// Refinement study: doubles the node count per level.
    Converge {
        #[arg(long)]
        config: String,
        #[arg(long)]
        levels: usize,
    },
}

const VERIFY_FAILED: u8 = 1;
const NOT_CONVERGED: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Parse { .. } | Error::Usage(_) | Error::Io(_) => 2,
        Error::Divergence { .. } => NOT_CONVERGED,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads_from_env();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn execute(command: Command) -> hilfer::Result<u8> {
    match command {
        Command::Run { config, out } => {
            let scenario = Scenario::load(&config)?;
            let art = run(&scenario, &out, Exec::default())?;
            let r = &art.report;
            println!("scenario {} (config {})", scenario.name, &art.config_hash[..12]);
            println!(
                "converged={} iterations={} update={:.3e} residual={:.3e} tail={:.3e}",
                r.converged,
                r.iterations_used,
                r.final_update_norm,
                r.volterra_residual_weighted,
                r.modal_tail_estimate
            );
            for w in &r.warnings {
                println!("warning: {w}");
            }
            println!("wrote {} and {}", art.csv_path.display(), art.report_path.display());
            Ok(if r.converged { 0 } else { NOT_CONVERGED })
        }
        Command::Verify { suite } => {
            let report = verify(suite.parse::<Suite>()?);
            println!("{report}");
            Ok(if report.passed() { 0 } else { VERIFY_FAILED })
        }
        Command::Converge { config, levels } => {
            let scenario = Scenario::load(&config)?;
            let table = converge(&scenario, levels, Exec::default())?;
            print!("{table}");
            let orders = table.residual_orders();
            println!("residual orders: {}", orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>().join(" "));
            if let Some(eo) = table.error_orders() {
                println!("error orders: {}", eo.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>().join(" "));
            }
            println!("monotone residual decrease: {}", table.monotone());
            Ok(if table.rows.iter().all(|r| r.converged) { 0 } else { NOT_CONVERGED })
        }
    }
}
