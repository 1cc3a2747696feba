use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pilotwave::experiments::{check_suite, list_models_json, list_models_text, run_scenario, CheckContext, CheckRegistry};

/// De Broglie-Bohm trajectory simulator.
#[derive(Parser, Debug)]
#[command(name = "pilotwave", version, about)]
struct Cli {
    /// Worker threads for ensemble propagation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for CSV, JSON and SVG artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the scenario's sampling seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario file and its monitors.
    Simulate { scenario: PathBuf },
    /// Run the invariant battery and print claim, status, measured value and threshold.
    Check {
        /// Test hook: bias added to the guidance velocity (must make checks fail).
        #[arg(long, hide = true, default_value_t = 0.0)]
        bias: f64,
    },
    /// List the catalogue of state constructors.
    ListModels {
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match cli.command {
        Command::Simulate { scenario } => match run_scenario(&scenario, &cli.out, cli.seed) {
            Ok(outcome) => {
                for m in &outcome.monitors {
                    eprintln!(
                        "{:<26} {:<4} measured {:.6e} threshold {:.6e}  {}",
                        m.monitor,
                        if m.passed { "pass" } else { "FAIL" },
                        m.measured,
                        m.threshold,
                        m.detail
                    );
                }
                for a in &outcome.artifacts {
                    eprintln!("wrote {}", a.display());
                }
                if outcome.passed() {
                    ExitCode::SUCCESS
                } else {
                    println!("{}", outcome.failures_json());
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Check { bias } => {
            let mut ctx = CheckContext { bias, ..CheckContext::default() };
            if let Some(s) = cli.seed {
                ctx.seed = s;
            }
            match check_suite(&CheckRegistry::standard(), &ctx) {
                Ok(report) => {
                    print!("{}", report.table());
                    if report.all_passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::ListModels { json } => {
            if json {
                println!("{}", list_models_json());
            } else {
                print!("{}", list_models_text());
            }
            ExitCode::SUCCESS
        }
    }
}
