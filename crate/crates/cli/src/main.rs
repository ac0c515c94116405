use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use darboux::verify::{Fault, Suite};
use darboux_cli::config::Format;
use darboux_cli::{execute, Action, Invocation, RTOL_ENV};

/// Euler-Darboux Goursat solver: field grids, near-diagonal expansions,
/// Weyl scalars and self-checks.
#[derive(Parser)]
#[command(name = "darboux", version)]
struct Cli {
    /// Run configuration (flat `section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,
    /// Worker threads for grid rows and abscissae.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved; every algorithm is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solution value, gradient and V_xy on a grid.
    Evaluate,
    /// Near-diagonal expansion coefficients, optionally evaluated at eps values.
    Expand,
    /// Weyl scalars near the diagonal, direct and/or from the series.
    Weyl,
    /// Run the self-check suites and emit a JSON report.
    Verify {
        #[arg(long, value_parser = parse_suite)]
        suite: Option<Suite>,
        /// Deliberate corruption for checking the checks (c1_sign).
        #[arg(long, value_parser = parse_fault)]
        fault: Option<Fault>,
    },
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: darboux::Error| e.to_string())
}

fn parse_fault(s: &str) -> Result<Fault, String> {
    s.parse().map_err(|e: darboux::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.seed;
    let action = match cli.command {
        Command::Evaluate => Action::Evaluate,
        Command::Expand => Action::Expand,
        Command::Weyl => Action::Weyl,
        Command::Verify { suite, fault } => Action::Verify { suite, fault },
    };
    let inv = Invocation {
        action,
        config: cli.config,
        out: cli.out,
        format: cli.format,
        rtol_override: std::env::var(RTOL_ENV).ok(),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| execute(&inv)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
