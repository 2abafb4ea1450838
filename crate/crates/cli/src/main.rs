//! `mhd-vem` command-line front end.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Options, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "mhd-vem", version, about = "Virtual element solver for stationary incompressible MHD")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rate table for the manufactured solution on a refined mesh family
    Convergence(Options),
    /// Hartmann channel flow: sampled profiles against the analytic solution
    Hartmann(Options),
    /// Manufactured solution on a single mesh
    Solve(Options),
    /// Mesh counts, size and regularity
    MeshInfo(Options),
}

type Handler = fn(&RunConfig, &mut dyn Write) -> Result<(), CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (handler, options): (Handler, Options) = match cli.command {
        Command::Convergence(o) => (commands::convergence, o),
        Command::Hartmann(o) => (commands::hartmann, o),
        Command::Solve(o) => (commands::solve, o),
        Command::MeshInfo(o) => (commands::mesh_info, o),
    };
    let cfg = RunConfig::from_options(options.resolve()?)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let mut buf = Vec::new();
    pool.install(|| handler(&cfg, &mut buf))?;
    let mut out = std::io::stdout().lock();
    out.write_all(&buf).and_then(|()| out.flush()).map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            return fail(CliError::Usage(first_line(&e.to_string())));
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn first_line(s: &str) -> String {
    s.lines().next().unwrap_or_default().trim_start_matches("error: ").to_string()
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error[{}]: {}", e.tag(), first_line(&e.to_string()));
    ExitCode::from(e.exit_code())
}
