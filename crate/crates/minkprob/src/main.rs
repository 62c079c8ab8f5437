use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use minkprob::commands::{self, Command, Context};
use minkprob::io::Outputs;
use minkprob::{CliError, CliResult};

/// Discrete Minkowski problems in the Klein ball and on hyperbolic surfaces.
#[derive(Debug, Parser)]
#[command(name = "minkprob", version)]
struct Cli {
    /// Problem spec (JSON).
    #[arg(long, global = true, conflicts_with = "preset")]
    spec: Option<PathBuf>,
    /// Built-in problem spec by name.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Solver tolerance, overriding the spec.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write SVG heat maps.
    #[arg(long, global = true)]
    plots: bool,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "MINKPROB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let mut problem = commands::load_problem(cli.spec.as_deref(), cli.preset.as_deref(), cli.seed)?;
    if let Some(t) = cli.tol {
        problem.spec.tol = Some(t);
    }
    let mut ctx = Context {
        problem,
        out: Outputs::create(&cli.out)?,
        plots: cli.plots,
    };
    commands::run(&cli.command, &mut ctx)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("minkprob: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
