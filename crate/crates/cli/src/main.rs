use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use meuq::config::RunConfig;
use meuq::experiment::{errors_row, run, write_outputs, ERRORS_HEADER};

#[derive(Parser)]
#[command(name = "meuq", version, about = "Multi-element stochastic Galerkin solvers for the uncertain Euler equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more experiments.
    Run {
        /// Experiment config (TOML). Repeat to run several in sequence.
        #[arg(long, required = true)]
        config: Vec<PathBuf>,
        /// Output directory; overrides `[output] directory`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads for the cell-parallel loops.
        #[arg(long, env = "MEUQ_THREADS")]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            output,
            threads,
        } => match run_all(&config, output.as_deref(), threads) {
            Ok(()) => ExitCode::SUCCESS,
            Err(msg) => {
                eprintln!("meuq: {msg}");
                ExitCode::FAILURE
            }
        },
    }
}

fn run_all(paths: &[PathBuf], output: Option<&Path>, threads: Option<usize>) -> Result<(), String> {
    if let Some(n) = threads {
        if n == 0 {
            return Err("--threads must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let configs = paths
        .iter()
        .map(|p| RunConfig::from_path(p).map(|c| (p, c)).map_err(|e| format!("{}: {e}", p.display())))
        .collect::<Result<Vec<_>, _>>()?;
    for (path, cfg) in &configs {
        let dir = output_dir(path, cfg, output, configs.len() > 1);
        run_one(path, cfg, &dir).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

/// Several configs sharing one `--output` get a subdirectory each.
fn output_dir(path: &Path, cfg: &RunConfig, output: Option<&Path>, several: bool) -> PathBuf {
    match output {
        Some(dir) if several => dir.join(path.file_stem().unwrap_or_default()),
        Some(dir) => dir.to_path_buf(),
        None => cfg.output.directory.clone(),
    }
}

fn run_one(path: &Path, cfg: &RunConfig, dir: &Path) -> Result<(), Box<dyn std::error::Error>> {
    eprintln!("meuq: running {} ({}, {} cells)", path.display(), cfg.method, cfg.grid.nx);
    let outcome = run(cfg)?;
    let written = write_outputs(cfg, &outcome, dir)?;
    let errors = dir.join(&cfg.output.errors);
    let fresh = !errors.exists();
    let mut file = OpenOptions::new().create(true).append(true).open(&errors)?;
    if fresh {
        writeln!(file, "{ERRORS_HEADER}")?;
    }
    writeln!(file, "{}", errors_row(cfg, &outcome))?;
    println!("{}", written.report.display());
    Ok(())
}
