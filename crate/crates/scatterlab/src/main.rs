use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use scatterlab::config::Task;
use scatterlab::run::Status;
use scatterlab::{artifacts, run, threads_from_env, AppError, RunConfig, RunOutput, THREADS_ENV};

#[derive(Parser)]
#[command(
    name = "scatterlab",
    version,
    about = "Scattering energy of domains: identities, inequalities and reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured tasks and write the report.
    Run {
        config: PathBuf,
        /// Output directory (default: `output.dir` from the config, else `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Boundary refinement level: `n_boundary · 2^level` nodes.
        #[arg(long, default_value_t = 0)]
        level: u32,
    },
    /// Convergence study over doubling boundary resolutions.
    Converge {
        config: PathBuf,
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a configuration without running it.
    Validate { config: PathBuf },
}

fn out_dir(cfg: &RunConfig, out: Option<PathBuf>) -> PathBuf {
    out.or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn summarize(out: &RunOutput) {
    for t in &out.report.tasks {
        let status = match t.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        println!("{:<10} {status}", t.task);
        if let Some(e) = &t.error {
            println!("    {e}");
        }
        for g in t.gates.iter().filter(|g| !g.pass) {
            println!(
                "    {} = {:e} (limit {:?} {:e})",
                g.name, g.value, g.relation, g.limit
            );
        }
    }
    for g in &out.report.checks {
        println!(
            "check {:<40} {}",
            g.name,
            if g.pass { "pass" } else { "FAIL" }
        );
    }
}

fn execute(cfg: &RunConfig, level: u32, dir: &Path) -> Result<i32, AppError> {
    let out = run(cfg, level);
    let paths = artifacts::emit(&out, dir, rayon::current_num_threads())?;
    summarize(&out);
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(out.report.exit_code())
}

fn main_inner(cli: Cli) -> Result<i32, AppError> {
    let threads = threads_from_env(std::env::var(THREADS_ENV).ok().as_deref())?;
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| AppError::Config(format!("{THREADS_ENV}: {e}")))?;
    }
    match cli.command {
        Command::Validate { config } => {
            let cfg = RunConfig::load(&config)?;
            let tasks: Vec<&str> = cfg.tasks.iter().map(|t| t.name()).collect();
            println!("{}: valid ({})", config.display(), tasks.join(", "));
            Ok(0)
        }
        Command::Run { config, out, level } => {
            let cfg = RunConfig::load(&config)?;
            let dir = out_dir(&cfg, out);
            execute(&cfg, level, &dir)
        }
        Command::Converge {
            config,
            levels,
            out,
        } => {
            let mut cfg = RunConfig::load(&config)?;
            if levels < 2 {
                return Err(AppError::Config(format!(
                    "--levels: must be at least 2, got {levels}"
                )));
            }
            cfg.tasks = vec![Task::Converge];
            cfg.resolution.levels = levels;
            cfg.validate()?;
            let dir = out_dir(&cfg, out);
            execute(&cfg, 0, &dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("scatterlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
