//! `gs` — certification campaigns, geodesic-equation solves, continuity
//! paths, degenerate sweeps, bound verification, and CSV export.

mod config;
mod run;

use clap::{Args, Parser, Subcommand};
use config::{load_config, Mode};
use run::{RunOptions, EXIT_USAGE};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gs", version, about = "sigma_k geodesic equation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// worker threads for campaigns (0 = auto)
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// output directory (overrides the config's output_dir)
    #[arg(long)]
    out: Option<PathBuf>,
    /// print solver progress to stderr (GS_VERBOSE=1 also enables this)
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized certification campaign for one (n, k)
    Certify(Common),
    /// Single damped-Newton solve from the explicit subsolution
    Solve(Common),
    /// Continuity path to the target source
    Path(Common),
    /// Degenerate sweep f = s down the configured schedule
    Sweep(Common),
    /// Solve, then check the a priori bounds (optional refinement study)
    Verify(Common),
    /// Export time slices of a stored field as CSV
    Export(Common),
}

impl Command {
    fn mode(&self) -> Mode {
        match self {
            Command::Certify(_) => Mode::Certify,
            Command::Solve(_) => Mode::Solve,
            Command::Path(_) => Mode::Path,
            Command::Sweep(_) => Mode::Sweep,
            Command::Verify(_) => Mode::Verify,
            Command::Export(_) => Mode::Export,
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Certify(c)
            | Command::Solve(c)
            | Command::Path(c)
            | Command::Sweep(c)
            | Command::Verify(c)
            | Command::Export(c) => c,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version are not usage errors
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(EXIT_USAGE as u8);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let common = cli.command.common();
    let cfg = match load_config(&common.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("gs: {e:#}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    if cfg.mode != cli.command.mode() {
        eprintln!(
            "gs: config mode `{}` does not match subcommand `{}`",
            cfg.mode,
            cli.command.mode()
        );
        return ExitCode::from(EXIT_USAGE as u8);
    }
    if common.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(common.threads)
            .build_global()
        {
            eprintln!("gs: thread pool: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    }
    let verbose = common.verbose
        || std::env::var("GS_VERBOSE").map(|v| v == "1" || v == "true").unwrap_or(false);
    let out_dir = common
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("gs-out"));
    let opts = RunOptions {
        out_dir,
        verbose,
        threads: common.threads,
    };
    match run::run(&cfg, &opts) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("gs: {e:#}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
