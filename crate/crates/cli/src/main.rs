use std::path::PathBuf;
use std::process::ExitCode;

use arrayg2_core::experiments::{self, Command, GeometrySpec, Method, RunConfig};
use arrayg2_core::Result;
use clap::{Args, Parser, Subcommand};

/// Photon statistics of weakly driven dipole arrays.
#[derive(Parser)]
#[command(name = "arrayg2", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Second-photon rate against double-mode decay rate, per spacing
    Fig1(Common),
    /// Single/double overlap magnitudes against decay-rate mismatch
    Fig2(Common),
    /// g²(0) under single-eigenmode drive, per spacing and mode
    Fig3(Common),
    /// g²(0) under two-mode drive against relative phase and amplitude
    Fig4(Common),
    /// g²(τ) for the configured drive and detectors
    G2tau(Common),
    /// Single and double eigenmode spectra
    Modes(Common),
    /// Single-to-double overlap table
    Overlaps(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; built-in defaults when absent
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// analytic, master or both (overrides the config)
    #[arg(long)]
    method: Option<Method>,
    /// Worker threads (overrides the config)
    #[arg(long)]
    jobs: Option<usize>,
    /// Atom array JSON file (overrides the config geometry)
    #[arg(long)]
    geometry: Option<PathBuf>,
}

impl Sub {
    fn split(self) -> (Command, Common) {
        match self {
            Sub::Fig1(c) => (Command::Fig1, c),
            Sub::Fig2(c) => (Command::Fig2, c),
            Sub::Fig3(c) => (Command::Fig3, c),
            Sub::Fig4(c) => (Command::Fig4, c),
            Sub::G2tau(c) => (Command::G2Tau, c),
            Sub::Modes(c) => (Command::Modes, c),
            Sub::Overlaps(c) => (Command::Overlaps, c),
        }
    }
}

fn load(args: Common) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = args.out {
        cfg.output.dir = out;
    }
    if let Some(method) = args.method {
        cfg.method = method;
    }
    if let Some(jobs) = args.jobs {
        cfg.jobs = Some(jobs);
    }
    if let Some(path) = args.geometry {
        cfg.geometry = GeometrySpec::File { path };
    }
    Ok(cfg)
}

fn execute(command: Command, args: Common) -> Result<()> {
    let cfg = load(args)?;
    log::info!("{}: config {}", command.name(), cfg.hash());
    let data = experiments::run(command, &cfg)?;
    for path in experiments::write_dataset(&data, &cfg, &cfg.output.dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let (command, args) = Cli::parse().command.split();
    match execute(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
