//! Figure-data sweeps and run manifests.

mod config;
mod output;
mod runs;

pub use config::{
    resolve_mode, DriveSpec, GeometrySpec, IntegratorSpec, Method, OutputSpec, RunConfig, SweepSpec,
};
pub use output::{write_dataset, Cell, Dataset, Table};
pub use runs::{
    run_fig1, run_fig2, run_fig3, run_fig4, run_g2tau, run_modes, run_overlaps, System, AUTO_ANALYTIC_GAMMA,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    G2Tau,
    Modes,
    Overlaps,
}

impl Command {
    pub const ALL: [Command; 7] =
        [Command::Fig1, Command::Fig2, Command::Fig3, Command::Fig4, Command::G2Tau, Command::Modes, Command::Overlaps];

    pub fn name(self) -> &'static str {
        match self {
            Command::Fig1 => "fig1",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Fig4 => "fig4",
            Command::G2Tau => "g2tau",
            Command::Modes => "modes",
            Command::Overlaps => "overlaps",
        }
    }
}

/// Validates `cfg` and runs `command` on a pool of `cfg.jobs` threads.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Dataset> {
    cfg.validate()?;
    // Row order is fixed by ordered collection; keeping dense kernels single
    // threaded makes the floating-point results independent of the pool size.
    faer::set_global_parallelism(faer::Par::Seq);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cfg.jobs {
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| match command {
        Command::Fig1 => run_fig1(cfg),
        Command::Fig2 => run_fig2(cfg),
        Command::Fig3 => run_fig3(cfg),
        Command::Fig4 => run_fig4(cfg),
        Command::G2Tau => run_g2tau(cfg),
        Command::Modes => run_modes(cfg),
        Command::Overlaps => run_overlaps(cfg),
    })
}
