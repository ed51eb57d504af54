//! `solve` — command-line driver for the emspect Maxwell solver.
//!
//! Usage: `solve <run|converge|spatial|invariants|dispersion> --config <path>
//! [--out <dir>] [--threads <n>]`. All knobs live in the TOML config; see
//! the repository README for the format.

mod commands;
mod config;
mod output;

use anyhow::Result;
use clap::{Parser, Subcommand};
use config::RunConfig;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "solve",
    about = "Sixth-order energy-conserving pseudo-spectral Maxwell solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured initial state and write a field snapshot.
    Run(CommonArgs),
    /// Temporal convergence table over [benchmark].tau_list.
    Converge(CommonArgs),
    /// Spatial accuracy table over [benchmark].n_list.
    Spatial(CommonArgs),
    /// Conservation-law records along a long run.
    Invariants(CommonArgs),
    /// Dispersion-relation sweep over the Brillouin zone.
    Dispersion(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides [output].dir; default "out").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread count (overrides [output].threads; 0 = library default).
    #[arg(long)]
    threads: Option<usize>,
}

fn configure_threads(n: Option<usize>) -> Result<()> {
    let Some(n) = n else { return Ok(()) };
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow::anyhow!("thread pool setup failed: {e}"))?;
        Ok(())
    }
    #[cfg(not(feature = "parallel"))]
    {
        if n > 1 {
            eprintln!("note: built without the parallel feature; --threads {n} ignored");
        }
        Ok(())
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (args, run): (&CommonArgs, fn(&RunConfig, &std::path::Path) -> Result<()>) =
        match &cli.command {
            Command::Run(a) => (a, commands::cmd_run),
            Command::Converge(a) => (a, commands::cmd_converge),
            Command::Spatial(a) => (a, commands::cmd_spatial),
            Command::Invariants(a) => (a, commands::cmd_invariants),
            Command::Dispersion(a) => (a, commands::cmd_dispersion),
        };
    let cfg = RunConfig::load(&args.config)?;
    configure_threads(cfg.threads(args.threads))?;
    let out = cfg.out_dir(args.out.as_deref());
    run(&cfg, &out)
}
