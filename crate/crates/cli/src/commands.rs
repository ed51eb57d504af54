//! The five subcommands. Every command validates its inputs, runs entirely
//! in memory, and writes its files from this single orchestrator thread.

use crate::config::{RunConfig, Scenario};
use crate::output;
use anyhow::{bail, Context, Result};
use emspect::benchmark::{self, BenchmarkParams};
use emspect::dispersion::{self, DispersionConfig};
use emspect::stepper::{ModeStorage, SchemeOrder, SolverPlan};
use emspect::Execution;
use std::path::Path;

fn ensure_outdir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn benchmark_params(cfg: &RunConfig) -> Result<BenchmarkParams> {
    let m = cfg.material()?;
    Ok(BenchmarkParams::new(cfg.benchmark_k(), m.eps, m.mu)?)
}

/// `solve run`: evolve for the configured number of steps and write the
/// final state snapshot (`fields.bin` + `fields.meta`).
pub fn cmd_run(cfg: &RunConfig, out: &Path) -> Result<()> {
    ensure_outdir(out)?;
    let time = cfg.time()?;
    let order = cfg.order()?;
    let n_steps = cfg.n_steps()?;

    let state0 = match cfg.scenario {
        Scenario::Benchmark => {
            let grid = cfg.grid()?;
            benchmark::exact_state(&benchmark_params(cfg)?, &grid, 0.0)?
        }
        Scenario::Custom => {
            let stem = &cfg.custom.as_ref().expect("validated").snapshot;
            let state = output::read_snapshot(stem)?;
            let m = cfg.material()?;
            if state.eps != m.eps || state.mu != m.mu {
                bail!(
                    "snapshot materials (eps = {}, mu = {}) disagree with [material] ({}, {})",
                    state.eps,
                    state.mu,
                    m.eps,
                    m.mu
                );
            }
            state
        }
    };
    let plan = SolverPlan::new(
        *state0.grid(),
        state0.eps,
        state0.mu,
        time.tau,
        order,
        ModeStorage::Precomputed,
        Execution::default(),
    )?;
    let final_state = plan.run(state0, n_steps, None, |_, _, _| {})?;
    output::write_snapshot(&out.join("fields"), &final_state)?;
    println!(
        "run: {} steps of tau = {} -> t = {}; snapshot in {}",
        n_steps,
        time.tau,
        final_state.t,
        out.display()
    );
    Ok(())
}

/// `solve converge`: temporal convergence table over [benchmark].tau_list.
pub fn cmd_converge(cfg: &RunConfig, out: &Path) -> Result<()> {
    ensure_outdir(out)?;
    let params = benchmark_params(cfg)?;
    let tau_list = cfg
        .benchmark
        .as_ref()
        .and_then(|b| b.tau_list.clone())
        .ok_or_else(|| anyhow::anyhow!("converge needs [benchmark] tau_list"))?;
    let t_end = cfg
        .time()?
        .t_end
        .ok_or_else(|| anyhow::anyhow!("converge needs [time] t_end"))?;
    let n = cfg.domain()?.n[0];
    let rows = benchmark::temporal_convergence_study(
        &params,
        n,
        &tau_list,
        t_end,
        cfg.order()?,
        Execution::default(),
    )?;
    let path = out.join("converge.csv");
    std::fs::write(&path, output::converge_csv(&rows))?;
    println!("converge: {} rows -> {}", rows.len(), path.display());
    Ok(())
}

/// `solve spatial`: error vs grid resolution at fixed tau.
pub fn cmd_spatial(cfg: &RunConfig, out: &Path) -> Result<()> {
    ensure_outdir(out)?;
    let params = benchmark_params(cfg)?;
    let n_list = cfg
        .benchmark
        .as_ref()
        .and_then(|b| b.n_list.clone())
        .ok_or_else(|| anyhow::anyhow!("spatial needs [benchmark] n_list"))?;
    let time = cfg.time()?;
    let t_end = time
        .t_end
        .ok_or_else(|| anyhow::anyhow!("spatial needs [time] t_end"))?;
    let rows = benchmark::spatial_accuracy_study(
        &params,
        &n_list,
        time.tau,
        t_end,
        cfg.order()?,
        Execution::default(),
    )?;
    let path = out.join("spatial.csv");
    std::fs::write(&path, output::spatial_csv(&rows))?;
    println!("spatial: {} rows -> {}", rows.len(), path.display());
    Ok(())
}

/// `solve invariants`: long-run conservation records at the observer cadence.
pub fn cmd_invariants(cfg: &RunConfig, out: &Path) -> Result<()> {
    ensure_outdir(out)?;
    let params = benchmark_params(cfg)?;
    let time = cfg.time()?;
    let n = cfg.domain()?.n[0];
    let t_end = time.n_steps.map(|ns| ns as f64 * time.tau).or(time.t_end);
    let t_end = t_end.ok_or_else(|| anyhow::anyhow!("invariants needs [time] t_end or n_steps"))?;
    let records = benchmark::invariant_drift_study(
        &params,
        n,
        time.tau,
        t_end,
        cfg.order()?,
        time.cadence,
        Execution::default(),
    )?;
    let path = out.join("invariants.csv");
    std::fs::write(&path, output::invariants_csv(&records))?;
    println!("invariants: {} records -> {}", records.len(), path.display());
    Ok(())
}

/// `solve dispersion`: Brillouin-zone sweep of the dispersion relation.
pub fn cmd_dispersion(cfg: &RunConfig, out: &Path) -> Result<()> {
    ensure_outdir(out)?;
    let d = cfg
        .dispersion
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("dispersion needs a [dispersion] section"))?;
    let m = cfg.material()?;
    let c = 1.0 / (m.eps * m.mu).sqrt();
    let dcfg = DispersionConfig::uniform(
        d.n,
        d.h,
        d.tau,
        c,
        SchemeOrder::from_int(d.order)?,
        d.n_lambda.unwrap_or(5.0),
    )?;
    let samples = dispersion::brillouin_sweep(&dcfg, d.sweep);
    let path = out.join("dispersion.csv");
    std::fs::write(&path, output::dispersion_csv(&samples))?;
    println!("dispersion: {} samples -> {}", samples.len(), path.display());
    Ok(())
}
