//! Benchmark problem on `[0, 2]^3` with a closed-form solution.
//!
//! The solution family is a standing wave indexed by integer mode numbers
//! `(k_x, k_y, k_z)` with `k_x + k_y + k_z = 0`:
//!
//! ```text
//!   E_x = (k_y - k_z) sqrt(mu/eps) / |k| * cos(w pi t) cos(k_x pi x) sin(k_y pi y) sin(k_z pi z)
//!   H_x =                                  sin(w pi t) sin(k_x pi x) cos(k_y pi y) cos(k_z pi z)
//! ```
//!
//! (cyclic in the components) with the frequency parameter
//! `w = sqrt((k_x^2 + k_y^2 + k_z^2) / (eps mu))`, i.e. angular frequency
//! `w pi = pi c |k|` — the exact dispersion relation for wavenumbers
//! `kappa_w = pi k_w`. At `t = 0` the magnetic field vanishes and the
//! electric field is divergence-free, so the sampled state is admissible
//! initial data. The zero-mode-sum constraint makes `H` divergence-free at
//! all times; defaults are `k = (1, 2, -3)`, `eps = mu = 1`, `w = sqrt(14)`.

use crate::diagnostics::{self, ErrorReport, InvariantRecord};
use crate::error::SolverError;
use crate::grid::{EMState, GridSpec, VectorField};
use crate::parallel::Execution;
use crate::spectral::SpectralOps;
use crate::stepper::{ModeStorage, SchemeOrder, SolverPlan};
use crate::Result;
use std::f64::consts::PI;
use std::time::Instant;

/// Errors below this are round-off noise; convergence rates against them
/// are meaningless and reported as absent.
pub const ROUNDOFF_ERROR_FLOOR: f64 = 1e-12;

/// Mode numbers and materials of the benchmark solution.
#[derive(Debug, Clone, Copy)]
pub struct BenchmarkParams {
    pub k: [i64; 3],
    pub eps: f64,
    pub mu: f64,
    /// Frequency parameter: fields oscillate as `cos(w pi t)` / `sin(w pi t)`
    /// with `w = sqrt((k_x^2 + k_y^2 + k_z^2) / (eps mu)) = c |k|`.
    pub w: f64,
}

impl BenchmarkParams {
    pub fn new(k: [i64; 3], eps: f64, mu: f64) -> Result<Self> {
        if k == [0, 0, 0] {
            return Err(SolverError::Config("mode numbers must not all vanish".into()));
        }
        if k[0] + k[1] + k[2] != 0 {
            // the closed form solves the field equations only on this slice
            return Err(SolverError::Config(format!(
                "benchmark mode numbers must satisfy k_x + k_y + k_z = 0, got {k:?}"
            )));
        }
        if !(eps > 0.0) || !(mu > 0.0) {
            return Err(SolverError::Config(format!(
                "material parameters must be positive: eps = {eps}, mu = {mu}"
            )));
        }
        let k2: f64 = k.iter().map(|&v| (v * v) as f64).sum();
        Ok(Self {
            k,
            eps,
            mu,
            w: (k2 / (eps * mu)).sqrt(),
        })
    }

    /// `k = (1, 2, -3)`, `eps = mu = 1` (so `w = sqrt(14)`).
    pub fn defaults() -> Self {
        Self::new([1, 2, -3], 1.0, 1.0).expect("default parameters are valid")
    }

    /// Electric amplitudes `(k_y - k_z, k_z - k_x, k_x - k_y) sqrt(mu/eps) / |k|`.
    fn e_amplitudes(&self) -> [f64; 3] {
        let [kx, ky, kz] = self.k.map(|v| v as f64);
        let norm = (kx * kx + ky * ky + kz * kz).sqrt();
        let s = (self.mu / self.eps).sqrt() / norm;
        [(ky - kz) * s, (kz - kx) * s, (kx - ky) * s]
    }

    fn check_domain(grid: &GridSpec) -> Result<()> {
        for w in 0..3 {
            if grid.bounds[w] != [0.0, 2.0] {
                return Err(SolverError::Config(
                    "the benchmark solution lives on the domain [0,2]^3".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Samples the exact solution at time `t` on `grid`.
pub fn exact_state(params: &BenchmarkParams, grid: &GridSpec, t: f64) -> Result<EMState> {
    BenchmarkParams::check_domain(grid)?;
    let [kx, ky, kz] = params.k.map(|v| v as f64 * PI);
    let [ax, ay, az] = params.e_amplitudes();
    let (ct, st) = ((params.w * PI * t).cos(), (params.w * PI * t).sin());
    let e = VectorField::sample(
        *grid,
        move |x, y, z| ax * ct * (kx * x).cos() * (ky * y).sin() * (kz * z).sin(),
        move |x, y, z| ay * ct * (kx * x).sin() * (ky * y).cos() * (kz * z).sin(),
        move |x, y, z| az * ct * (kx * x).sin() * (ky * y).sin() * (kz * z).cos(),
    );
    let h = VectorField::sample(
        *grid,
        move |x, y, z| st * (kx * x).sin() * (ky * y).cos() * (kz * z).cos(),
        move |x, y, z| st * (kx * x).cos() * (ky * y).sin() * (kz * z).cos(),
        move |x, y, z| st * (kx * x).cos() * (ky * y).cos() * (kz * z).sin(),
    );
    EMState::new(e, h, t, params.eps, params.mu)
}

/// Samples the analytic time derivatives `(dE/dt, dH/dt)` at time `t`;
/// oracle for the semi-discrete residual check.
pub fn exact_time_derivative(
    params: &BenchmarkParams,
    grid: &GridSpec,
    t: f64,
) -> Result<(VectorField, VectorField)> {
    BenchmarkParams::check_domain(grid)?;
    let [kx, ky, kz] = params.k.map(|v| v as f64 * PI);
    let [ax, ay, az] = params.e_amplitudes();
    let omega = params.w * PI;
    let (ct, st) = ((omega * t).cos(), (omega * t).sin());
    let de = VectorField::sample(
        *grid,
        move |x, y, z| -ax * omega * st * (kx * x).cos() * (ky * y).sin() * (kz * z).sin(),
        move |x, y, z| -ay * omega * st * (kx * x).sin() * (ky * y).cos() * (kz * z).sin(),
        move |x, y, z| -az * omega * st * (kx * x).sin() * (ky * y).sin() * (kz * z).cos(),
    );
    let dh = VectorField::sample(
        *grid,
        move |x, y, z| omega * ct * (kx * x).sin() * (ky * y).cos() * (kz * z).cos(),
        move |x, y, z| omega * ct * (kx * x).cos() * (ky * y).sin() * (kz * z).cos(),
        move |x, y, z| omega * ct * (kx * x).cos() * (ky * y).cos() * (kz * z).sin(),
    );
    Ok((de, dh))
}

/// One row of a temporal convergence table.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub linf: f64,
    pub l2: f64,
    /// Rate against the previous row; absent for the first row and whenever
    /// either error sits at the round-off floor.
    pub rate: Option<f64>,
    pub wall_s: f64,
}

/// One row of a spatial accuracy table.
#[derive(Debug, Clone)]
pub struct SpatialRow {
    pub n: usize,
    pub linf: f64,
    pub l2: f64,
    pub wall_s: f64,
}

fn integral_steps(t_end: f64, tau: f64) -> Result<usize> {
    if !(tau > 0.0) || !(t_end > 0.0) {
        return Err(SolverError::Config(format!(
            "study needs positive tau and T, got tau = {tau}, T = {t_end}"
        )));
    }
    let n = (t_end / tau).round();
    if ((n * tau - t_end) / t_end).abs() > 1e-9 {
        return Err(SolverError::Config(format!(
            "T = {t_end} is not an integral number of steps of tau = {tau}"
        )));
    }
    Ok(n as usize)
}

fn run_to(
    params: &BenchmarkParams,
    grid: GridSpec,
    tau: f64,
    t_end: f64,
    order: SchemeOrder,
    exec: Execution,
) -> Result<(ErrorReport, f64)> {
    let n_steps = integral_steps(t_end, tau)?;
    let plan = SolverPlan::new(
        grid,
        params.eps,
        params.mu,
        tau,
        order,
        ModeStorage::Precomputed,
        exec,
    )?;
    let state0 = exact_state(params, &grid, 0.0)?;
    let start = Instant::now();
    let state = plan.run(state0, n_steps, None, |_, _, _| {})?;
    let wall = start.elapsed().as_secs_f64();
    let exact = exact_state(params, &grid, t_end)?;
    Ok((diagnostics::error_norms(&state, &exact)?, wall))
}

/// Errors and observed rates at `T = t_end` over a list of time steps,
/// on an `n^3` grid.
pub fn temporal_convergence_study(
    params: &BenchmarkParams,
    n: usize,
    tau_list: &[f64],
    t_end: f64,
    order: SchemeOrder,
    exec: Execution,
) -> Result<Vec<ConvergenceRow>> {
    let grid = GridSpec::cube(0.0, 2.0, n)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(tau_list.len());
    for &tau in tau_list {
        let (err, wall_s) = run_to(params, grid, tau, t_end, order, exec)?;
        let rate = rows.last().and_then(|prev: &ConvergenceRow| {
            if prev.l2 > ROUNDOFF_ERROR_FLOOR && err.l2 > ROUNDOFF_ERROR_FLOOR {
                diagnostics::convergence_rate(prev.l2, err.l2, prev.tau, tau).ok()
            } else {
                None
            }
        });
        rows.push(ConvergenceRow {
            tau,
            linf: err.linf,
            l2: err.l2,
            rate,
            wall_s,
        });
    }
    Ok(rows)
}

/// Errors at `T = t_end` for a list of grid resolutions at fixed `tau`
/// (small enough that the temporal error is subdominant).
pub fn spatial_accuracy_study(
    params: &BenchmarkParams,
    n_list: &[usize],
    tau: f64,
    t_end: f64,
    order: SchemeOrder,
    exec: Execution,
) -> Result<Vec<SpatialRow>> {
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let grid = GridSpec::cube(0.0, 2.0, n)?;
        let (err, wall_s) = run_to(params, grid, tau, t_end, order, exec)?;
        rows.push(SpatialRow {
            n,
            linf: err.linf,
            l2: err.l2,
            wall_s,
        });
    }
    Ok(rows)
}

/// Long-run conservation study: evolves the benchmark data for `t_end / tau`
/// steps and emits an [`InvariantRecord`] at step 0, every `cadence`-th step
/// and the final step (`cadence = None`: final only).
pub fn invariant_drift_study(
    params: &BenchmarkParams,
    n: usize,
    tau: f64,
    t_end: f64,
    order: SchemeOrder,
    cadence: Option<usize>,
    exec: Execution,
) -> Result<Vec<InvariantRecord>> {
    let grid = GridSpec::cube(0.0, 2.0, n)?;
    let n_steps = integral_steps(t_end, tau)?;
    let plan = SolverPlan::new(
        grid,
        params.eps,
        params.mu,
        tau,
        order,
        ModeStorage::Precomputed,
        exec,
    )?;
    let ops = SpectralOps::new(grid).with_execution(exec);
    let state0 = exact_state(params, &grid, 0.0)?;
    let mut records: Vec<InvariantRecord> = Vec::new();
    let mut failure: Option<SolverError> = None;
    plan.run(state0, n_steps, cadence, |_, state, prev| {
        if failure.is_some() {
            return;
        }
        match diagnostics::invariants(&ops, state, prev, tau) {
            Ok(rec) => records.push(rec),
            Err(e) => failure = Some(e),
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(records),
    }
}
