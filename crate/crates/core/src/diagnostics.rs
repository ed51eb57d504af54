//! Discrete invariants of the scheme and benchmark error norms.
//!
//! All functionals are evaluated with the spectral first-derivative
//! operators and the weighted inner product `<.,.>_h`:
//!
//! * `E1` — helicity energy `<H, D H>/(2 eps) + <E, D E>/(2 mu)` (`D` the
//!   discrete curl),
//! * `E2` — quadratic energy `mu/2 ||H||^2 + eps/2 ||E||^2`,
//! * `E3` — the same built from difference quotients of two consecutive
//!   levels,
//! * `E4w`/`E5w` — first-derivative seminorm energies per axis,
//! * `M_w` — momenta `<H, d_w E>`,
//! * max norms of the divergence fields `div(eps E)`, `div(mu H)`.
//!
//! `E3` and the `E5w` involve a division by `tau`, which amplifies round-off;
//! their drift is therefore judged against a looser threshold than the rest.

use crate::error::SolverError;
use crate::grid::{Axis, EMState, VectorField};
use crate::spectral::SpectralOps;
use crate::Result;

/// Every invariant at one time level. `e3`/`e5` are present only when the
/// previous level was supplied.
#[derive(Debug, Clone)]
pub struct InvariantRecord {
    pub t: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: Option<f64>,
    pub e4: [f64; 3],
    pub e5: Option<[f64; 3]>,
    pub momentum: [f64; 3],
    pub div_e_inf: f64,
    pub div_h_inf: f64,
}

/// Weighted error norms of a state against a reference, following the
/// benchmark definitions:
/// `Linf = max(||mu dH||_inf, ||eps dE||_inf)`,
/// `L2 = sqrt(mu ||dH||_h^2 + eps ||dE||_h^2)`.
#[derive(Debug, Clone, Copy)]
pub struct ErrorReport {
    pub l2: f64,
    pub linf: f64,
    /// Observed convergence rate; filled by studies that ran two resolutions.
    pub rate: Option<f64>,
}

fn axis_seminorm_sq(ops: &SpectralOps, v: &VectorField, axis: Axis) -> Result<f64> {
    let mut acc = 0.0;
    for comp in [&v.x, &v.y, &v.z] {
        let d = ops.derivative(comp, axis)?;
        let n = d.norm_h();
        acc += n * n;
    }
    Ok(acc)
}

fn diff_quotient(cur: &VectorField, prev: &VectorField, tau: f64) -> Result<VectorField> {
    let grid = *cur.grid();
    let mut out = VectorField::zeros(grid);
    for (o, (c, p)) in [
        (&mut out.x, (&cur.x, &prev.x)),
        (&mut out.y, (&cur.y, &prev.y)),
        (&mut out.z, (&cur.z, &prev.z)),
    ] {
        if c.grid != p.grid {
            return Err(SolverError::Mismatch(
                "states live on different grids".into(),
            ));
        }
        for (ov, (cv, pv)) in o.values.iter_mut().zip(c.values.iter().zip(&p.values)) {
            *ov = (cv - pv) / tau;
        }
    }
    Ok(out)
}

/// Computes all invariants of `state`; supply the previous level to get the
/// difference-quotient energies `E3`/`E5w` as well.
pub fn invariants(
    ops: &SpectralOps,
    state: &EMState,
    prev: Option<&EMState>,
    tau: f64,
) -> Result<InvariantRecord> {
    if state.grid() != ops.grid() {
        return Err(SolverError::Mismatch(
            "state grid does not match the spectral engine".into(),
        ));
    }
    let (eps, mu) = (state.eps, state.mu);

    let curl_h = ops.curl(&state.h)?;
    let curl_e = ops.curl(&state.e)?;
    let e1 = state.h.inner_product(&curl_h)? / (2.0 * eps)
        + state.e.inner_product(&curl_e)? / (2.0 * mu);
    let e2 = 0.5 * mu * state.h.norm_h().powi(2) + 0.5 * eps * state.e.norm_h().powi(2);

    let mut e4 = [0.0; 3];
    let mut momentum = [0.0; 3];
    for axis in Axis::ALL {
        let w = axis.index();
        e4[w] = mu * axis_seminorm_sq(ops, &state.h, axis)?
            + eps * axis_seminorm_sq(ops, &state.e, axis)?;
        let de = VectorField::new(
            ops.derivative(&state.e.x, axis)?,
            ops.derivative(&state.e.y, axis)?,
            ops.derivative(&state.e.z, axis)?,
        )?;
        momentum[w] = state.h.inner_product(&de)?;
    }

    let (div_e_inf, div_h_inf) = divergence_norms(ops, state)?;

    let (e3, e5) = match prev {
        None => (None, None),
        Some(p) => {
            if !(tau > 0.0) && !(tau < 0.0) {
                return Err(SolverError::Config(
                    "difference-quotient energies need tau != 0".into(),
                ));
            }
            let dh = diff_quotient(&state.h, &p.h, tau)?;
            let de = diff_quotient(&state.e, &p.e, tau)?;
            let e3 = 0.5 * mu * dh.norm_h().powi(2) + 0.5 * eps * de.norm_h().powi(2);
            let mut e5 = [0.0; 3];
            for axis in Axis::ALL {
                e5[axis.index()] = mu * axis_seminorm_sq(ops, &dh, axis)?
                    + eps * axis_seminorm_sq(ops, &de, axis)?;
            }
            (Some(e3), Some(e5))
        }
    };

    Ok(InvariantRecord {
        t: state.t,
        e1,
        e2,
        e3,
        e4,
        e5,
        momentum,
        div_e_inf,
        div_h_inf,
    })
}

/// Max norms of the two discrete divergence fields.
pub fn divergence_norms(ops: &SpectralOps, state: &EMState) -> Result<(f64, f64)> {
    let div_e = ops.divergence_scaled(&state.e, state.eps)?;
    let div_h = ops.divergence_scaled(&state.h, state.mu)?;
    Ok((div_e.norm_inf(), div_h.norm_inf()))
}

/// Weighted error norms of `state` against the sampled reference `exact`.
pub fn error_norms(state: &EMState, exact: &EMState) -> Result<ErrorReport> {
    if state.grid() != exact.grid() {
        return Err(SolverError::Mismatch(
            "states live on different grids".into(),
        ));
    }
    let (eps, mu) = (state.eps, state.mu);
    let mut linf = 0.0f64;
    let mut l2_sq = 0.0f64;
    let vol = state.grid().cell_volume();
    for axis in Axis::ALL {
        let mut acc = 0.0;
        for (a, b) in state
            .h
            .component(axis)
            .values
            .iter()
            .zip(&exact.h.component(axis).values)
        {
            let d = a - b;
            acc += d * d;
            linf = linf.max((mu * d).abs());
        }
        l2_sq += mu * acc * vol;
        let mut acc = 0.0;
        for (a, b) in state
            .e
            .component(axis)
            .values
            .iter()
            .zip(&exact.e.component(axis).values)
        {
            let d = a - b;
            acc += d * d;
            linf = linf.max((eps * d).abs());
        }
        l2_sq += eps * acc * vol;
    }
    Ok(ErrorReport {
        l2: l2_sq.sqrt(),
        linf,
        rate: None,
    })
}

/// `ln(e1/e2) / ln(tau1/tau2)`.
pub fn convergence_rate(err1: f64, err2: f64, tau1: f64, tau2: f64) -> Result<f64> {
    if !(err1 > 0.0) || !(err2 > 0.0) {
        return Err(SolverError::Config(format!(
            "convergence rate needs positive errors, got {err1} and {err2}"
        )));
    }
    if !(tau1 > 0.0) || !(tau2 > 0.0) || tau1 == tau2 {
        return Err(SolverError::Config(format!(
            "convergence rate needs distinct positive steps, got {tau1} and {tau2}"
        )));
    }
    Ok((err1 / err2).ln() / (tau1 / tau2).ln())
}

/// Relative drift `|I_n - I_0| / max(|I_0|, 1e-30)`.
///
/// Invariants that start at exactly zero by symmetry (helicity and momenta of
/// the benchmark data) make this ratio meaningless; callers judging those
/// should fall back to absolute drift, which is what the drift studies do.
pub fn relative_drift(current: f64, initial: f64) -> f64 {
    (current - initial).abs() / initial.abs().max(1e-30)
}
