//! Dense spectral differentiation matrices and full-grid assemblies.
//!
//! These are test oracles: the closed-form entries printed for `D_1 .. D_5`
//! (cotangent / cosecant sums), the power relation between `D_p` and
//! `(D_1)^p`, and dense versions of the curl and modified-curl operators for
//! small grids. Production code always takes the transform-diagonal path in
//! [`crate::spectral`]; nothing here should run at scale, hence the hard
//! size guard on full-grid assemblies.

use crate::error::SolverError;
use crate::grid::{Axis, GridSpec};
use crate::stepper::SchemeOrder;
use crate::Result;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Upper bound on `6 N^3` for dense full-system assemblies. `N = 8` gives a
/// 3072^2 matrix (75 MB); anything larger defeats the oracle's purpose.
pub const MAX_DENSE_UNKNOWNS: usize = 6 * 8 * 8 * 8;

/// A dense one-axis differentiation matrix built from the closed forms.
#[derive(Debug, Clone)]
pub struct DenseOpMatrix {
    pub p: u32,
    pub axis: Axis,
    pub matrix: DMatrix<f64>,
}

/// Builds the order-`p` dense spectral differentiation matrix (1 <= p <= 5)
/// for one axis of `grid` from the printed cotangent/cosecant entries.
pub fn dp_matrix(grid: &GridSpec, axis: Axis, p: u32) -> Result<DenseOpMatrix> {
    if p == 0 || p > 5 {
        return Err(SolverError::UnsupportedOrder(p));
    }
    let n = grid.counts[axis.index()];
    let mu = grid.fundamental[axis.index()];
    let nf = n as f64;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for l in 0..n {
            if j == l {
                m[(j, l)] = match p {
                    2 => -mu.powi(2) * (nf * nf + 2.0) / 12.0,
                    4 => mu.powi(4) * (nf.powi(4) / 80.0 + nf * nf / 12.0 - 1.0 / 30.0),
                    _ => 0.0,
                };
                continue;
            }
            let sign = if (j + l) % 2 == 0 { 1.0 } else { -1.0 };
            let r = PI * (j as f64 - l as f64) / nf;
            let (cot, csc) = (1.0 / r.tan(), 1.0 / r.sin());
            m[(j, l)] = match p {
                1 => 0.5 * mu * sign * cot,
                2 => -0.5 * mu.powi(2) * sign * csc * csc,
                3 => {
                    0.75 * mu.powi(3) * sign * r.cos() * csc.powi(3)
                        - mu.powi(3) * nf * nf / 8.0 * sign * cot
                }
                4 => mu.powi(4) * sign * csc * csc * (nf * nf / 4.0 - 0.5 - 1.5 * cot * cot),
                5 => {
                    mu.powi(5) / 32.0
                        * sign
                        * cot
                        * (nf.powi(4) + 20.0 * csc * csc * (4.0 + 6.0 * cot * cot - nf * nf))
                }
                _ => unreachable!(),
            };
        }
    }
    Ok(DenseOpMatrix { p, axis, matrix: m })
}

/// Dense transform-route matrix `F^{-1} diag^p F` for one axis; the
/// independent construction [`dp_matrix`] is tested against.
pub fn dp_matrix_via_dft(grid: &GridSpec, axis: Axis, p: u32) -> Result<DMatrix<f64>> {
    if p == 0 {
        return Err(SolverError::UnsupportedOrder(p));
    }
    let n = grid.counts[axis.index()];
    let table = crate::spectral::WavenumberTable::new(grid);
    let diag = if p % 2 == 1 {
        &table.lambda[axis.index()]
    } else {
        &table.lambda_tilde[axis.index()]
    };
    let mut fwd = DMatrix::<Complex64>::zeros(n, n);
    let mut inv = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let phase = 2.0 * PI * (j * k) as f64 / n as f64;
            fwd[(j, k)] = Complex64::new(phase.cos(), -phase.sin());
            inv[(j, k)] = Complex64::new(phase.cos(), phase.sin()) / n as f64;
        }
    }
    let mut d = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = diag[i].powi(p as i32);
    }
    let full = inv * d * fwd;
    let mut out = DMatrix::<f64>::zeros(n, n);
    let mut worst_im = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            out[(j, k)] = full[(j, k)].re;
            worst_im = worst_im.max(full[(j, k)].im.abs());
        }
    }
    let scale = out.amax().max(1.0);
    if worst_im > 1e-10 * scale {
        return Err(SolverError::Internal(format!(
            "DFT-route matrix has imaginary residue {worst_im:.3e}"
        )));
    }
    Ok(out)
}

/// Residual of the power relation
/// `D_p = (D_1)^p + (-1)^{j+l} mu^p/(2N) [(iN/2)^p + (-iN/2)^p]`,
/// returned relative to the magnitude of `D_p` (entries grow like
/// `(mu N)^p`, so an absolute residual would drown in round-off).
pub fn relation_check(grid: &GridSpec, axis: Axis, p: u32) -> Result<f64> {
    let dp = dp_matrix(grid, axis, p)?.matrix;
    let d1 = dp_matrix(grid, axis, 1)?.matrix;
    let mut powered = DMatrix::<f64>::identity(d1.nrows(), d1.ncols());
    for _ in 0..p {
        powered = &powered * &d1;
    }
    let n = grid.counts[axis.index()] as f64;
    let mu = grid.fundamental[axis.index()];
    // (iN/2)^p + (-iN/2)^p = 2 (-1)^{p/2} (N/2)^p for even p, 0 for odd p.
    let bracket = if p % 2 == 1 {
        0.0
    } else {
        2.0 * if (p / 2) % 2 == 0 { 1.0 } else { -1.0 } * (n / 2.0).powi(p as i32)
    };
    let coef = mu.powi(p as i32) / (2.0 * n) * bracket;
    let mut resid = 0.0f64;
    for j in 0..dp.nrows() {
        for l in 0..dp.ncols() {
            let sign = if (j + l) % 2 == 0 { 1.0 } else { -1.0 };
            resid = resid.max((dp[(j, l)] - powered[(j, l)] - sign * coef).abs());
        }
    }
    Ok(resid / dp.amax().max(1.0))
}

/// Dense full-grid first-derivative matrices `(D_1, D_2, D_3)` acting on the
/// flat x-fastest scalar layout.
pub fn d1_full(grid: &GridSpec) -> Result<[DMatrix<f64>; 3]> {
    let s = grid.len();
    if 6 * s > MAX_DENSE_UNKNOWNS {
        return Err(SolverError::SizeGuard {
            got: 6 * s,
            limit: MAX_DENSE_UNKNOWNS,
        });
    }
    let [nx, ny, nz] = grid.counts;
    let dx = dp_matrix(grid, Axis::X, 1)?.matrix;
    let dy = dp_matrix(grid, Axis::Y, 1)?.matrix;
    let dz = dp_matrix(grid, Axis::Z, 1)?.matrix;
    let mut out = [
        DMatrix::<f64>::zeros(s, s),
        DMatrix::<f64>::zeros(s, s),
        DMatrix::<f64>::zeros(s, s),
    ];
    for m in 0..nz {
        for k in 0..ny {
            for j in 0..nx {
                let row = grid.flatten(j, k, m);
                for q in 0..nx {
                    out[0][(row, grid.flatten(q, k, m))] = dx[(j, q)];
                }
                for q in 0..ny {
                    out[1][(row, grid.flatten(j, q, m))] = dy[(k, q)];
                }
                for q in 0..nz {
                    out[2][(row, grid.flatten(j, k, q))] = dz[(m, q)];
                }
            }
        }
    }
    Ok(out)
}

/// Dense discrete curl on the stacked `[v_x; v_y; v_z]` layout:
/// `[[0, -D_3, D_2], [D_3, 0, -D_1], [-D_2, D_1, 0]]`.
pub fn curl_full(grid: &GridSpec) -> Result<DMatrix<f64>> {
    let [d1, d2, d3] = d1_full(grid)?;
    let s = grid.len();
    let mut c = DMatrix::<f64>::zeros(3 * s, 3 * s);
    let mut put = |bi: usize, bj: usize, m: &DMatrix<f64>, sign: f64| {
        for r in 0..s {
            for q in 0..s {
                let v = m[(r, q)];
                if v != 0.0 {
                    c[(bi * s + r, bj * s + q)] = sign * v;
                }
            }
        }
    };
    put(0, 1, &d3, -1.0);
    put(0, 2, &d2, 1.0);
    put(1, 0, &d3, 1.0);
    put(1, 2, &d1, -1.0);
    put(2, 0, &d2, -1.0);
    put(2, 1, &d1, 1.0);
    Ok(c)
}

/// Dense modified curl `D + (c^2 tau^2/12) D^3 + (c^4 tau^4/120) D^5`.
pub fn dhat_full(grid: &GridSpec, tau: f64, c: f64, order: SchemeOrder) -> Result<DMatrix<f64>> {
    let d = curl_full(grid)?;
    let mut out = d.clone();
    if order >= SchemeOrder::Four {
        let d2 = &d * &d;
        let d3 = &d2 * &d;
        out += &d3 * (c * c * tau * tau / 12.0);
        if order >= SchemeOrder::Six {
            let d5 = &d3 * &d2;
            out += d5 * (c.powi(4) * tau.powi(4) / 120.0);
        }
    }
    Ok(out)
}

/// Dense one-step update matrix `M` with `u^{n+1} = M u^n` on the stacked
/// `[H; E]` layout (each a 3s vector). Oracle for the symplecticity and
/// unitarity checks.
pub fn update_matrix(
    grid: &GridSpec,
    eps: f64,
    mu: f64,
    tau: f64,
    order: SchemeOrder,
) -> Result<DMatrix<f64>> {
    let s3 = 3 * grid.len();
    let c = 1.0 / (eps * mu).sqrt();
    let dhat = dhat_full(grid, tau, c, order)?;
    let mut a = DMatrix::<f64>::zeros(2 * s3, 2 * s3);
    let mut b = DMatrix::<f64>::zeros(2 * s3, 2 * s3);
    for i in 0..s3 {
        a[(i, i)] = 2.0 * mu / tau;
        a[(s3 + i, s3 + i)] = 2.0 * eps / tau;
        b[(i, i)] = 2.0 * mu / tau;
        b[(s3 + i, s3 + i)] = 2.0 * eps / tau;
        for j in 0..s3 {
            let v = dhat[(i, j)];
            a[(i, s3 + j)] = v;
            a[(s3 + i, j)] = -v;
            b[(i, s3 + j)] = -v;
            b[(s3 + i, j)] = v;
        }
    }
    let lu = a.lu();
    lu.solve(&b)
        .ok_or_else(|| SolverError::Internal("dense update matrix is singular".into()))
}
