//! Numerical dispersion relation of the scheme.
//!
//! For a sampled plane wave `exp(i kappa x)` the first-derivative matrix acts
//! as multiplication by the symbol `dbar_1`, and powers of it by `dbar_p`.
//! These symbols are closed trigonometric sums over the stencil entries; odd
//! orders are purely imaginary, even orders purely real. Note `dbar_p` is the
//! symbol of `(D_1)^p` — for even `p` it differs from the symbol of `D_p` by
//! the Nyquist correction, vanishing at every resolved interior mode.
//!
//! Stacking the three axes gives the per-mode coefficients `a_w` of the
//! modified curl, the amplification factors
//! `lambda = (1 +- i (tau c / 2) R) / (1 -+ i (tau c/2) R)` with
//! `R^2 = |a_x|^2 + |a_y|^2 + |a_z|^2`, and the dispersion relation
//! `tan^2(omega tau / 2) = (tau^2 c^2 / 4) R^2`. Group velocities come from
//! exact term-wise differentiation of the symbol sums, not from finite
//! differences (those serve as the test oracle).
//!
//! Sign convention: symbols are taken on `exp(+i kappa x)`, so `dbar_1` of a
//! resolved mode is `+i kappa`. The paper's sums use the conjugate wave; the
//! two differ by the sign of the odd-order symbols, which every downstream
//! quantity squares away.

use crate::error::SolverError;
use crate::stepper::SchemeOrder;
use crate::Result;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Grid/time parameters of a dispersion evaluation. Decoupled from any
/// concrete simulation grid: `counts`/`spacing` fix the symbol sums.
#[derive(Debug, Clone)]
pub struct DispersionConfig {
    pub counts: [usize; 3],
    pub spacing: [f64; 3],
    pub tau: f64,
    pub c: f64,
    pub order: SchemeOrder,
    /// Points per wavelength for the angle studies (`|kappa| = 2 pi / (N_lambda h)`).
    pub n_lambda: f64,
}

impl DispersionConfig {
    pub fn new(
        counts: [usize; 3],
        spacing: [f64; 3],
        tau: f64,
        c: f64,
        order: SchemeOrder,
        n_lambda: f64,
    ) -> Result<Self> {
        for w in 0..3 {
            if counts[w] < 4 || counts[w] % 2 != 0 {
                return Err(SolverError::Config(format!(
                    "dispersion axis {w} needs an even point count >= 4, got {}",
                    counts[w]
                )));
            }
            if !(spacing[w] > 0.0) {
                return Err(SolverError::Config(format!(
                    "dispersion axis {w} needs a positive spacing"
                )));
            }
        }
        if !(tau > 0.0) || !(c > 0.0) {
            return Err(SolverError::Config(format!(
                "dispersion needs tau > 0 and c > 0, got tau = {tau}, c = {c}"
            )));
        }
        if !(n_lambda > 2.0) {
            return Err(SolverError::Config(format!(
                "points per wavelength must exceed 2 (Nyquist), got {n_lambda}"
            )));
        }
        Ok(Self {
            counts,
            spacing,
            tau,
            c,
            order,
            n_lambda,
        })
    }

    /// Uniform-cell shortcut (the paper's sweeps use N_x = N_y = N_z).
    pub fn uniform(
        n: usize,
        h: f64,
        tau: f64,
        c: f64,
        order: SchemeOrder,
        n_lambda: f64,
    ) -> Result<Self> {
        Self::new([n; 3], [h; 3], tau, c, order, n_lambda)
    }

    /// CFL number `S = c tau / h` (uniform-cell studies use `h_x`).
    pub fn cfl(&self) -> f64 {
        self.c * self.tau / self.spacing[0]
    }

    /// Wave vector of magnitude `2 pi / (N_lambda h)` in the spherical
    /// convention `kappa = |kappa| (sin phi cos theta, sin phi sin theta, cos phi)`.
    pub fn kappa_from_angles(&self, phi: f64, theta: f64) -> [f64; 3] {
        let mag = 2.0 * PI / (self.n_lambda * self.spacing[0]);
        [
            mag * phi.sin() * theta.cos(),
            mag * phi.sin() * theta.sin(),
            mag * phi.cos(),
        ]
    }
}

/// One evaluated wave vector.
#[derive(Debug, Clone)]
pub struct DispersionSample {
    pub kappa: [f64; 3],
    /// The six amplification factors (all of unit modulus).
    pub lambdas: [Complex64; 6],
    pub omega_num: f64,
    /// `c |kappa|`.
    pub omega_exact: f64,
    /// `omega_num / (c |kappa|)`; NaN at `kappa = 0`.
    pub vp_norm: f64,
    /// Analytic group velocity; `None` at `kappa = 0` where the prefactor
    /// is singular.
    pub vg: Option<[f64; 3]>,
    pub vg_mag: Option<f64>,
    /// Propagation angles `(alpha, beta)` of the group velocity.
    pub angles: Option<(f64, f64)>,
}

fn check_zone(n: usize, h: f64, kappa: f64) {
    assert!(
        (h * kappa).abs() <= PI * (1.0 + 1e-9),
        "kappa h = {} outside the Brillouin zone",
        h * kappa
    );
    assert!(n >= 4 && n % 2 == 0, "need an even point count >= 4");
}

/// Symbol of `(D_1^w)^p` on `exp(+i kappa x)` for one axis; `1 <= p <= 5`.
///
/// Odd orders return a purely imaginary value, even orders a purely real one
/// (machine-exact by construction). Panics outside `|h kappa| <= pi` or for
/// unsupported `p`.
pub fn dbar(p: u32, n: usize, h: f64, kappa: f64) -> Complex64 {
    check_zone(n, h, kappa);
    match p {
        1 | 3 | 5 => Complex64::new(0.0, dbar_odd(p, n, h, kappa, false)),
        2 | 4 => Complex64::new(dbar_even(p, n, h, kappa, false), 0.0),
        _ => panic!("dbar is printed for 1 <= p <= 5, got {p}"),
    }
}

/// `d(dbar_p)/d(kappa)`, by term-wise differentiation of the sums.
pub fn dbar_deriv(p: u32, n: usize, h: f64, kappa: f64) -> Complex64 {
    check_zone(n, h, kappa);
    match p {
        1 | 3 | 5 => Complex64::new(0.0, dbar_odd(p, n, h, kappa, true)),
        2 | 4 => Complex64::new(dbar_even(p, n, h, kappa, true), 0.0),
        _ => panic!("dbar is printed for 1 <= p <= 5, got {p}"),
    }
}

/// Imaginary part of the odd symbols (`+` convention). With `deriv` set,
/// each `sin(k h kappa)` term differentiates to `k h cos(k h kappa)`.
fn dbar_odd(p: u32, n: usize, h: f64, kappa: f64, deriv: bool) -> f64 {
    let nf = n as f64;
    let mut acc = 0.0;
    for k in 1..n / 2 {
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let r = kf * PI / nf;
        let (cot, csc) = (1.0 / r.tan(), 1.0 / r.sin());
        let coef = match p {
            1 => -2.0 * sign * (PI / (nf * h)) * cot,
            3 => 2.0 * sign / nf * (PI / h).powi(3) * (cot - 6.0 / (nf * nf) * r.cos() * csc.powi(3)),
            5 => {
                -2.0 * sign
                    * (PI / h).powi(5)
                    * cot
                    * (1.0 / nf
                        + 20.0 / nf.powi(5) * csc * csc * (4.0 + 6.0 * cot * cot - nf * nf))
            }
            _ => unreachable!(),
        };
        let trig = if deriv {
            kf * h * (kf * h * kappa).cos()
        } else {
            (kf * h * kappa).sin()
        };
        acc += coef * trig;
    }
    acc
}

/// The even symbols (real). With `deriv` set, `cos` terms differentiate to
/// `-k h sin` and the Nyquist term to `-(n h / 2) sin`.
fn dbar_even(p: u32, n: usize, h: f64, kappa: f64, deriv: bool) -> f64 {
    let nf = n as f64;
    let ny_sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let (const_term, ny_coef) = match p {
        2 => {
            let s = (PI / (nf * h)).powi(2);
            (
                (nf - (nf * nf + 2.0) / 3.0) * s,
                ny_sign * (nf - 2.0) * s,
            )
        }
        4 => {
            let s = (PI / h).powi(4);
            (
                s * (0.2 - 1.0 / nf + 4.0 / (3.0 * nf * nf) - 8.0 / (15.0 * nf.powi(4))),
                s * ny_sign * (4.0 / (nf * nf) - 8.0 / nf.powi(4) - 1.0 / nf),
            )
        }
        _ => unreachable!(),
    };
    let ny_arg = nf / 2.0 * h * kappa;
    let mut acc = if deriv {
        -ny_coef * (nf * h / 2.0) * ny_arg.sin()
    } else {
        const_term + ny_coef * ny_arg.cos()
    };
    for k in 1..n / 2 {
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let r = kf * PI / nf;
        let csc = 1.0 / r.sin();
        let coef = match p {
            2 => sign * (2.0 * PI * PI / (nf * h * h) - (2.0 * PI / (nf * h)).powi(2) * csc * csc),
            4 => {
                let cot = 1.0 / r.tan();
                2.0 * sign
                    * (PI / h).powi(4)
                    * (csc * csc * (4.0 / (nf * nf) - 8.0 / nf.powi(4) - 24.0 / nf.powi(4) * cot * cot)
                        - 1.0 / nf)
            }
            _ => unreachable!(),
        };
        let trig = if deriv {
            -kf * h * (kf * h * kappa).sin()
        } else {
            (kf * h * kappa).cos()
        };
        acc += coef * trig;
    }
    acc
}

/// Real-valued symbol table of one axis: `m_p = Im dbar_p` for odd p,
/// `d_p = Re dbar_p` for even p, plus kappa-derivatives.
#[derive(Debug, Clone, Copy)]
struct AxisSymbols {
    m1: f64,
    d2: f64,
    m3: f64,
    d4: f64,
    m5: f64,
    m1p: f64,
    d2p: f64,
    m3p: f64,
    d4p: f64,
    m5p: f64,
}

fn axis_symbols(n: usize, h: f64, kappa: f64) -> AxisSymbols {
    AxisSymbols {
        m1: dbar_odd(1, n, h, kappa, false),
        d2: dbar_even(2, n, h, kappa, false),
        m3: dbar_odd(3, n, h, kappa, false),
        d4: dbar_even(4, n, h, kappa, false),
        m5: dbar_odd(5, n, h, kappa, false),
        m1p: dbar_odd(1, n, h, kappa, true),
        d2p: dbar_even(2, n, h, kappa, true),
        m3p: dbar_odd(3, n, h, kappa, true),
        d4p: dbar_even(4, n, h, kappa, true),
        m5p: dbar_odd(5, n, h, kappa, true),
    }
}

/// Imaginary part of `a_x` given the own-axis symbols `sx` and the two
/// partner-axis even symbols; the `y`/`z` coefficients follow by index
/// exchange.
fn a_component(sx: &AxisSymbols, d2y: f64, d2z: f64, d4y: f64, d4z: f64, cfg: &DispersionConfig) -> f64 {
    let mut a = sx.m1;
    let c2t2 = (cfg.c * cfg.tau).powi(2);
    if cfg.order >= SchemeOrder::Four {
        a -= c2t2 / 12.0 * (sx.m3 + sx.m1 * (d2y + d2z));
    }
    if cfg.order >= SchemeOrder::Six {
        a += c2t2 * c2t2 / 120.0
            * (sx.m5 + sx.m1 * (d4y + 2.0 * d2y * d2z + d4z) + 2.0 * sx.m3 * (d2y + d2z));
    }
    a
}

/// Derivative of `Im a_x` with respect to its own kappa.
fn a_own_deriv(sx: &AxisSymbols, d2y: f64, d2z: f64, d4y: f64, d4z: f64, cfg: &DispersionConfig) -> f64 {
    let mut a = sx.m1p;
    let c2t2 = (cfg.c * cfg.tau).powi(2);
    if cfg.order >= SchemeOrder::Four {
        a -= c2t2 / 12.0 * (sx.m3p + sx.m1p * (d2y + d2z));
    }
    if cfg.order >= SchemeOrder::Six {
        a += c2t2 * c2t2 / 120.0
            * (sx.m5p + sx.m1p * (d4y + 2.0 * d2y * d2z + d4z) + 2.0 * sx.m3p * (d2y + d2z));
    }
    a
}

/// Derivative of `Im a_x` with respect to a partner axis `y` (whose symbols
/// are `sy`), with `sz` the remaining axis.
fn a_cross_deriv(sx: &AxisSymbols, sy: &AxisSymbols, sz: &AxisSymbols, cfg: &DispersionConfig) -> f64 {
    let c2t2 = (cfg.c * cfg.tau).powi(2);
    let mut a = 0.0;
    if cfg.order >= SchemeOrder::Four {
        a -= c2t2 / 12.0 * sx.m1 * sy.d2p;
    }
    if cfg.order >= SchemeOrder::Six {
        a += c2t2 * c2t2 / 120.0
            * ((2.0 * sx.m1 * sz.d2 + 2.0 * sx.m3) * sy.d2p + sx.m1 * sy.d4p);
    }
    a
}

fn symbols_3(cfg: &DispersionConfig, kappa: [f64; 3]) -> [AxisSymbols; 3] {
    [
        axis_symbols(cfg.counts[0], cfg.spacing[0], kappa[0]),
        axis_symbols(cfg.counts[1], cfg.spacing[1], kappa[1]),
        axis_symbols(cfg.counts[2], cfg.spacing[2], kappa[2]),
    ]
}

/// The per-mode coefficients `(a_x, a_y, a_z)` of the modified curl symbol;
/// purely imaginary.
pub fn a_coeffs(kappa: [f64; 3], cfg: &DispersionConfig) -> [Complex64; 3] {
    let [sx, sy, sz] = symbols_3(cfg, kappa);
    [
        Complex64::new(0.0, a_component(&sx, sy.d2, sz.d2, sy.d4, sz.d4, cfg)),
        Complex64::new(0.0, a_component(&sy, sz.d2, sx.d2, sz.d4, sx.d4, cfg)),
        Complex64::new(0.0, a_component(&sz, sx.d2, sy.d2, sx.d4, sy.d4, cfg)),
    ]
}

fn quad_sum(kappa: [f64; 3], cfg: &DispersionConfig) -> f64 {
    let a = a_coeffs(kappa, cfg);
    a.iter().map(|v| v.norm_sqr()).sum()
}

/// The six amplification factors; `lambda_{1,2} = 1` and the other four are
/// the conjugate-reciprocal pair built from `R`.
pub fn amplification(kappa: [f64; 3], cfg: &DispersionConfig) -> [Complex64; 6] {
    let r = quad_sum(kappa, cfg).sqrt();
    let x = 0.5 * cfg.tau * cfg.c * r;
    let one = Complex64::new(1.0, 0.0);
    let up = Complex64::new(1.0, x);
    let dn = Complex64::new(1.0, -x);
    let plus = up / dn;
    let minus = dn / up;
    [one, one, plus, plus, minus, minus]
}

/// Numerical frequency `omega = (2 / tau) atan((tau c / 2) R)`.
pub fn numerical_omega(kappa: [f64; 3], cfg: &DispersionConfig) -> f64 {
    let r = quad_sum(kappa, cfg).sqrt();
    2.0 / cfg.tau * (0.5 * cfg.tau * cfg.c * r).atan()
}

/// Normalized phase velocity at a propagation direction, with
/// `|kappa| = 2 pi / (N_lambda h)`:
/// `|v_p / c| = (N_lambda / (pi S)) atan(0.5 sqrt(sum |c tau a_w|^2))`.
pub fn phase_velocity_norm(phi: f64, theta: f64, cfg: &DispersionConfig) -> f64 {
    let kappa = cfg.kappa_from_angles(phi, theta);
    let r = quad_sum(kappa, cfg).sqrt();
    cfg.n_lambda / (PI * cfg.cfl()) * (0.5 * cfg.c * cfg.tau * r).atan()
}

/// Analytic group velocity `(d omega / d kappa_w)` and its magnitude;
/// `None` at `kappa = 0` where the `1/R` prefactor is singular.
pub fn group_velocity(kappa: [f64; 3], cfg: &DispersionConfig) -> Option<([f64; 3], f64)> {
    let [sx, sy, sz] = symbols_3(cfg, kappa);
    let a = [
        a_component(&sx, sy.d2, sz.d2, sy.d4, sz.d4, cfg),
        a_component(&sy, sz.d2, sx.d2, sz.d4, sx.d4, cfg),
        a_component(&sz, sx.d2, sy.d2, sx.d4, sy.d4, cfg),
    ];
    let q: f64 = a.iter().map(|v| v * v).sum();
    if q.sqrt() < 1e-300 {
        return None;
    }
    // dQ/dkappa_w = sum_v 2 a_v (da_v/dkappa_w)
    let da = [
        [
            a_own_deriv(&sx, sy.d2, sz.d2, sy.d4, sz.d4, cfg),
            a_cross_deriv(&sx, &sy, &sz, cfg),
            a_cross_deriv(&sx, &sz, &sy, cfg),
        ],
        [
            a_cross_deriv(&sy, &sx, &sz, cfg),
            a_own_deriv(&sy, sz.d2, sx.d2, sz.d4, sx.d4, cfg),
            a_cross_deriv(&sy, &sz, &sx, cfg),
        ],
        [
            a_cross_deriv(&sz, &sx, &sy, cfg),
            a_cross_deriv(&sz, &sy, &sx, cfg),
            a_own_deriv(&sz, sx.d2, sy.d2, sx.d4, sy.d4, cfg),
        ],
    ];
    let pref = 0.5 * cfg.c / ((1.0 + (0.5 * cfg.c * cfg.tau).powi(2) * q) * q.sqrt());
    let mut vg = [0.0; 3];
    for w in 0..3 {
        let dq: f64 = (0..3).map(|v| 2.0 * a[v] * da[v][w]).sum();
        vg[w] = pref * dq;
    }
    let mag = (vg[0] * vg[0] + vg[1] * vg[1] + vg[2] * vg[2]).sqrt();
    Some((vg, mag))
}

/// Propagation angles of the group velocity:
/// `alpha = atan2(hypot(vg_x, vg_y), vg_z)` (the printed arctan resolved to
/// `[0, pi]`), `beta = atan2(vg_y, vg_x)` wrapped to `[0, 2 pi)`.
pub fn propagation_angles(kappa: [f64; 3], cfg: &DispersionConfig) -> Option<(f64, f64)> {
    let (vg, _) = group_velocity(kappa, cfg)?;
    let alpha = vg[0].hypot(vg[1]).atan2(vg[2]);
    let mut beta = vg[1].atan2(vg[0]);
    if beta < 0.0 {
        beta += 2.0 * PI;
    }
    Some((alpha, beta))
}

/// Evaluates one wave vector completely.
pub fn sample(kappa: [f64; 3], cfg: &DispersionConfig) -> DispersionSample {
    let lambdas = amplification(kappa, cfg);
    let omega_num = numerical_omega(kappa, cfg);
    let mag = (kappa[0] * kappa[0] + kappa[1] * kappa[1] + kappa[2] * kappa[2]).sqrt();
    let omega_exact = cfg.c * mag;
    let vp_norm = if mag > 0.0 {
        omega_num / omega_exact
    } else {
        f64::NAN
    };
    let vg = group_velocity(kappa, cfg);
    DispersionSample {
        kappa,
        lambdas,
        omega_num,
        omega_exact,
        vp_norm,
        vg: vg.map(|g| g.0),
        vg_mag: vg.map(|g| g.1),
        angles: propagation_angles(kappa, cfg),
    }
}

/// Samples the closed Brillouin zone `|h_w kappa_w| <= pi` on a uniform
/// lattice with `resolution[w]` points per axis (Nyquist faces included).
pub fn brillouin_sweep(cfg: &DispersionConfig, resolution: [usize; 3]) -> Vec<DispersionSample> {
    let lin = |w: usize| -> Vec<f64> {
        let r = resolution[w];
        let top = PI / cfg.spacing[w];
        if r <= 1 {
            vec![0.0]
        } else {
            (0..r)
                .map(|i| -top + 2.0 * top * i as f64 / (r - 1) as f64)
                .collect()
        }
    };
    let (kx, ky, kz) = (lin(0), lin(1), lin(2));
    let mut points = Vec::with_capacity(kx.len() * ky.len() * kz.len());
    for z in &kz {
        for y in &ky {
            for x in &kx {
                points.push([*x, *y, *z]);
            }
        }
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        return points.par_iter().map(|k| sample(*k, cfg)).collect();
    }
    #[allow(unreachable_code)]
    points.iter().map(|k| sample(*k, cfg)).collect()
}
