//! Deterministic CSV emission and binary field snapshots.
//!
//! Floats are written with 17 significant digits so every value round-trips
//! exactly; undefined entries (rates at the round-off floor, group velocity
//! at the zone origin, difference-quotient energies at t = 0) print as "nan".
//! Snapshots are a flat block of little-endian f64 — the six components
//! concatenated E then H, each in x-fastest order — plus a text sidecar with
//! the grid, time and materials.

use anyhow::{bail, Context, Result};
use emspect::diagnostics::InvariantRecord;
use emspect::{EMState, GridSpec, ScalarField, VectorField};
use std::fmt::Write as _;
use std::path::Path;

/// 17 significant digits: exact f64 round-trip.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    fmt_f64(x.unwrap_or(f64::NAN))
}

pub fn converge_csv(rows: &[emspect::benchmark::ConvergenceRow]) -> String {
    let mut out = String::from("tau,Linf,L2,rate,wall_s\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.tau),
            fmt_f64(r.linf),
            fmt_f64(r.l2),
            fmt_opt(r.rate),
            fmt_f64(r.wall_s),
        );
    }
    out
}

pub fn spatial_csv(rows: &[emspect::benchmark::SpatialRow]) -> String {
    let mut out = String::from("n,Linf,L2,wall_s\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.n,
            fmt_f64(r.linf),
            fmt_f64(r.l2),
            fmt_f64(r.wall_s),
        );
    }
    out
}

pub fn invariants_csv(records: &[InvariantRecord]) -> String {
    let mut out = String::from(
        "t,E1,E2,E3,E4x,E4y,E4z,E5x,E5y,E5z,Mx,My,Mz,divE_inf,divH_inf\n",
    );
    for r in records {
        let e5 = r.e5.unwrap_or([f64::NAN; 3]);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.e1),
            fmt_f64(r.e2),
            fmt_opt(r.e3),
            fmt_f64(r.e4[0]),
            fmt_f64(r.e4[1]),
            fmt_f64(r.e4[2]),
            fmt_f64(e5[0]),
            fmt_f64(e5[1]),
            fmt_f64(e5[2]),
            fmt_f64(r.momentum[0]),
            fmt_f64(r.momentum[1]),
            fmt_f64(r.momentum[2]),
            fmt_f64(r.div_e_inf),
            fmt_f64(r.div_h_inf),
        );
    }
    out
}

pub fn dispersion_csv(samples: &[emspect::dispersion::DispersionSample]) -> String {
    let mut out = String::from(
        "kx,ky,kz,abs_lambda_max,omega_num,omega_exact,vp_norm,vgx,vgy,vgz,vg_mag,alpha,beta\n",
    );
    for s in samples {
        let lmax = s.lambdas.iter().map(|l| l.norm()).fold(0.0f64, f64::max);
        let vg = s.vg.unwrap_or([f64::NAN; 3]);
        let (alpha, beta) = s.angles.unwrap_or((f64::NAN, f64::NAN));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(s.kappa[0]),
            fmt_f64(s.kappa[1]),
            fmt_f64(s.kappa[2]),
            fmt_f64(lmax),
            fmt_f64(s.omega_num),
            fmt_f64(s.omega_exact),
            fmt_f64(s.vp_norm),
            fmt_f64(vg[0]),
            fmt_f64(vg[1]),
            fmt_f64(vg[2]),
            fmt_opt(s.vg_mag),
            fmt_f64(alpha),
            fmt_f64(beta),
        );
    }
    out
}

/// Writes `<stem>.bin` (fields) and `<stem>.meta` (sidecar).
pub fn write_snapshot(stem: &Path, state: &EMState) -> Result<()> {
    let grid = state.grid();
    let mut bytes = Vec::with_capacity(6 * grid.len() * 8);
    for comp in [
        &state.e.x, &state.e.y, &state.e.z, &state.h.x, &state.h.y, &state.h.z,
    ] {
        for v in &comp.values {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    std::fs::write(stem.with_extension("bin"), bytes)
        .with_context(|| format!("writing {}", stem.with_extension("bin").display()))?;

    let mut meta = String::from("emspect-fields v1\n");
    for (name, b) in ["x", "y", "z"].iter().zip(grid.bounds) {
        let _ = writeln!(meta, "bounds_{name} {} {}", fmt_f64(b[0]), fmt_f64(b[1]));
    }
    let _ = writeln!(
        meta,
        "counts {} {} {}",
        grid.counts[0], grid.counts[1], grid.counts[2]
    );
    let _ = writeln!(meta, "t {}", fmt_f64(state.t));
    let _ = writeln!(meta, "eps {}", fmt_f64(state.eps));
    let _ = writeln!(meta, "mu {}", fmt_f64(state.mu));
    let _ = writeln!(meta, "layout x-fastest Ex Ey Ez Hx Hy Hz f64-le");
    std::fs::write(stem.with_extension("meta"), meta)
        .with_context(|| format!("writing {}", stem.with_extension("meta").display()))?;
    Ok(())
}

/// Restores a snapshot written by [`write_snapshot`].
pub fn read_snapshot(stem: &Path) -> Result<EMState> {
    let meta = std::fs::read_to_string(stem.with_extension("meta"))
        .with_context(|| format!("reading {}", stem.with_extension("meta").display()))?;
    let mut bounds = [[f64::NAN; 2]; 3];
    let mut counts = [0usize; 3];
    let mut t = f64::NAN;
    let mut eps = f64::NAN;
    let mut mu = f64::NAN;
    for line in meta.lines() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("bounds_x") | Some("bounds_y") | Some("bounds_z") => {
                let axis = match line.as_bytes()[7] {
                    b'x' => 0,
                    b'y' => 1,
                    _ => 2,
                };
                bounds[axis] = [
                    it.next().context("bounds lo")?.parse()?,
                    it.next().context("bounds hi")?.parse()?,
                ];
            }
            Some("counts") => {
                for c in counts.iter_mut() {
                    *c = it.next().context("counts")?.parse()?;
                }
            }
            Some("t") => t = it.next().context("t")?.parse()?,
            Some("eps") => eps = it.next().context("eps")?.parse()?,
            Some("mu") => mu = it.next().context("mu")?.parse()?,
            _ => {}
        }
    }
    let grid = GridSpec::new(bounds, counts)?;
    let bytes = std::fs::read(stem.with_extension("bin"))
        .with_context(|| format!("reading {}", stem.with_extension("bin").display()))?;
    let want = 6 * grid.len() * 8;
    if bytes.len() != want {
        bail!(
            "snapshot {} holds {} bytes, grid needs {}",
            stem.with_extension("bin").display(),
            bytes.len(),
            want
        );
    }
    let mut comps: Vec<ScalarField> = Vec::with_capacity(6);
    for c in 0..6 {
        let mut values = Vec::with_capacity(grid.len());
        let base = c * grid.len() * 8;
        for i in 0..grid.len() {
            let mut b = [0u8; 8];
            b.copy_from_slice(&bytes[base + 8 * i..base + 8 * i + 8]);
            values.push(f64::from_le_bytes(b));
        }
        comps.push(ScalarField::from_values(grid, values)?);
    }
    let hz = comps.pop().unwrap();
    let hy = comps.pop().unwrap();
    let hx = comps.pop().unwrap();
    let ez = comps.pop().unwrap();
    let ey = comps.pop().unwrap();
    let ex = comps.pop().unwrap();
    Ok(EMState::new(
        VectorField::new(ex, ey, ez)?,
        VectorField::new(hx, hy, hz)?,
        t,
        eps,
        mu,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_roundtrips() {
        for x in [4.5198e-08, -1.0 / 3.0, 1.5, 0.0, 1e-300] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(f64::NAN), "nan");
    }

    #[test]
    fn snapshot_roundtrip_is_exact() {
        let grid = GridSpec::cube(0.0, 2.0, 4).unwrap();
        let params = emspect::benchmark::BenchmarkParams::defaults();
        let state = emspect::benchmark::exact_state(&params, &grid, 0.37).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("fields");
        write_snapshot(&stem, &state).unwrap();
        let back = read_snapshot(&stem).unwrap();
        assert_eq!(back.t, state.t);
        assert_eq!(back.eps, state.eps);
        assert_eq!(back.e.x.values, state.e.x.values);
        assert_eq!(back.h.z.values, state.h.z.values);
    }
}
