//! Fourier pseudo-spectral differentiation (transform-diagonal path).
//!
//! A derivative of order `p` along one axis is a forward FFT, a diagonal
//! multiply by `Lambda^p` (odd `p`) or `LambdaTilde^p` (even `p`), and an
//! inverse FFT. `Lambda` zeroes the Nyquist mode, `LambdaTilde` keeps it;
//! only `Lambda` ever enters the solver because the modified curl uses odd
//! powers exclusively.
//!
//! Inverse transforms of conjugate-symmetric data are real up to round-off.
//! The imaginary residue is checked against a relative threshold before it
//! is dropped: exceeding it means broken conjugate symmetry (i.e. a bug),
//! not an accuracy problem.

use crate::error::SolverError;
use crate::fft::Fft3;
use crate::grid::{Axis, GridSpec, ScalarField, VectorField};
use crate::parallel::Execution;
use crate::stepper::SchemeOrder;
use crate::Result;
use num_complex::Complex64;

/// Relative bound on the imaginary residue left after an inverse transform
/// of data that should be conjugate-symmetric.
pub const IMAG_RESIDUE_REL: f64 = 1e-12;

/// Which diagonal a transform application uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalVariant {
    /// `Lambda`: Nyquist entry zero; correct for odd derivative orders.
    Lambda,
    /// `LambdaTilde`: Nyquist entry `i mu N/2`; correct for even orders.
    LambdaTilde,
}

/// Per-axis diagonals of the spectral derivative in DFT ordering.
///
/// `lambda[w][n] = i mu_w * (0, 1, .., N/2-1, 0, -N/2+1, .., -1)` and
/// `lambda_tilde` replaces the zero at the Nyquist slot with `i mu_w N/2`.
#[derive(Debug, Clone)]
pub struct WavenumberTable {
    pub lambda: [Vec<Complex64>; 3],
    pub lambda_tilde: [Vec<Complex64>; 3],
}

impl WavenumberTable {
    pub fn new(grid: &GridSpec) -> Self {
        let mut lambda: [Vec<Complex64>; 3] = Default::default();
        let mut lambda_tilde: [Vec<Complex64>; 3] = Default::default();
        for w in 0..3 {
            let n = grid.counts[w];
            let mu = grid.fundamental[w];
            let mut lam = Vec::with_capacity(n);
            let mut tld = Vec::with_capacity(n);
            for i in 0..n {
                let k = if i < n / 2 {
                    i as f64
                } else if i == n / 2 {
                    0.0
                } else {
                    i as f64 - n as f64
                };
                lam.push(Complex64::new(0.0, mu * k));
                let kt = if i == n / 2 { n as f64 / 2.0 } else { k };
                tld.push(Complex64::new(0.0, mu * kt));
            }
            lambda[w] = lam;
            lambda_tilde[w] = tld;
        }
        Self {
            lambda,
            lambda_tilde,
        }
    }

    pub fn diagonal(&self, axis: Axis, variant: DiagonalVariant) -> &[Complex64] {
        match variant {
            DiagonalVariant::Lambda => &self.lambda[axis.index()],
            DiagonalVariant::LambdaTilde => &self.lambda_tilde[axis.index()],
        }
    }
}

/// Spectral operator engine for one grid: FFT plans plus wavenumber tables.
///
/// All operators are pure functions of their inputs; the engine itself is
/// read-only after construction and can be shared across threads.
pub struct SpectralOps {
    grid: GridSpec,
    table: WavenumberTable,
    fft: Fft3,
    exec: Execution,
}

impl SpectralOps {
    pub fn new(grid: GridSpec) -> Self {
        Self {
            table: WavenumberTable::new(&grid),
            fft: Fft3::new(grid.counts),
            grid,
            exec: Execution::default(),
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn table(&self) -> &WavenumberTable {
        &self.table
    }

    #[inline]
    pub fn fft(&self) -> &Fft3 {
        &self.fft
    }

    #[inline]
    pub fn execution(&self) -> Execution {
        self.exec
    }

    fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if *grid == self.grid {
            Ok(())
        } else {
            Err(SolverError::Mismatch(
                "field grid does not match the spectral engine's grid".into(),
            ))
        }
    }

    pub(crate) fn to_spectral(&self, f: &ScalarField) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.forward(&mut data, self.exec);
        data
    }

    /// Inverse transform followed by the conjugate-symmetry residue check.
    ///
    /// `spectral_scale` must bound the modulus the spectral data reached
    /// *before* any cancelling combination (input magnitude times operator
    /// gain): round-off is generated at that scale, so outputs which are
    /// legitimately pure cancellation dust (the curl of a gradient, the
    /// divergence of a curl) still pass while a genuine conjugate-symmetry
    /// bug, whose residue is comparable to the output itself, does not.
    /// The threshold compares against the larger of the output magnitude and
    /// `spectral_scale / N_total`.
    pub(crate) fn to_physical(
        &self,
        mut data: Vec<Complex64>,
        spectral_scale: f64,
    ) -> Result<Vec<f64>> {
        self.fft.inverse(&mut data, self.exec);
        let mut max_im = 0.0f64;
        let mut max_abs = 0.0f64;
        for v in &data {
            max_im = max_im.max(v.im.abs());
            max_abs = max_abs.max(v.norm_sqr());
        }
        let max_abs = max_abs.sqrt();
        let scale = max_abs.max(spectral_scale / self.grid.len() as f64);
        if max_im > IMAG_RESIDUE_REL * scale {
            return Err(SolverError::Internal(format!(
                "imaginary residue {max_im:.3e} exceeds {IMAG_RESIDUE_REL:.0e} x scale {scale:.3e}; \
                 conjugate symmetry is broken"
            )));
        }
        Ok(data.into_iter().map(|v| v.re).collect())
    }

    /// Applies the order-`p` spectral derivative along `axis`.
    ///
    /// The variant must match the parity of `p` (odd orders diagonalize over
    /// `Lambda`, even ones over `LambdaTilde`).
    pub fn apply_dp(
        &self,
        u: &ScalarField,
        axis: Axis,
        p: u32,
        variant: DiagonalVariant,
    ) -> Result<ScalarField> {
        self.check_grid(&u.grid)?;
        if p == 0 {
            return Err(SolverError::Config("derivative order p must be >= 1".into()));
        }
        let odd = p % 2 == 1;
        match (odd, variant) {
            (true, DiagonalVariant::Lambda) | (false, DiagonalVariant::LambdaTilde) => {}
            _ => {
                return Err(SolverError::Config(format!(
                    "diagonal variant {variant:?} inconsistent with derivative order p = {p}"
                )))
            }
        }
        let diag: Vec<Complex64> = self
            .table
            .diagonal(axis, variant)
            .iter()
            .map(|d| d.powi(p as i32))
            .collect();
        let diag_max = diag.iter().fold(0.0f64, |m, d| m.max(d.norm()));
        let mut data = self.to_spectral(u);
        let in_max = max_modulus(&data);
        let [nx, ny, _] = self.grid.counts;
        for (i, row) in data.chunks_mut(nx).enumerate() {
            let (k, m) = (i % ny, i / ny);
            match axis {
                Axis::X => {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v *= diag[j];
                    }
                }
                Axis::Y => {
                    let d = diag[k];
                    for v in row.iter_mut() {
                        *v *= d;
                    }
                }
                Axis::Z => {
                    let d = diag[m];
                    for v in row.iter_mut() {
                        *v *= d;
                    }
                }
            }
        }
        let values = self.to_physical(data, in_max * diag_max)?;
        ScalarField::from_values(self.grid, values)
    }

    /// First spectral derivative along one axis (the `D_1, D_2, D_3` blocks).
    pub fn derivative(&self, u: &ScalarField, axis: Axis) -> Result<ScalarField> {
        self.apply_dp(u, axis, 1, DiagonalVariant::Lambda)
    }

    /// Discrete curl: per mode the skew block
    /// `a = [[0, -Lz, Ly], [Lz, 0, -Lx], [-Ly, Lx, 0]]`.
    pub fn curl(&self, v: &VectorField) -> Result<VectorField> {
        self.mode_block_apply(v, |_| 1.0)
    }

    /// The modified curl `Dhat v = D v + (c^2 tau^2/12) D^3 v + (c^4 tau^4/120) D^5 v`
    /// truncated by `order`, evaluated with a single transform pair.
    ///
    /// Per mode `a^3 = |xi|^2 a`, so the whole polynomial collapses to the
    /// scalar gain `1 + (c tau)^2 |xi|^2 / 12 + (c tau)^4 |xi|^4 / 120` on the
    /// curl block.
    pub fn dhat_apply(
        &self,
        v: &VectorField,
        tau: f64,
        c: f64,
        order: SchemeOrder,
    ) -> Result<VectorField> {
        let c2t2 = c * c * tau * tau;
        self.mode_block_apply(v, move |xi2| dhat_gain(xi2, c2t2, order))
    }

    /// Spectral divergence of `scale * v`.
    pub fn divergence_scaled(&self, v: &VectorField, scale: f64) -> Result<ScalarField> {
        self.check_grid(v.grid())?;
        let sx = self.to_spectral(&v.x);
        let sy = self.to_spectral(&v.y);
        let sz = self.to_spectral(&v.z);
        let in_max = max_modulus(&sx).max(max_modulus(&sy)).max(max_modulus(&sz));
        let [nx, ny, _] = self.grid.counts;
        let lx = &self.table.lambda[0];
        let ly = &self.table.lambda[1];
        let lz = &self.table.lambda[2];
        let lam_max = self.lambda_max();
        let mut out = vec![Complex64::default(); self.grid.len()];
        for (i, row) in out.chunks_mut(nx).enumerate() {
            let (k, m) = (i % ny, i / ny);
            let base = i * nx;
            for (j, v) in row.iter_mut().enumerate() {
                let idx = base + j;
                *v = scale * (lx[j] * sx[idx] + ly[k] * sy[idx] + lz[m] * sz[idx]);
            }
        }
        let values = self.to_physical(out, in_max * 3.0 * lam_max * scale.abs())?;
        ScalarField::from_values(self.grid, values)
    }

    /// Largest first-derivative diagonal modulus over the three axes.
    fn lambda_max(&self) -> f64 {
        self.table
            .lambda
            .iter()
            .flat_map(|axis| axis.iter())
            .fold(0.0f64, |m, v| m.max(v.norm()))
    }

    /// Shared kernel of [`curl`](Self::curl) and [`dhat_apply`](Self::dhat_apply):
    /// applies `gain(|xi|^2) * a` per mode.
    fn mode_block_apply<G>(&self, v: &VectorField, gain: G) -> Result<VectorField>
    where
        G: Fn(f64) -> f64 + Sync,
    {
        self.check_grid(v.grid())?;
        let sx = self.to_spectral(&v.x);
        let sy = self.to_spectral(&v.y);
        let sz = self.to_spectral(&v.z);
        let in_max = max_modulus(&sx).max(max_modulus(&sy)).max(max_modulus(&sz));
        let [nx, ny, _] = self.grid.counts;
        let lx = &self.table.lambda[0];
        let ly = &self.table.lambda[1];
        let lz = &self.table.lambda[2];
        let lam_max = self.lambda_max();
        let xi2_max: f64 = self
            .table
            .lambda
            .iter()
            .map(|axis| axis.iter().fold(0.0f64, |m, v| m.max(v.norm_sqr())))
            .sum();

        let mut wx = vec![Complex64::default(); self.grid.len()];
        let mut wy = vec![Complex64::default(); self.grid.len()];
        let mut wz = vec![Complex64::default(); self.grid.len()];
        // Row-parallel over the three outputs; inputs are shared read-only.
        let (sx, sy, sz) = (&sx, &sy, &sz);
        let gain = &gain;
        crate::parallel::for_each_zip3_mut(
            self.exec,
            nx,
            &mut wx,
            &mut wy,
            &mut wz,
            |i, row_x, row_y, row_z| {
                let (k, m) = (i % ny, i / ny);
                let base = i * nx;
                for j in 0..nx {
                    let idx = base + j;
                    let (lxj, lyk, lzm) = (lx[j], ly[k], lz[m]);
                    let xi2 = lxj.im * lxj.im + lyk.im * lyk.im + lzm.im * lzm.im;
                    let g = gain(xi2);
                    let (vx, vy, vz) = (sx[idx], sy[idx], sz[idx]);
                    row_x[j] = g * (-lzm * vy + lyk * vz);
                    row_y[j] = g * (lzm * vx - lxj * vz);
                    row_z[j] = g * (-lyk * vx + lxj * vy);
                }
            },
        );
        let spectral_scale = in_max * 2.0 * lam_max * gain(xi2_max).abs();
        let x = ScalarField::from_values(self.grid, self.to_physical(wx, spectral_scale)?)?;
        let y = ScalarField::from_values(self.grid, self.to_physical(wy, spectral_scale)?)?;
        let z = ScalarField::from_values(self.grid, self.to_physical(wz, spectral_scale)?)?;
        VectorField::new(x, y, z)
    }
}

/// Largest modulus in a complex array.
pub(crate) fn max_modulus(data: &[Complex64]) -> f64 {
    data.iter()
        .fold(0.0f64, |m, v| m.max(v.norm_sqr()))
        .sqrt()
}

/// Scalar gain of the modified curl on a mode with squared wavenumber `xi2`.
#[inline]
pub(crate) fn dhat_gain(xi2: f64, c2t2: f64, order: SchemeOrder) -> f64 {
    match order {
        SchemeOrder::Two => 1.0,
        SchemeOrder::Four => 1.0 + c2t2 * xi2 / 12.0,
        SchemeOrder::Six => 1.0 + c2t2 * xi2 / 12.0 + c2t2 * c2t2 * xi2 * xi2 / 120.0,
    }
}
