//! Periodic cuboid grids, collocation-point fields and discrete norms.
//!
//! Fields are stored in a single flat array with x varying fastest:
//! entry `N_x*N_y*(m-1) + N_x*(k-1) + j` holds the value at collocation
//! point `(x_j, y_k, z_m)`. All spectral operators and the per-mode solver
//! rely on this ordering, so it is fixed here once.

use crate::error::SolverError;
use crate::Result;
use std::f64::consts::PI;

/// One of the three coordinate axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Uniform periodic grid on `[x_L,x_R] x [y_L,y_R] x [z_L,z_R]`.
///
/// `counts[w]` collocation points per axis (even, >= 4), spacing
/// `h_w = L_w / N_w`, fundamental wavenumber `mu_w = 2 pi / L_w`.
/// Collocation point `j` on axis `w` (1-based) sits at `w_L + (j-1) h_w`;
/// the right endpoint is the periodic image of the left one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub bounds: [[f64; 2]; 3],
    pub counts: [usize; 3],
    pub spacing: [f64; 3],
    pub fundamental: [f64; 3],
}

impl GridSpec {
    /// Builds a grid, validating counts (even, >= 4) and bounds.
    pub fn new(bounds: [[f64; 2]; 3], counts: [usize; 3]) -> Result<Self> {
        let mut spacing = [0.0; 3];
        let mut fundamental = [0.0; 3];
        for w in 0..3 {
            let [lo, hi] = bounds[w];
            if !lo.is_finite() || !hi.is_finite() || hi <= lo {
                return Err(SolverError::Config(format!(
                    "degenerate bounds on axis {w}: [{lo}, {hi}]"
                )));
            }
            let n = counts[w];
            if n < 4 || n % 2 != 0 {
                return Err(SolverError::Config(format!(
                    "axis {w} needs an even point count >= 4, got {n}"
                )));
            }
            let len = hi - lo;
            spacing[w] = len / n as f64;
            fundamental[w] = 2.0 * PI / len;
        }
        Ok(Self {
            bounds,
            counts,
            spacing,
            fundamental,
        })
    }

    /// Cube shortcut: same bounds and count on every axis.
    pub fn cube(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new([[lo, hi]; 3], [n; 3])
    }

    /// Total number of collocation points.
    #[inline]
    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1] * self.counts[2]
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of 0-based `(j, k, m)`, x fastest.
    #[inline]
    pub fn flatten(&self, j: usize, k: usize, m: usize) -> usize {
        (m * self.counts[1] + k) * self.counts[0] + j
    }

    /// Inverse of [`flatten`](Self::flatten).
    #[inline]
    pub fn unflatten(&self, i: usize) -> (usize, usize, usize) {
        let j = i % self.counts[0];
        let rest = i / self.counts[0];
        (j, rest % self.counts[1], rest / self.counts[1])
    }

    /// Coordinates of the 0-based node `(j, k, m)`.
    #[inline]
    pub fn point(&self, j: usize, k: usize, m: usize) -> [f64; 3] {
        [
            self.bounds[0][0] + j as f64 * self.spacing[0],
            self.bounds[1][0] + k as f64 * self.spacing[1],
            self.bounds[2][0] + m as f64 * self.spacing[2],
        ]
    }

    /// Cell volume `h_x h_y h_z` weighting the discrete inner product.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing[0] * self.spacing[1] * self.spacing[2]
    }

    fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(SolverError::Mismatch(
                "fields live on different grids".into(),
            ))
        }
    }
}

/// Real scalar field sampled at the collocation points of one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid,
        }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(SolverError::Mismatch(format!(
                "value vector has {} entries, grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x, y, z)` at every collocation point in canonical order.
    pub fn sample<F: Fn(f64, f64, f64) -> f64>(grid: GridSpec, f: F) -> Self {
        let [nx, ny, nz] = grid.counts;
        let mut values = Vec::with_capacity(grid.len());
        for m in 0..nz {
            for k in 0..ny {
                for j in 0..nx {
                    let [x, y, z] = grid.point(j, k, m);
                    values.push(f(x, y, z));
                }
            }
        }
        Self { grid, values }
    }

    /// Discrete inner product `h_x h_y h_z sum_i u_i v_i`.
    pub fn inner_product(&self, other: &ScalarField) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let mut acc = 0.0;
        for (a, b) in self.values.iter().zip(&other.values) {
            acc += a * b;
        }
        Ok(acc * self.grid.cell_volume())
    }

    /// `||u||_h = sqrt(<u, u>_h)`.
    pub fn norm_h(&self) -> f64 {
        let mut acc = 0.0;
        for a in &self.values {
            acc += a * a;
        }
        (acc * self.grid.cell_volume()).sqrt()
    }

    /// `||u||_{h,inf} = max_i |u_i|`.
    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Real vector field; the three components share one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
    pub z: ScalarField,
}

impl VectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            x: ScalarField::zeros(grid),
            y: ScalarField::zeros(grid),
            z: ScalarField::zeros(grid),
        }
    }

    pub fn new(x: ScalarField, y: ScalarField, z: ScalarField) -> Result<Self> {
        x.grid.ensure_same(&y.grid)?;
        x.grid.ensure_same(&z.grid)?;
        Ok(Self { x, y, z })
    }

    /// Samples three component functions on one grid.
    pub fn sample<Fx, Fy, Fz>(grid: GridSpec, fx: Fx, fy: Fy, fz: Fz) -> Self
    where
        Fx: Fn(f64, f64, f64) -> f64,
        Fy: Fn(f64, f64, f64) -> f64,
        Fz: Fn(f64, f64, f64) -> f64,
    {
        Self {
            x: ScalarField::sample(grid, fx),
            y: ScalarField::sample(grid, fy),
            z: ScalarField::sample(grid, fz),
        }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.x.grid
    }

    pub fn component(&self, axis: Axis) -> &ScalarField {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }

    /// Vector inner product: the sum of the three componentwise products.
    pub fn inner_product(&self, other: &VectorField) -> Result<f64> {
        Ok(self.x.inner_product(&other.x)?
            + self.y.inner_product(&other.y)?
            + self.z.inner_product(&other.z)?)
    }

    pub fn norm_h(&self) -> f64 {
        let sq = |f: &ScalarField| {
            let n = f.norm_h();
            n * n
        };
        (sq(&self.x) + sq(&self.y) + sq(&self.z)).sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.x
            .norm_inf()
            .max(self.y.norm_inf())
            .max(self.z.norm_inf())
    }
}

/// Electromagnetic state: both fields, the current time and the (constant)
/// material parameters.
#[derive(Debug, Clone)]
pub struct EMState {
    pub e: VectorField,
    pub h: VectorField,
    pub t: f64,
    pub eps: f64,
    pub mu: f64,
    /// Wave speed `1/sqrt(eps mu)`.
    pub c: f64,
}

impl EMState {
    pub fn new(e: VectorField, h: VectorField, t: f64, eps: f64, mu: f64) -> Result<Self> {
        e.grid().ensure_same(h.grid())?;
        if !(eps > 0.0) || !(mu > 0.0) {
            return Err(SolverError::Config(format!(
                "material parameters must be positive: eps = {eps}, mu = {mu}"
            )));
        }
        Ok(Self {
            e,
            h,
            t,
            eps,
            mu,
            c: 1.0 / (eps * mu).sqrt(),
        })
    }

    pub fn zeros(grid: GridSpec, eps: f64, mu: f64) -> Result<Self> {
        Self::new(
            VectorField::zeros(grid),
            VectorField::zeros(grid),
            0.0,
            eps,
            mu,
        )
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        self.e.grid()
    }
}
