//! Batched 3D FFT on the canonical x-fastest layout.
//!
//! The transform convention matches the spectral diagonalization used by the
//! solver: forward entries `omega^{-jk}`, inverse entries `omega^{+jk} / N`
//! per axis (the plain DFT pair). rustfft implements exactly this apart from
//! the `1/N` factor, which [`Fft3::inverse`] applies.
//!
//! Axis passes run pencil by pencil. The x axis is contiguous and transforms
//! in place; y and z gather each pencil into a scratch layout, transform, and
//! scatter back slab by slab so parallel workers never share output cells.

use crate::parallel::{for_each_chunk_mut, Execution};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// FFT plans for one grid shape.
pub struct Fft3 {
    counts: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(counts: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = [
            planner.plan_fft_forward(counts[0]),
            planner.plan_fft_forward(counts[1]),
            planner.plan_fft_forward(counts[2]),
        ];
        let inverse = [
            planner.plan_fft_inverse(counts[0]),
            planner.plan_fft_inverse(counts[1]),
            planner.plan_fft_inverse(counts[2]),
        ];
        Self {
            counts,
            forward,
            inverse,
        }
    }

    #[inline]
    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1] * self.counts[2]
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place forward 3D transform.
    pub fn forward(&self, data: &mut [Complex64], exec: Execution) {
        assert_eq!(data.len(), self.len());
        self.pass_x(data, &self.forward[0], exec);
        self.pass_y(data, &self.forward[1], exec);
        self.pass_z(data, &self.forward[2], exec);
    }

    /// In-place inverse 3D transform including the `1/(Nx Ny Nz)` scaling.
    pub fn inverse(&self, data: &mut [Complex64], exec: Execution) {
        assert_eq!(data.len(), self.len());
        self.pass_x(data, &self.inverse[0], exec);
        self.pass_y(data, &self.inverse[1], exec);
        self.pass_z(data, &self.inverse[2], exec);
        let scale = 1.0 / self.len() as f64;
        for_each_chunk_mut(exec, data, self.counts[0], |_, chunk| {
            for v in chunk {
                *v *= scale;
            }
        });
    }

    /// Pencils processed per task; amortizes one scratch allocation over the
    /// group and keeps rayon task granularity coarse.
    const GROUP: usize = 32;

    fn process_pencils(
        data: &mut [Complex64],
        len: usize,
        fft: &Arc<dyn Fft<f64>>,
        exec: Execution,
    ) {
        for_each_chunk_mut(exec, data, len * Self::GROUP, |_, chunk| {
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            for pencil in chunk.chunks_mut(len) {
                fft.process_with_scratch(pencil, &mut scratch);
            }
        });
    }

    fn pass_x(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>, exec: Execution) {
        Self::process_pencils(data, self.counts[0], fft, exec);
    }

    fn pass_y(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>, exec: Execution) {
        let [nx, ny, _nz] = self.counts;
        // Pencil p = m*nx + j holds elements data[m*nx*ny + k*nx + j].
        let mut temp = vec![Complex64::default(); data.len()];
        {
            let src = &*data;
            for_each_chunk_mut(exec, &mut temp, ny, |p, pencil| {
                let (m, j) = (p / nx, p % nx);
                let base = m * nx * ny + j;
                for (k, v) in pencil.iter_mut().enumerate() {
                    *v = src[base + k * nx];
                }
            });
        }
        Self::process_pencils(&mut temp, ny, fft, exec);
        // Scatter back one z-slab at a time: slab m reads pencils (m, .).
        let tmp = &temp;
        for_each_chunk_mut(exec, data, nx * ny, |m, slab| {
            for k in 0..ny {
                for j in 0..nx {
                    slab[k * nx + j] = tmp[(m * nx + j) * ny + k];
                }
            }
        });
    }

    fn pass_z(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>, exec: Execution) {
        let [nx, ny, nz] = self.counts;
        // Pencil p = k*nx + j holds elements data[m*nx*ny + k*nx + j].
        let mut temp = vec![Complex64::default(); data.len()];
        {
            let src = &*data;
            for_each_chunk_mut(exec, &mut temp, nz, |p, pencil| {
                let base = p; // k*nx + j
                for (m, v) in pencil.iter_mut().enumerate() {
                    *v = src[base + m * nx * ny];
                }
            });
        }
        Self::process_pencils(&mut temp, nz, fft, exec);
        let tmp = &temp;
        for_each_chunk_mut(exec, data, nx * ny, |m, slab| {
            for i in 0..nx * ny {
                slab[i] = tmp[i * nz + m];
            }
        });
    }
}
