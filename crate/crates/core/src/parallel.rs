//! Thin switch between rayon and sequential execution.
//!
//! Every parallel loop in the crate writes disjoint chunks and performs no
//! reductions, so results are bitwise identical for any thread count and for
//! the sequential path.

/// How data-parallel regions execute.
///
/// `Parallel` uses rayon when the `parallel` feature is enabled and silently
/// degrades to sequential execution otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Arrays smaller than this run serially even under `Execution::Parallel`:
/// fork-join overhead dwarfs the per-element work on small grids (a 16^3
/// field is 4096 elements). Results are identical either way.
const PAR_MIN_LEN: usize = 1 << 14;

#[cfg(feature = "parallel")]
fn go_parallel(exec: Execution, len: usize) -> bool {
    exec == Execution::Parallel && len >= PAR_MIN_LEN
}

/// Applies `f(chunk_index, chunk)` over `data` split into `size`-element
/// chunks (last one may be short).
pub fn for_each_chunk_mut<T, F>(exec: Execution, data: &mut [T], size: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    #[cfg(feature = "parallel")]
    if go_parallel(exec, data.len()) {
        use rayon::prelude::*;
        data.par_chunks_mut(size)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = exec;
    for (i, c) in data.chunks_mut(size).enumerate() {
        f(i, c);
    }
}

/// Zips three equally long slices chunkwise and applies
/// `f(chunk_index, c0, c1, c2)`.
pub fn for_each_zip3_mut<T, F>(
    exec: Execution,
    size: usize,
    a: &mut [T],
    b: &mut [T],
    c: &mut [T],
    f: F,
) where
    T: Send,
    F: Fn(usize, &mut [T], &mut [T], &mut [T]) + Sync,
{
    #[cfg(feature = "parallel")]
    if go_parallel(exec, a.len()) {
        use rayon::prelude::*;
        (
            a.par_chunks_mut(size),
            b.par_chunks_mut(size),
            c.par_chunks_mut(size),
        )
            .into_par_iter()
            .enumerate()
            .for_each(|(i, (ca, cb, cc))| f(i, ca, cb, cc));
        return;
    }
    let _ = exec;
    let it = a
        .chunks_mut(size)
        .zip(b.chunks_mut(size))
        .zip(c.chunks_mut(size))
        .enumerate();
    for (i, ((ca, cb), cc)) in it {
        f(i, ca, cb, cc);
    }
}

/// Zips six equally long slices chunkwise and applies
/// `f(chunk_index, c0, .., c5)`; used for the per-mode solves where the six
/// field components live in separate arrays.
#[allow(clippy::too_many_arguments)]
pub fn for_each_zip6_mut<T, F>(
    exec: Execution,
    size: usize,
    a: &mut [T],
    b: &mut [T],
    c: &mut [T],
    d: &mut [T],
    e: &mut [T],
    g: &mut [T],
    f: F,
) where
    T: Send,
    F: Fn(usize, &mut [T], &mut [T], &mut [T], &mut [T], &mut [T], &mut [T]) + Sync,
{
    #[cfg(feature = "parallel")]
    if go_parallel(exec, a.len()) {
        use rayon::prelude::*;
        (
            a.par_chunks_mut(size),
            b.par_chunks_mut(size),
            c.par_chunks_mut(size),
            d.par_chunks_mut(size),
            e.par_chunks_mut(size),
            g.par_chunks_mut(size),
        )
            .into_par_iter()
            .enumerate()
            .for_each(|(i, (ca, cb, cc, cd, ce, cg))| f(i, ca, cb, cc, cd, ce, cg));
        return;
    }
    let _ = exec;
    let it = a
        .chunks_mut(size)
        .zip(b.chunks_mut(size))
        .zip(c.chunks_mut(size))
        .zip(d.chunks_mut(size))
        .zip(e.chunks_mut(size))
        .zip(g.chunks_mut(size))
        .enumerate();
    for (i, (((((ca, cb), cc), cd), ce), cg)) in it {
        f(i, ca, cb, cc, cd, ce, cg);
    }
}
