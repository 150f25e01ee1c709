//! Row-wise execution helpers.
//!
//! Every kernel in the crate walks the grid one row at a time. With the
//! `parallel` feature the rows are distributed over the rayon pool, otherwise
//! they run in order on the calling thread. Reductions always return per-row
//! partials that the caller folds in row order, so both paths produce
//! bit-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether the parallel path is compiled in.
pub const PARALLEL_AVAILABLE: bool = cfg!(feature = "parallel");

#[cfg(feature = "parallel")]
pub(crate) fn for_rows<T, F>(data: &mut [T], row_len: usize, parallel: bool, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if parallel {
        data.par_chunks_mut(row_len).enumerate().for_each(|(j, row)| f(j, row));
    } else {
        data.chunks_mut(row_len).enumerate().for_each(|(j, row)| f(j, row));
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_rows<T, F>(data: &mut [T], row_len: usize, _parallel: bool, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    data.chunks_mut(row_len).enumerate().for_each(|(j, row)| f(j, row));
}

#[cfg(feature = "parallel")]
pub(crate) fn for_rows2<T, F>(a: &mut [T], b: &mut [T], row_len: usize, parallel: bool, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T], &mut [T]) + Sync + Send,
{
    if parallel {
        a.par_chunks_mut(row_len).zip(b.par_chunks_mut(row_len)).enumerate().for_each(|(j, (ra, rb))| f(j, ra, rb));
    } else {
        a.chunks_mut(row_len).zip(b.chunks_mut(row_len)).enumerate().for_each(|(j, (ra, rb))| f(j, ra, rb));
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_rows2<T, F>(a: &mut [T], b: &mut [T], row_len: usize, _parallel: bool, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T], &mut [T]) + Sync + Send,
{
    a.chunks_mut(row_len).zip(b.chunks_mut(row_len)).enumerate().for_each(|(j, (ra, rb))| f(j, ra, rb));
}

/// Per-row partial results, returned in row order.
#[cfg(feature = "parallel")]
pub(crate) fn map_rows<R, F>(rows: usize, parallel: bool, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    if parallel {
        (0..rows).into_par_iter().map(f).collect()
    } else {
        (0..rows).map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_rows<R, F>(rows: usize, _parallel: bool, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..rows).map(f).collect()
}

/// Sum per-row partials in row order.
pub(crate) fn ordered_sum<F>(rows: usize, parallel: bool, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_rows(rows, parallel, f).into_iter().fold(0.0, |acc, v| acc + v)
}
