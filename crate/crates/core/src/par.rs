//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the column loops run on the rayon
//! pool of the caller; without it every helper degrades to a plain loop.
//! Reductions always collect per-item partials and sum them in index order,
//! so results are bit-identical regardless of thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f(column_index, column)` to every `stride`-sized chunk of `data`.
pub(crate) fn for_each_column<F>(data: &mut [f64], stride: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Send + Sync,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(stride)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(stride).enumerate().for_each(|(i, c)| f(i, c));
}

/// Evaluates `f` on `0..n` and sums the results in index order.
pub(crate) fn ordered_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    map_indices(n, f).into_iter().sum()
}

/// Evaluates `f` on `0..n`, preserving order.
pub(crate) fn map_indices<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Runs independent jobs (sweep members, perturbation twins) concurrently.
///
/// `HARTMANN_THREADS` caps the number of worker threads; results keep the
/// input order.
pub fn run_members<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        let cap = std::env::var("HARTMANN_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&n| n > 0);
        match cap.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
            Some(pool) => pool.install(|| items.into_par_iter().map(&f).collect()),
            None => items.into_par_iter().map(&f).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}
