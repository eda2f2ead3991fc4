//! Data-parallel dispatch with a sequential fallback.
//!
//! With the `parallel` feature and `threads > 1` work runs on a dedicated
//! rayon pool of exactly `threads` workers; otherwise it runs in order on the
//! calling thread. Results always come back in input order.

/// Worker count from `SPERNER_THREADS`, else the number of available CPUs.
pub fn default_threads() -> usize {
    std::env::var("SPERNER_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&t: &usize| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, R, F>(threads: usize, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;

    if threads <= 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| items.into_par_iter().map(&f).collect()),
        Err(_) => items.into_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, R, F>(_threads: usize, items: Vec<T>, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    items.into_iter().map(f).collect()
}
