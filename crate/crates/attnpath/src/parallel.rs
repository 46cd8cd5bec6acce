//! Order-preserving parallel map with a configurable worker cap.

use rayon::prelude::*;

pub const THREADS_ENV: &str = "ATTNPATH_THREADS";

/// Worker count: `ATTNPATH_THREADS` if set to a positive integer, else the
/// available parallelism.
pub fn thread_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(n) if n > 0 => n,
        _ => available,
    }
}

/// Applies `f` to every item on a pool of at most `threads` workers.
/// Results come back in input order.
pub fn par_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}
