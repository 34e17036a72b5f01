//! Index-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! results always come back in index order, so output does not depend on the
//! schedule.

/// How to run an index-parallel map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when the crate is built without `parallel`.
    #[default]
    Parallel,
}

pub fn map_indexed<T, F>(len: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..len).map(f).collect(),
        Execution::Parallel => map_parallel(len, f),
    }
}

#[cfg(feature = "parallel")]
fn map_parallel<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_parallel<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}

/// Runs `f` with at most `workers` threads. `None` or `Some(0)` keeps the
/// global pool.
#[cfg(feature = "parallel")]
pub fn with_workers<T: Send, F: FnOnce() -> T + Send>(workers: Option<usize>, f: F) -> T {
    match workers {
        Some(w) if w > 0 => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_workers<T: Send, F: FnOnce() -> T + Send>(_workers: Option<usize>, f: F) -> T {
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_matches_sequential_order() {
        let seq = map_indexed(1000, Execution::Sequential, |i| i * i);
        let par = with_workers(Some(3), || map_indexed(1000, Execution::Parallel, |i| i * i));
        assert_eq!(seq, par);
    }
}
