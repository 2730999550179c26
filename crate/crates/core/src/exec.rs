//! Data-parallel execution with a sequential fallback.
//!
//! With the `parallel` feature (on by default) indexed work is spread over
//! the rayon pool; without it every [`Execution`] mode runs sequentially.
//! Results are always collected in index order, so output never depends on
//! the worker count.

/// How indexed batches are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Evaluates `f(0), f(1), …, f(n-1)` and returns the results in index order.
pub fn map_indexed<T, F>(n: u64, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Runs `op` on a dedicated pool of `threads` workers (or the global pool
/// when `threads` is `None`).
pub fn with_threads<R, F>(threads: Option<usize>, op: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => return pool.install(op),
            Err(err) => log::warn!("falling back to the global pool: {err}"),
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    op()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let seq = map_indexed(1000, Execution::Sequential, |i| i * i);
        let par = map_indexed(1000, Execution::Parallel, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[999], 999 * 999);
    }

    #[test]
    fn explicit_pool_runs_op() {
        let v = with_threads(Some(2), || map_indexed(10, Execution::Parallel, |i| i + 1));
        assert_eq!(v, (1..=10).collect::<Vec<u64>>());
    }
}
