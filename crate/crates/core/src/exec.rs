//! Execution strategy for the data-parallel inner loops.
//!
//! Every parallel loop in the crate goes through [`Exec::map`], which
//! returns results in index order. Floating-point reductions are never
//! split across threads, so outputs are bit-identical whichever strategy
//! runs them and however many worker threads the pool has.

/// How independent work items are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled,
    /// otherwise falls back to sequential execution.
    #[default]
    Parallel,
}

impl Exec {
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            Exec::Parallel => par_map(n, f),
        }
    }

    /// Like [`Exec::map`] for fallible work; the first error in index order wins.
    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        self.map(n, f).into_iter().collect()
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Configures the global pool from `HILFER_THREADS`, if set.
///
/// Returns the thread count that was requested. Calling this after the
/// pool has been initialised is harmless.
pub fn init_threads_from_env() -> Option<usize> {
    let n = std::env::var("HILFER_THREADS").ok()?.trim().parse::<usize>().ok()?;
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Some(n)
}

/// Runs `f` inside a dedicated pool of `threads` workers. Without the
/// `parallel` feature, or if the pool cannot be built, `f` runs inline.
pub fn with_thread_count<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            return pool.install(f);
        }
    }
    let _ = threads;
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_preserve_order() {
        let seq = Exec::Sequential.map(100, |i| (i as f64).sqrt());
        let par = Exec::Parallel.map(100, |i| (i as f64).sqrt());
        assert_eq!(seq, par);
    }

    #[test]
    fn try_map_reports_first_error() {
        let r: Result<Vec<usize>, usize> = Exec::Parallel.try_map(50, |i| if i % 7 == 3 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(3));
    }
}
