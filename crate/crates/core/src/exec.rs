//! Sequential or rayon-backed mapping over independent work items.
//!
//! Results always come back in input order, so callers get the same output
//! regardless of the execution mode. Without the `parallel` feature every
//! mode runs sequentially.

/// How to execute a batch of independent jobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    #[default]
    Sequential,
    /// Run on a dedicated pool with this many worker threads.
    Parallel(usize),
    /// Run on the global rayon pool.
    ParallelDefault,
}

impl Exec {
    /// `--jobs N` semantics: one job means sequential.
    pub fn with_jobs(jobs: usize) -> Self {
        if jobs <= 1 {
            Exec::Sequential
        } else {
            Exec::Parallel(jobs)
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && !matches!(self, Exec::Sequential)
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            match self {
                Exec::Sequential => items.iter().map(f).collect(),
                Exec::ParallelDefault => items.par_iter().map(f).collect(),
                Exec::Parallel(threads) => match rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                {
                    Ok(pool) => pool.install(|| items.par_iter().map(f).collect()),
                    Err(_) => items.par_iter().map(f).collect(),
                },
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            items.iter().map(f).collect()
        }
    }

    /// Same as [`Exec::map`] over an index range.
    pub fn map_range<R, F>(self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        let idx: Vec<usize> = (0..len).collect();
        self.map(&idx, |&i| f(i))
    }
}
