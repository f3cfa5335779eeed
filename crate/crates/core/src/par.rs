//! Execution policy for the data-parallel loops (inner products, grid
//! evaluation, sweeps, oracle runs).
//!
//! With the `parallel` feature the work is spread over a rayon pool; without
//! it every policy runs serially. Results are always collected in input
//! order, so output never depends on the thread count.

/// Environment variable capping the worker count; `0` (the default) means
/// serial.
pub const THREADS_ENV: &str = "TRIBOWAVE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Serial,
    /// `threads = None` uses the global rayon pool.
    Parallel { threads: Option<usize> },
}

impl Execution {
    pub fn parallel() -> Self {
        Execution::Parallel { threads: None }
    }

    /// `0` is serial, anything else a pool of that many workers.
    pub fn with_threads(threads: usize) -> Self {
        if threads == 0 {
            Execution::Serial
        } else {
            Execution::Parallel { threads: Some(threads) }
        }
    }

    /// Reads [`THREADS_ENV`]; unset or unparsable means serial.
    pub fn from_env() -> Self {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .map_or(Execution::Serial, Self::with_threads)
    }

    pub fn is_parallel(&self) -> bool {
        cfg!(feature = "parallel") && matches!(self, Execution::Parallel { .. })
    }

    /// Order-preserving map over `items`.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Execution::Parallel { threads } = *self {
            use rayon::prelude::*;
            let run = || items.par_iter().map(&f).collect();
            return match threads {
                None => run(),
                Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                    Ok(pool) => pool.install(run),
                    Err(_) => items.iter().map(&f).collect(),
                },
            };
        }
        items.iter().map(f).collect()
    }

    /// Order-preserving map over `0..len`.
    pub fn map_range<R, F>(&self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        let idx: Vec<usize> = (0..len).collect();
        self.map(&idx, |&i| f(i))
    }
}
