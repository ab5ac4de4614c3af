//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature, [`Parallelism::Parallel`] runs on the rayon
//! global pool. Without it, every mode runs sequentially. Callers partition
//! work into a fixed number of chunks that does not depend on the thread
//! count, so results are identical in both modes.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parallelism {
    Sequential,
    Parallel,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        }
    }
}

impl Parallelism {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// Fold `chunks` items into accumulators and merge them. `fold` must be
/// associative with respect to `merge` for results to be mode-independent.
pub fn fold_chunks<T, I, F, M>(par: Parallelism, chunks: usize, init: I, fold: F, merge: M) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(T, usize) -> T + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() {
        use rayon::prelude::*;
        return (0..chunks)
            .into_par_iter()
            .fold(&init, &fold)
            .reduce(&init, &merge);
    }
    let _ = &merge;
    let _ = par;
    (0..chunks).fold(init(), fold)
}

/// Map each index, keeping results in index order.
pub fn map_indexed<T, F>(par: Parallelism, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() {
        use rayon::prelude::*;
        return (0..count).into_par_iter().map(f).collect();
    }
    let _ = par;
    (0..count).map(f).collect()
}
