//! Data-parallel helpers with a sequential fallback.

use serde::{Deserialize, Serialize};

/// How independent work items are scheduled.
///
/// `Parallel` runs on the rayon pool when the `parallel` feature is enabled and
/// silently degrades to `Sequential` otherwise. Results never depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Maps `f` over `0..len`, returning results in index order.
    pub fn map<R, F>(self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
            _ => (0..len).map(f).collect(),
        }
    }

    /// Maps and reduces with an associative `combine`; chunking is fixed by `chunk`
    /// so that the reduction tree does not depend on the thread count.
    pub fn map_reduce<R, F, C>(self, len: usize, chunk: usize, identity: R, f: F, combine: C) -> R
    where
        R: Send + Sync + Clone,
        F: Fn(usize) -> R + Sync + Send,
        C: Fn(R, R) -> R + Sync + Send,
    {
        let chunk = chunk.max(1);
        let chunks = len.div_ceil(chunk);
        let partials = self.map(chunks, |c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(len);
            (lo..hi).fold(identity.clone(), |acc, i| combine(acc, f(i)))
        });
        partials.into_iter().fold(identity, combine)
    }
}
