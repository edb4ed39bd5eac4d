//! Data-parallel map over independent fiber evaluations. With the
//! `parallel` feature the work goes through rayon; without it, or with
//! `Exec::Sequential`, items are processed in order on the calling thread.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    #[default]
    Parallel,
    Sequential,
}

impl Exec {
    /// Whether this build can actually run in parallel.
    pub fn available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Map `f` over `items`; output order always matches input order.
pub fn par_map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Fallible map that reports the first error in input order.
pub fn try_par_map<T, R, F>(exec: Exec, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    par_map(exec, items, f).into_iter().collect()
}

/// Size the global worker pool. Only the first call has an effect.
pub fn configure_threads(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("thread count must be positive".into()));
    }
    #[cfg(feature = "parallel")]
    {
        // a second initialisation is not an error for our purposes
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
