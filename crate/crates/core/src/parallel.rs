//! Worker-count plumbing for the rayon-backed searches.

use crate::error::{Error, Result};

/// Runs `job` on a pool of `jobs` threads, or on the global pool when `None`.
pub fn with_workers<T, F>(jobs: Option<usize>, job: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match jobs {
        None => Ok(job()),
        Some(0) => Err(Error::ParamOutOfRange("worker count must be at least 1".into())),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::ParamOutOfRange(e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}
