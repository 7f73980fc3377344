//! Worker pool sizing.

use crate::error::{HarnessError, Result};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "NETROBUST_WORKERS";

/// Explicit count if given, else `NETROBUST_WORKERS`, else `None` (one per core).
pub fn resolve_workers(explicit: Option<usize>) -> Result<Option<usize>> {
    if let Some(n) = explicit {
        return positive(n).map(Some);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let n = v.trim().parse::<usize>().map_err(|_| {
                HarnessError::Config(format!("{WORKERS_ENV}={v:?} is not a worker count"))
            })?;
            positive(n).map(Some)
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(HarnessError::Config(format!("{WORKERS_ENV}: {e}"))),
    }
}

fn positive(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(HarnessError::Config(
            "worker count must be at least 1".into(),
        ));
    }
    Ok(n)
}

/// Sizes the global rayon pool. Results do not depend on the count.
pub fn init_pool(explicit: Option<usize>) -> Result<()> {
    if let Some(n) = resolve_workers(explicit)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
    }
    Ok(())
}
