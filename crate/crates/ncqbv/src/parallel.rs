//! Sweeps with independent points evaluated on a thread pool. The result
//! order does not depend on scheduling.

use ncqbv_core::scenario::{p_grid, sweep_point};
use ncqbv_core::{Scenario, SweepResult};
use rayon::prelude::*;

use crate::error::CliError;

pub const THREADS_VAR: &str = "NCQBV_THREADS";

/// Worker count: the machine's parallelism, capped by `NCQBV_THREADS` when
/// that holds a positive integer.
pub fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        Some(cap) if cap > 0 => cap.min(available),
        _ => available,
    }
}

pub fn pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CliError::Io(e.to_string()))
}

pub fn sweep(
    s: &Scenario,
    p_from: f64,
    p_to: f64,
    p_step: f64,
    threads: usize,
) -> Result<SweepResult, CliError> {
    let grid = p_grid(p_from, p_to, p_step)?;
    let points = pool(threads)?.install(|| {
        grid.par_iter()
            .map(|&p| sweep_point(s, p))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut result = SweepResult {
        rows: points.into_iter().flatten().collect(),
    };
    result.sort();
    Ok(result)
}
