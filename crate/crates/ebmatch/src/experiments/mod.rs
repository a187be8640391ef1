//! Monte Carlo experiments. Every trial draws from its own stream of the
//! master seed, so results do not depend on the worker count.

pub mod concentration;
pub mod d2log;
pub mod growth;
pub mod mixture;
pub mod scaling;
pub mod subadditivity;

use ebmatch_core::solvers::{check_caps, solve, SolveReport, SolverMode};
use ebmatch_core::{BipartiteInstance, PointSet, ProblemKind};
use serde::Serialize;

use crate::error::{usage, Result};
use crate::runner::timed;

/// Execution settings shared by all experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub workers: usize,
    /// Record wall-clock solve times; off by default so reruns are identical.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { workers: 1, timing: false }
    }
}

/// Stream index of trial `trial` on rung `rung` of a ladder.
pub fn stream_index(rung: usize, trial: usize) -> u64 {
    ((rung as u64) << 32) | trial as u64
}

/// Solves and measures the solve time if requested.
pub fn timed_solve(inst: &BipartiteInstance, mode: SolverMode, timing: bool) -> Result<(SolveReport, u64)> {
    let (report, ms) = timed(timing, || solve(inst, mode));
    Ok((report?, ms))
}

/// Fails with a size-cap error when `mode` cannot solve `n + n` instances of
/// `kind`, before any sampling.
pub fn check_size(kind: ProblemKind, p: f64, n: usize, mode: SolverMode) -> Result<()> {
    let probe = || PointSet::from_flat(1, vec![0.0; n]);
    let inst = BipartiteInstance::new(probe()?, probe()?, p, kind)?;
    Ok(check_caps(&inst, mode)?)
}

/// Rejects `p` outside `[1, inf)`.
pub fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(usage("p", "exponent must be finite and at least 1"))
    }
}

/// Rejects empty or non-increasing ladders.
pub fn check_ladder(key: &str, grid: &[usize]) -> Result<()> {
    if grid.is_empty() {
        return Err(usage(key, "empty ladder"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage(key, "ladder must be strictly increasing"));
    }
    if grid[0] == 0 {
        return Err(usage(key, "sizes must be positive"));
    }
    Ok(())
}

/// Outcome of a check that is a hard failure only when a confidence interval
/// excludes the predicted value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    /// Point estimate misses, the interval does not exclude the prediction.
    Warning,
    Fail,
    /// Not enough data to decide.
    Undefined,
}
