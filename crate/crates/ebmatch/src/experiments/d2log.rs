//! Logarithmic correction of the planar matching cost: with `p = 1` and
//! `d = 2`, `E[M] / sqrt(n ln n)` should level off while `E[M] / sqrt(n)` keeps
//! growing.

use ebmatch_core::ProblemKind;
use serde::Serialize;

use super::scaling::{costs_by_rung, run_ladder, ScalingParams};
use super::RunOptions;
use crate::error::{usage, Result};
use crate::records::TrialRecord;
use crate::stats::{mean, spearman_trend};

/// Largest absolute rank trend of the log-corrected ratio that counts as flat.
pub const FLAT_TREND: f64 = 0.5;
/// Smallest rank trend of the plain ratio that counts as growing.
pub const GROWING_TREND: f64 = 0.9;

#[derive(Debug, Clone)]
pub struct D2LogParams {
    /// 2 for the main run; other dimensions serve as controls.
    pub d: usize,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct D2LogSummary {
    pub d: usize,
    pub n: Vec<usize>,
    pub mean_cost: Vec<f64>,
    /// `E[M] / n^(1 - 1/d)`.
    pub r1: Vec<f64>,
    /// `E[M] / (n^(1 - 1/d) sqrt(ln n))`.
    pub r2: Vec<f64>,
    /// Rank trend of `r1` over the whole ladder.
    pub r1_trend: Option<f64>,
    /// Rank trend of `r1` over the upper half of the ladder.
    pub r1_top_trend: Option<f64>,
    /// Rank trend of `r2` over the upper half of the ladder.
    pub r2_top_trend: Option<f64>,
    /// `r2` flat on the upper half and `r1` growing; `None` when a trend is
    /// undefined.
    pub log_correction_supported: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct D2LogOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: D2LogSummary,
}

/// The upper half of a ladder, rounding the half up.
pub fn upper_half(xs: &[f64]) -> &[f64] {
    &xs[xs.len() / 2..]
}

pub fn run_d2log(params: &D2LogParams, opts: RunOptions) -> Result<D2LogOutcome> {
    if params.n_grid.first().is_some_and(|&n| n < 2) {
        return Err(usage("n-list", "sizes must be at least 2 so that ln n > 0"));
    }
    let scaling = ScalingParams::new(ProblemKind::Matching, params.d, 1.0, params.n_grid.clone(), params.trials, params.seed);
    let (records, _) = run_ladder(&scaling, opts)?;
    let mean_cost: Vec<f64> = costs_by_rung(&records, &params.n_grid, false).iter().map(|g| mean(g)).collect();
    let exponent = 1.0 - 1.0 / params.d as f64;
    let r1: Vec<f64> = params.n_grid.iter().zip(&mean_cost).map(|(&n, m)| m / (n as f64).powf(exponent)).collect();
    let r2: Vec<f64> = params.n_grid.iter().zip(&r1).map(|(&n, r)| r / (n as f64).ln().sqrt()).collect();
    let r1_trend = spearman_trend(&r1);
    let r1_top_trend = spearman_trend(upper_half(&r1));
    let r2_top_trend = spearman_trend(upper_half(&r2));
    let log_correction_supported = match (r2_top_trend, r1_trend) {
        (Some(flat), Some(grow)) => Some(flat.abs() <= FLAT_TREND && grow > GROWING_TREND),
        _ => None,
    };
    let summary = D2LogSummary {
        d: params.d,
        n: params.n_grid.clone(),
        mean_cost,
        r1,
        r2,
        r1_trend,
        r1_top_trend,
        r2_top_trend,
        log_correction_supported,
    };
    Ok(D2LogOutcome { records, summary })
}
