//! Growth of the mean optimal cost along a ladder of sample sizes.

use ebmatch_core::sampling::{iid_sample, Density, SeedStream};
use ebmatch_core::solvers::{Optimality, SolverMode};
use ebmatch_core::{BipartiteInstance, ProblemKind};
use serde::Serialize;

use super::{check_exponent, check_ladder, check_size, stream_index, timed_solve, RunOptions};
use crate::error::{usage, Result};
use crate::records::{normalize, ScalingFitLine, TrialRecord};
use crate::runner::try_run_indexed;
use crate::stats::{bootstrap_interval, log_log_slope, mean, std_err};

/// Stream family of the bootstrap resampling.
pub const BOOTSTRAP_FAMILY: u64 = 0xB007;
pub const BOOTSTRAP_RESAMPLES: usize = 1000;
pub const CONFIDENCE: f64 = 0.99;
/// Fewest trials per rung for which standard errors are reported as reliable.
pub const MIN_RELIABLE_TRIALS: usize = 30;

#[derive(Debug, Clone)]
pub struct ScalingParams {
    pub kind: ProblemKind,
    pub d: usize,
    pub p: f64,
    pub density: Density,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub mode: SolverMode,
}

impl ScalingParams {
    pub fn new(kind: ProblemKind, d: usize, p: f64, n_grid: Vec<usize>, trials: usize, seed: u64) -> Self {
        ScalingParams { kind, d, p, density: Density::uniform_cube(d), n_grid, trials, seed, mode: SolverMode::Auto }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(usage("d", "dimension must be positive"));
        }
        if self.density.dim() != self.d {
            return Err(usage("density", format!("density has dimension {}, expected {}", self.density.dim(), self.d)));
        }
        check_exponent(self.p)?;
        check_ladder("n-list", &self.n_grid)?;
        if self.trials == 0 {
            return Err(usage("trials", "need at least one trial"));
        }
        let largest = *self.n_grid.last().expect("ladder checked");
        check_size(self.kind, self.p, largest, self.mode)
    }
}

/// Fitted ladder.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingSummary {
    pub problem: String,
    pub d: usize,
    pub p: f64,
    pub trials: usize,
    pub rungs: Vec<ScalingFitLine>,
    /// Mean normalized cost per rung.
    pub normalized_means: Vec<f64>,
    /// Log-log slope of mean cost against `n`; `None` with one rung.
    pub slope: Option<f64>,
    pub slope_se: Option<f64>,
    pub slope_ci: Option<(f64, f64)>,
    /// `1 - p/d`.
    pub predicted_slope: f64,
    /// Mean normalized cost at the largest `n`.
    pub beta_hat: f64,
    /// `"estimate"` when every solve was exact, `"upper-bound estimate"` otherwise.
    pub label: &'static str,
    /// `p >= d`, where the limit statement does not apply.
    pub outside_limit_range: bool,
    pub se_reliable: bool,
}

#[derive(Debug, Clone)]
pub struct ScalingOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: ScalingSummary,
}

/// Solves `trials` independent instances at every rung of the ladder, in
/// rung-major order.
pub fn run_ladder(params: &ScalingParams, opts: RunOptions) -> Result<(Vec<TrialRecord>, bool)> {
    params.validate()?;
    let stream = SeedStream::new(params.seed);
    let per_rung = params.trials;
    let results = try_run_indexed(params.n_grid.len() * per_rung, opts.workers, |job| -> Result<_> {
        let (rung, trial) = (job / per_rung, job % per_rung);
        let n = params.n_grid[rung];
        let mut rng = stream.rng(stream_index(rung, trial));
        let x = iid_sample(&params.density, n, &mut rng);
        let y = iid_sample(&params.density, n, &mut rng);
        let inst = BipartiteInstance::new(x, y, params.p, params.kind)?;
        let (report, runtime_ms) = timed_solve(&inst, params.mode, opts.timing)?;
        let cost = report.cost();
        let record = TrialRecord {
            problem: params.kind.to_string(),
            d: params.d,
            p: params.p,
            n,
            trial: trial as u64,
            seed: params.seed,
            cost,
            normalized_cost: normalize(cost, n, params.d, params.p),
            runtime_ms,
            method: report.method.to_string(),
        };
        Ok((record, report.optimality == Optimality::Proven))
    })?;
    let all_exact = results.iter().all(|r| r.1);
    Ok((results.into_iter().map(|r| r.0).collect(), all_exact))
}

/// Groups costs by rung, in ladder order.
pub fn costs_by_rung(records: &[TrialRecord], n_grid: &[usize], normalized: bool) -> Vec<Vec<f64>> {
    n_grid
        .iter()
        .map(|&n| records.iter().filter(|r| r.n == n).map(|r| if normalized { r.normalized_cost } else { r.cost }).collect())
        .collect()
}

/// Log-log slope of the group means against `n`.
pub fn mean_slope(n_grid: &[usize], groups: &[Vec<f64>]) -> Option<f64> {
    let ns: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let means: Vec<f64> = groups.iter().map(|g| mean(g)).collect();
    log_log_slope(&ns, &means).map(|f| f.slope)
}

pub fn run_scaling(params: &ScalingParams, opts: RunOptions) -> Result<ScalingOutcome> {
    let (records, all_exact) = run_ladder(params, opts)?;
    let raw = costs_by_rung(&records, &params.n_grid, false);
    let normalized = costs_by_rung(&records, &params.n_grid, true);
    let ns: Vec<f64> = params.n_grid.iter().map(|&n| n as f64).collect();
    let means: Vec<f64> = raw.iter().map(|g| mean(g)).collect();
    let fit = log_log_slope(&ns, &means);
    let slope_ci = fit.and_then(|_| {
        let mut rng = SeedStream::new(params.seed).family(BOOTSTRAP_FAMILY).rng(0);
        bootstrap_interval(&raw, BOOTSTRAP_RESAMPLES, CONFIDENCE, &mut rng, |g| mean_slope(&params.n_grid, g))
    });
    let normalized_means: Vec<f64> = normalized.iter().map(|g| mean(g)).collect();
    let beta_hat = *normalized_means.last().expect("ladder is not empty");
    let slope = fit.map(|f| f.slope);
    let slope_se = fit.map(|f| f.slope_se).filter(|s| s.is_finite());
    let rungs = params
        .n_grid
        .iter()
        .zip(&raw)
        .map(|(&n, g)| ScalingFitLine { n, mean: mean(g), se: std_err(g), slope, slope_se, beta_hat })
        .collect();
    let summary = ScalingSummary {
        problem: params.kind.to_string(),
        d: params.d,
        p: params.p,
        trials: params.trials,
        rungs,
        normalized_means,
        slope,
        slope_se,
        slope_ci,
        predicted_slope: 1.0 - params.p / params.d as f64,
        beta_hat,
        label: if all_exact { "estimate" } else { "upper-bound estimate" },
        outside_limit_range: params.p >= params.d as f64,
        se_reliable: params.trials >= MIN_RELIABLE_TRIALS,
    };
    Ok(ScalingOutcome { records, summary })
}

/// Successive absolute differences of the normalized means over the top
/// `rungs` rungs of a ladder.
pub fn top_differences(normalized_means: &[f64], rungs: usize) -> Vec<f64> {
    let start = normalized_means.len().saturating_sub(rungs);
    normalized_means[start..].windows(2).map(|w| (w[1] - w[0]).abs()).collect()
}
