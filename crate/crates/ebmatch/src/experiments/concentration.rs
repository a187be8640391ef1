//! Fluctuations of the normalized cost around its mean, and tail moments of
//! the count distributions used by the Poissonization arguments.

use ebmatch_core::sampling::SeedStream;
use ebmatch_core::solvers::SolverMode;
use ebmatch_core::ProblemKind;
use rand_distr::{Distribution, Hypergeometric, Poisson};
use serde::Serialize;

use super::scaling::{costs_by_rung, run_ladder, ScalingParams, BOOTSTRAP_FAMILY, BOOTSTRAP_RESAMPLES, CONFIDENCE};
use super::{RunOptions, Verdict};
use crate::error::{usage, Result};
use crate::records::TrialRecord;
use crate::runner::run_indexed;
use crate::stats::{bootstrap_interval, log_log_slope, std_dev};

/// Fewest trials per rung for a usable spread estimate.
pub const MIN_TRIALS: usize = 100;
/// Slack added to the predicted decay exponent.
pub const SLOPE_SLACK: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct ConcentrationParams {
    pub kind: ProblemKind,
    pub d: usize,
    pub p: f64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub mode: SolverMode,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationSummary {
    pub problem: String,
    pub d: usize,
    pub p: f64,
    pub n: Vec<usize>,
    /// Standard deviation of the normalized cost per rung.
    pub sd: Vec<f64>,
    /// Log-log slope of `sd` against `n`; `None` with one rung.
    pub sd_slope: Option<f64>,
    pub sd_slope_ci: Option<(f64, f64)>,
    /// `-alpha/2 + slack` with `alpha = 1 - 2/d` for `p < 2`, else `1 - p/d`.
    pub threshold: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
pub struct ConcentrationOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: ConcentrationSummary,
}

/// Decay exponent of the fluctuations predicted by the concentration bound.
pub fn fluctuation_exponent(d: usize, p: f64) -> f64 {
    if p < 2.0 {
        1.0 - 2.0 / d as f64
    } else {
        1.0 - p / d as f64
    }
}

fn sd_slope(n_grid: &[usize], groups: &[Vec<f64>]) -> Option<f64> {
    let ns: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let sds: Vec<f64> = groups.iter().map(|g| std_dev(g)).collect();
    if sds.iter().any(|s| s.is_nan() || *s <= 0.0) {
        return None;
    }
    log_log_slope(&ns, &sds).map(|f| f.slope)
}

pub fn run_concentration(params: &ConcentrationParams, opts: RunOptions) -> Result<ConcentrationOutcome> {
    if params.trials < MIN_TRIALS {
        return Err(usage("trials", format!("spread estimates need at least {MIN_TRIALS} trials per size")));
    }
    let mut scaling = ScalingParams::new(params.kind, params.d, params.p, params.n_grid.clone(), params.trials, params.seed);
    scaling.mode = params.mode;
    let (records, _) = run_ladder(&scaling, opts)?;
    let groups = costs_by_rung(&records, &params.n_grid, true);
    let sd: Vec<f64> = groups.iter().map(|g| std_dev(g)).collect();
    let slope = sd_slope(&params.n_grid, &groups);
    let ci = slope.and_then(|_| {
        let mut rng = SeedStream::new(params.seed).family(BOOTSTRAP_FAMILY).rng(1);
        bootstrap_interval(&groups, BOOTSTRAP_RESAMPLES, CONFIDENCE, &mut rng, |g| sd_slope(&params.n_grid, g))
    });
    let threshold = -fluctuation_exponent(params.d, params.p) / 2.0 + SLOPE_SLACK;
    let verdict = match (slope, ci) {
        (None, _) => Verdict::Undefined,
        (Some(s), _) if s <= threshold => Verdict::Pass,
        (Some(_), Some((lo, _))) if lo > threshold => Verdict::Fail,
        (Some(_), _) => Verdict::Warning,
    };
    let summary = ConcentrationSummary {
        problem: params.kind.to_string(),
        d: params.d,
        p: params.p,
        n: params.n_grid.clone(),
        sd,
        sd_slope: slope,
        sd_slope_ci: ci,
        threshold,
        verdict,
    };
    Ok(ConcentrationOutcome { records, summary })
}

/// Scaled central moments `E|X - h|^q / h^(q/2)` of a count law with mean `h`.
#[derive(Debug, Clone, Serialize)]
pub struct MomentRow {
    pub law: &'static str,
    pub h: u64,
    pub q: u32,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentSummary {
    pub rows: Vec<MomentRow>,
    /// Largest over smallest ratio along the `h` ladder, per law and `q`.
    pub spread: Vec<(&'static str, u32, f64)>,
    /// Every spread at most [`MOMENT_SPREAD_LIMIT`].
    pub bounded: bool,
}

pub const MOMENT_SPREAD_LIMIT: f64 = 1.5;
pub const MOMENT_FAMILY: u64 = 0x707E;

/// Estimates the scaled moments of `Poisson(h)` and of the number of white
/// balls among `2h` draws from an urn with `2h` white and `2h` black balls
/// (mean `h`), for every `h` of the ladder and `q` in `{2, 4}`.
pub fn tail_moments(h_grid: &[u64], samples: usize, seed: u64, workers: usize) -> Result<MomentSummary> {
    if h_grid.is_empty() || h_grid.contains(&0) {
        return Err(usage("h-list", "need positive means"));
    }
    if samples < 2 {
        return Err(usage("samples", "need at least two samples"));
    }
    let stream = SeedStream::new(seed).family(MOMENT_FAMILY);
    let laws = ["poisson", "hypergeometric"];
    let per_cell = run_indexed(h_grid.len() * laws.len(), workers, |job| {
        let (hi, li) = (job / laws.len(), job % laws.len());
        let h = h_grid[hi];
        let mut rng = stream.rng(job as u64);
        let poisson = Poisson::new(h as f64).expect("positive mean");
        let urn = Hypergeometric::new(4 * h, 2 * h, 2 * h).expect("valid urn");
        let (mut m2, mut m4) = (0.0, 0.0);
        for _ in 0..samples {
            let value = if li == 0 { poisson.sample(&mut rng) } else { urn.sample(&mut rng) as f64 };
            let dev = (value - h as f64).abs();
            m2 += dev * dev;
            m4 += dev.powi(4);
        }
        let hf = h as f64;
        [m2 / samples as f64 / hf, m4 / samples as f64 / (hf * hf)]
    });
    let mut rows = Vec::new();
    for (job, ratios) in per_cell.iter().enumerate() {
        let (hi, li) = (job / laws.len(), job % laws.len());
        for (qi, &ratio) in ratios.iter().enumerate() {
            rows.push(MomentRow { law: laws[li], h: h_grid[hi], q: 2 * (qi as u32 + 1), ratio });
        }
    }
    let mut spread = Vec::new();
    for law in laws {
        for q in [2, 4] {
            let vals: Vec<f64> = rows.iter().filter(|r| r.law == law && r.q == q).map(|r| r.ratio).collect();
            let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            spread.push((law, q, max / min));
        }
    }
    let bounded = spread.iter().all(|s| s.2.is_finite() && s.2 <= MOMENT_SPREAD_LIMIT);
    Ok(MomentSummary { rows, spread, bounded })
}
