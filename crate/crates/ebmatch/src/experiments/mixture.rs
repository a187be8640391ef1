//! Matching cost when a few far-away points contaminate both families.
//!
//! Good points: Poisson(`n`) uniform points per side. Bad points: `H` copies
//! of the origin corner on side 1 and `H` copies of the opposite corner on
//! side 2. From the union, `Z = min(N + H, M + H)` points are kept per side,
//! preferring good points, each part sampled without replacement.

use ebmatch_core::sampling::{iid_sample, Density, SeedStream, StreamRng};
use ebmatch_core::solvers::optimal_assignment;
use ebmatch_core::PointSet;
use rand::seq::index::sample;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use super::{check_exponent, check_ladder, stream_index, RunOptions};
use crate::error::{usage, Result};
use crate::records::{normalize, TrialRecord};
use crate::runner::{timed, try_run_indexed};
use crate::stats::mean;

/// Largest accepted ratio of contaminated to clean mean cost for `H = sqrt(n)`.
pub const SQRT_RATIO_LIMIT: f64 = 2.0;

/// Number of bad points per side as a function of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BadRule {
    Zero,
    /// `ceil(sqrt(n))`.
    Sqrt,
    /// `n`.
    Full,
    Fixed(usize),
}

impl BadRule {
    pub fn count(self, n: usize) -> usize {
        match self {
            BadRule::Zero => 0,
            BadRule::Sqrt => (n as f64).sqrt().ceil() as usize,
            BadRule::Full => n,
            BadRule::Fixed(h) => h,
        }
    }
}

impl std::str::FromStr for BadRule {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(BadRule::Zero),
            "sqrt" => Ok(BadRule::Sqrt),
            "full" => Ok(BadRule::Full),
            other => other
                .parse()
                .map(BadRule::Fixed)
                .map_err(|_| usage("h-rule", "expected zero, sqrt, full or a count")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MixtureParams {
    pub d: usize,
    pub p: f64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub rule: BadRule,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixtureRung {
    pub n: usize,
    pub h: usize,
    /// Mean normalized cost with bad points.
    pub contaminated: f64,
    /// Mean normalized cost of the same trials without bad points.
    pub clean: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixtureSummary {
    pub d: usize,
    pub p: f64,
    pub rule: BadRule,
    pub rungs: Vec<MixtureRung>,
    pub max_ratio: f64,
    /// `max_ratio < 2`; asserted only for the square-root rule.
    pub within_limit: bool,
}

#[derive(Debug, Clone)]
pub struct MixtureOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: MixtureSummary,
}

/// `count` copies of `corner`.
fn corner_points(d: usize, corner: f64, count: usize) -> PointSet {
    PointSet::from_flat(d, vec![corner; d * count]).expect("dimension is positive")
}

/// Keeps `z` points: as many good ones as possible, the rest bad, each part
/// sampled without replacement.
fn keep(good: &PointSet, bad: &PointSet, z: usize, rng: &mut StreamRng) -> PointSet {
    let from_good = z.min(good.len());
    let mut out = good.subset(&sample(rng, good.len(), from_good).into_vec());
    let from_bad = z - from_good;
    out.extend(&bad.subset(&sample(rng, bad.len(), from_bad).into_vec()));
    out
}

/// Matching cost of one trial with `h` bad points per side.
fn trial_cost(good_x: &PointSet, good_y: &PointSet, h: usize, p: f64, rng: &mut StreamRng) -> Result<f64> {
    let d = good_x.dim();
    let (bad_x, bad_y) = (corner_points(d, 0.0, h), corner_points(d, 1.0, h));
    let z = (good_x.len() + h).min(good_y.len() + h);
    let s = keep(good_x, &bad_x, z, rng);
    let t = keep(good_y, &bad_y, z, rng);
    Ok(optimal_assignment(&s, &t, p)?.cost)
}

pub fn run_mixture(params: &MixtureParams, opts: RunOptions) -> Result<MixtureOutcome> {
    if params.d == 0 {
        return Err(usage("d", "dimension must be positive"));
    }
    check_exponent(params.p)?;
    check_ladder("n-list", &params.n_grid)?;
    if params.trials == 0 {
        return Err(usage("trials", "need at least one trial"));
    }
    for &n in &params.n_grid {
        if params.rule.count(n) > n {
            return Err(usage("h-rule", format!("{} bad points exceed n = {n}", params.rule.count(n))));
        }
    }
    let law = Density::uniform_cube(params.d);
    let points = SeedStream::new(params.seed);
    let subsets = points.family(1);
    let per_rung = params.trials;
    let rows = try_run_indexed(params.n_grid.len() * per_rung, opts.workers, |job| -> Result<_> {
        let (rung, trial) = (job / per_rung, job % per_rung);
        let n = params.n_grid[rung];
        let h = params.rule.count(n);
        let index = stream_index(rung, trial);
        let mut rng = points.rng(index);
        let counts = Poisson::new(n as f64).map_err(|e| usage("n-list", e.to_string()))?;
        let nx = counts.sample(&mut rng) as usize;
        let ny = counts.sample(&mut rng) as usize;
        let good_x = iid_sample(&law, nx, &mut rng);
        let good_y = iid_sample(&law, ny, &mut rng);
        let (cost, runtime_ms) = timed(opts.timing, || trial_cost(&good_x, &good_y, h, params.p, &mut subsets.rng(index)));
        let clean = trial_cost(&good_x, &good_y, 0, params.p, &mut subsets.rng(index))?;
        let cost = cost?;
        let record = TrialRecord {
            problem: "matching".into(),
            d: params.d,
            p: params.p,
            n,
            trial: trial as u64,
            seed: params.seed,
            cost,
            normalized_cost: normalize(cost, n, params.d, params.p),
            runtime_ms,
            method: "exact".into(),
        };
        Ok((record, normalize(clean, n, params.d, params.p)))
    })?;
    let rungs: Vec<MixtureRung> = params
        .n_grid
        .iter()
        .enumerate()
        .map(|(r, &n)| {
            let slice = &rows[r * per_rung..(r + 1) * per_rung];
            let contaminated = mean(&slice.iter().map(|t| t.0.normalized_cost).collect::<Vec<_>>());
            let clean = mean(&slice.iter().map(|t| t.1).collect::<Vec<_>>());
            MixtureRung { n, h: params.rule.count(n), contaminated, clean, ratio: contaminated / clean }
        })
        .collect();
    let max_ratio = rungs.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let summary = MixtureSummary {
        d: params.d,
        p: params.p,
        rule: params.rule,
        within_limit: max_ratio < SQRT_RATIO_LIMIT,
        max_ratio,
        rungs,
    };
    Ok(MixtureOutcome { records: rows.into_iter().map(|t| t.0).collect(), summary })
}
