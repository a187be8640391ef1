//! Empirical growth constants: the heuristic cost of a problem against the
//! matching cost plus either `n^(1 - p/d)` or a single-family tour.

use ebmatch_core::sampling::{iid_sample, Density, SeedStream};
use ebmatch_core::solvers::{optimal_assignment, solve_heuristic_with, solve_mono_tsp, TourMode};
use ebmatch_core::{BipartiteInstance, Domain, ProblemKind};
use serde::Serialize;

use super::{check_exponent, check_ladder, stream_index, RunOptions};
use crate::error::{usage, Result};
use crate::records::{normalize, TrialRecord};
use crate::runner::{timed, try_run_indexed};

/// Largest accepted ratio between the biggest and smallest per-size constant.
pub const DRIFT_LIMIT: f64 = 2.0;

/// How the two families are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// Both families uniform on the unit cube.
    Uniform,
    /// First family uniform near the origin corner, second near the opposite
    /// corner, each in a cube of side 1/4.
    Adversarial,
}

impl std::str::FromStr for Layout {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Layout::Uniform),
            "adversarial" => Ok(Layout::Adversarial),
            _ => Err(usage("layout", "expected uniform or adversarial")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GrowthParams {
    pub kind: ProblemKind,
    pub d: usize,
    pub p: f64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub layout: Layout,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRung {
    pub n: usize,
    /// `sup C_P / (n^(1 - p/d) + M^p)` over the trials.
    pub sup_scale_ratio: f64,
    /// `sup C_P / (C_TSP(x) + M^p)` over the trials.
    pub sup_tour_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthSummary {
    pub problem: String,
    pub d: usize,
    pub p: f64,
    pub layout: Layout,
    pub rungs: Vec<GrowthRung>,
    /// Overall measured constant for the `n^(1 - p/d)` bound.
    pub constant: f64,
    /// Overall measured constant for the tour bound.
    pub tour_constant: f64,
    /// Largest over smallest per-size constant, for each bound.
    pub drift: f64,
    pub tour_drift: f64,
    pub stable: bool,
}

#[derive(Debug, Clone)]
pub struct GrowthOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: GrowthSummary,
}

/// Points of one trial.
fn draw_pair(layout: Layout, d: usize, n: usize, rng: &mut ebmatch_core::sampling::StreamRng) -> Result<(ebmatch_core::PointSet, ebmatch_core::PointSet)> {
    match layout {
        Layout::Uniform => {
            let law = Density::uniform_cube(d);
            Ok((iid_sample(&law, n, rng), iid_sample(&law, n, rng)))
        }
        Layout::Adversarial => {
            let corner = Density::Uniform(Domain::cube(d, 0.25)?);
            let x = iid_sample(&corner, n, rng);
            let y = iid_sample(&corner, n, rng);
            let far = y.iter().flat_map(|q| q.iter().map(|c| 1.0 - c).collect::<Vec<_>>()).collect();
            Ok((x, ebmatch_core::PointSet::from_flat(d, far)?))
        }
    }
}

fn drift(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

pub fn run_growth(params: &GrowthParams, opts: RunOptions) -> Result<GrowthOutcome> {
    if params.d == 0 {
        return Err(usage("d", "dimension must be positive"));
    }
    check_exponent(params.p)?;
    check_ladder("n-list", &params.n_grid)?;
    if params.trials == 0 {
        return Err(usage("trials", "need at least one trial"));
    }
    let stream = SeedStream::new(params.seed);
    let per_rung = params.trials;
    let rows = try_run_indexed(params.n_grid.len() * per_rung, opts.workers, |job| -> Result<_> {
        let (rung, trial) = (job / per_rung, job % per_rung);
        let n = params.n_grid[rung];
        let mut rng = stream.rng(stream_index(rung, trial));
        let (x, y) = draw_pair(params.layout, params.d, n, &mut rng)?;
        let assignment = optimal_assignment(&x, &y, params.p)?;
        let matching = assignment.cost;
        let tour = solve_mono_tsp(&x, params.p, TourMode::Heuristic)?.cost;
        let inst = BipartiteInstance::new(x, y, params.p, params.kind)?;
        let (report, runtime_ms) = timed(opts.timing, || solve_heuristic_with(&inst, assignment));
        let report = report?;
        let cost = report.cost();
        let scale = (n as f64).powf(1.0 - params.p / params.d as f64);
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
        Ok((record, cost / (scale + matching), cost / (tour + matching)))
    })?;
    let rungs: Vec<GrowthRung> = params
        .n_grid
        .iter()
        .enumerate()
        .map(|(r, &n)| {
            let slice = &rows[r * per_rung..(r + 1) * per_rung];
            GrowthRung {
                n,
                sup_scale_ratio: slice.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max),
                sup_tour_ratio: slice.iter().map(|t| t.2).fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect();
    let scale: Vec<f64> = rungs.iter().map(|r| r.sup_scale_ratio).collect();
    let tour: Vec<f64> = rungs.iter().map(|r| r.sup_tour_ratio).collect();
    let (d1, d2) = (drift(&scale), drift(&tour));
    let summary = GrowthSummary {
        problem: params.kind.to_string(),
        d: params.d,
        p: params.p,
        layout: params.layout,
        constant: scale.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        tour_constant: tour.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        rungs,
        drift: d1,
        tour_drift: d2,
        stable: d1.is_finite() && d1 < DRIFT_LIMIT && d2.is_finite() && d2 < DRIFT_LIMIT,
    };
    Ok(GrowthOutcome { records: rows.into_iter().map(|t| t.0).collect(), summary })
}
