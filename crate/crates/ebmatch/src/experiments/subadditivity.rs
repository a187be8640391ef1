//! Subadditivity defect of a problem on a Poisson sample of a large cube
//! split into `m^d` subcubes.
//!
//! Each family is thinned: removed points (probability `eta`) form a
//! reservoir, kept points are solved cell by cell. The reservoir plus the
//! cell leftovers form a connecting instance `G0`. Cell solutions are glued
//! one by one onto `G0`, each at a reservoir vertex matched to the cell
//! centre, which gives a feasible solution for the whole sample.

use ebmatch_core::combinatorial::{glue, is_feasible};
use ebmatch_core::geometry::grid_partition;
use ebmatch_core::sampling::{poisson_process, thin, Density, SeedStream};
use ebmatch_core::solvers::{optimal_assignment, solve, SolverMode};
use ebmatch_core::{BipartiteInstance, Domain, PointSet, ProblemKind, Solution};
use serde::Serialize;

use super::{check_exponent, RunOptions};
use crate::error::{usage, Result};
use crate::records::{normalize, TrialRecord};
use crate::runner::{timed, try_run_indexed};

#[derive(Debug, Clone)]
pub struct SubadditivityParams {
    pub kind: ProblemKind,
    pub d: usize,
    pub p: f64,
    /// Side of one subcube.
    pub side: f64,
    /// Subcubes per axis.
    pub m: usize,
    /// Thinning probability.
    pub eta: f64,
    pub trials: usize,
    pub seed: u64,
    /// Solver for everything except matching, which is always exact.
    pub mode: SolverMode,
}

/// One trial.
#[derive(Debug, Clone, Serialize)]
pub struct DefectRow {
    pub trial: usize,
    /// Reservoir smaller than `max(min size, m^d)`.
    pub skipped: bool,
    pub n_x: usize,
    pub n_y: usize,
    /// Cost on the whole sample: exact for matching, otherwise the better of
    /// the glued solution and a direct heuristic solve.
    pub lhs: f64,
    /// Sum of the cell costs.
    pub cell_sum: f64,
    pub defect: f64,
    pub glued_cost: f64,
    pub glued_defect: f64,
    /// `w(G0)`.
    pub connector_cost: f64,
    /// Matching cost between cell centres and the reservoir vertices used.
    pub centre_matching: f64,
    /// `sum diam(cell)^p` over glued cells.
    pub diameter_sum: f64,
    pub error_sum: f64,
    /// `3^p + extra edges per glue`.
    pub bound_constant: f64,
    /// `glued_defect / error_sum`, 0 when both vanish.
    pub measured_constant: f64,
    pub bound_holds: bool,
    pub glued_feasible: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubadditivitySummary {
    pub problem: String,
    pub d: usize,
    pub p: f64,
    pub side: f64,
    pub m: usize,
    pub eta: f64,
    pub trials: usize,
    pub skipped: usize,
    pub skip_rate: f64,
    pub all_glued_feasible: bool,
    pub all_bounds_hold: bool,
    pub bound_constant: f64,
    pub max_measured_constant: f64,
    pub mean_defect: f64,
}

#[derive(Debug, Clone)]
pub struct SubadditivityOutcome {
    pub records: Vec<TrialRecord>,
    pub rows: Vec<DefectRow>,
    pub summary: SubadditivitySummary,
}

/// A square solution whose local vertices map to global point indices.
struct Placed {
    sol: Solution,
    xs: Vec<usize>,
    ys: Vec<usize>,
}

impl SubadditivityParams {
    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(usage("d", "dimension must be positive"));
        }
        check_exponent(self.p)?;
        if !(self.side.is_finite() && self.side > 0.0) {
            return Err(usage("L", "subcube side must be positive"));
        }
        if self.m == 0 {
            return Err(usage("m", "need at least one subcube per axis"));
        }
        if self.m > 1 && !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(usage("eta", "thinning probability must lie in (0, 1)"));
        }
        if self.trials == 0 {
            return Err(usage("trials", "need at least one trial"));
        }
        self.kind.validate()?;
        Ok(())
    }

    fn cell_mode(&self) -> SolverMode {
        if self.kind == ProblemKind::Matching {
            SolverMode::Exact
        } else {
            self.mode
        }
    }
}

/// Solves the instance on the given global points and keeps the used
/// vertices; `None` when no feasible solution exists.
fn solve_placed(params: &SubadditivityParams, all_x: &PointSet, all_y: &PointSet, xs: &[usize], ys: &[usize]) -> Result<Option<Placed>> {
    let inst = BipartiteInstance::new(all_x.subset(xs), all_y.subset(ys), params.p, params.kind)?;
    if inst.support_size() == 0 {
        return Ok(None);
    }
    let sol = solve(&inst, params.cell_mode())?.solution;
    let (ux, uy) = (sol.used_x(), sol.used_y());
    let mut pos_x = vec![usize::MAX; xs.len()];
    let mut pos_y = vec![usize::MAX; ys.len()];
    ux.iter().enumerate().for_each(|(a, &i)| pos_x[i] = a);
    uy.iter().enumerate().for_each(|(b, &j)| pos_y[j] = b);
    let edges = sol.edges.iter().map(|&(i, j)| (pos_x[i], pos_y[j])).collect();
    Ok(Some(Placed {
        sol: Solution::new(ux.len(), uy.len(), edges, sol.cost),
        xs: ux.iter().map(|&i| xs[i]).collect(),
        ys: uy.iter().map(|&j| ys[j]).collect(),
    }))
}

/// Side-1 vertex with the smallest total incident weight.
fn cheapest_vertex(placed: &Placed, all_x: &PointSet, all_y: &PointSet, p: f64) -> usize {
    let mut load = vec![0.0; placed.xs.len()];
    for &(i, j) in &placed.sol.edges {
        load[i] += all_x.dist_pow(placed.xs[i], all_y, placed.ys[j], p);
    }
    (0..load.len()).min_by(|&a, &b| load[a].total_cmp(&load[b])).expect("solution is not empty")
}

fn run_trial(params: &SubadditivityParams, trial: usize, stream: &SeedStream) -> Result<DefectRow> {
    let (d, p) = (params.d, params.p);
    let domain = Domain::cube(d, params.side * params.m as f64)?;
    let law = Density::Uniform(domain.clone());
    let intensity = domain.volume();
    let mut rng = stream.rng(trial as u64);
    let big_n = poisson_process(&law, intensity, &mut rng)?;
    let big_m = poisson_process(&law, intensity, &mut rng)?;
    let bound_constant = 3f64.powf(p) + params.kind.glue_extra_edges() as f64;
    let mut row = DefectRow {
        trial,
        skipped: false,
        n_x: big_n.len(),
        n_y: big_m.len(),
        lhs: 0.0,
        cell_sum: 0.0,
        defect: 0.0,
        glued_cost: 0.0,
        glued_defect: 0.0,
        connector_cost: 0.0,
        centre_matching: 0.0,
        diameter_sum: 0.0,
        error_sum: 0.0,
        bound_constant,
        measured_constant: 0.0,
        bound_holds: true,
        glued_feasible: true,
    };
    if params.m == 1 {
        // One cell: the sample is its own decomposition.
        return Ok(row);
    }
    let (kept_x, pool_x) = thin(&big_n, params.eta, &mut rng)?;
    let (kept_y, pool_y) = thin(&big_m, params.eta, &mut rng)?;
    let partition = grid_partition(&domain, params.m)?;
    let cells = partition.len();
    if pool_x.len().min(pool_y.len()) < params.kind.min_size().max(cells) {
        row.skipped = true;
        return Ok(row);
    }
    // Global indices: kept points first, then the reservoir.
    let mut all_x = kept_x.clone();
    all_x.extend(&pool_x);
    let mut all_y = kept_y.clone();
    all_y.extend(&pool_y);
    let mut cell_x = vec![Vec::new(); cells];
    let mut cell_y = vec![Vec::new(); cells];
    for (i, q) in kept_x.iter().enumerate() {
        cell_x[partition.locate(q).expect("sample lies in the domain")].push(i);
    }
    for (j, q) in kept_y.iter().enumerate() {
        cell_y[partition.locate(q).expect("sample lies in the domain")].push(j);
    }
    let mut used_x = vec![false; all_x.len()];
    let mut used_y = vec![false; all_y.len()];
    let mut pieces: Vec<(usize, Placed)> = Vec::new();
    for k in 0..cells {
        if let Some(placed) = solve_placed(params, &all_x, &all_y, &cell_x[k], &cell_y[k])? {
            placed.xs.iter().for_each(|&i| used_x[i] = true);
            placed.ys.iter().for_each(|&j| used_y[j] = true);
            pieces.push((k, placed));
        }
    }
    // Reservoir plus cell leftovers.
    let x0: Vec<usize> = (0..all_x.len()).filter(|&i| !used_x[i]).collect();
    let y0: Vec<usize> = (0..all_y.len()).filter(|&j| !used_y[j]).collect();
    let connector = solve_placed(params, &all_x, &all_y, &x0, &y0)?.expect("reservoir is large enough");
    let centres: Vec<Vec<f64>> = pieces.iter().map(|(k, _)| partition.cell(*k).center()).collect();
    let centre_points = PointSet::from_rows(d, &centres)?;
    let anchors = optimal_assignment(&centre_points, &all_x.subset(&connector.xs), p)?;
    let anchor_of: Vec<usize> = anchors.pairs.iter().map(|&(_, j)| connector.xs[j]).collect();

    row.connector_cost = connector.sol.cost;
    row.centre_matching = anchors.cost;
    row.diameter_sum = pieces.iter().map(|(k, _)| partition.cell(*k).diameter().powf(p)).sum();
    row.cell_sum = pieces.iter().map(|(_, g)| g.sol.cost).sum();

    let mut acc = connector;
    for ((_, piece), &anchor) in pieces.iter().zip(&anchor_of) {
        let x1 = cheapest_vertex(piece, &all_x, &all_y, p);
        let x2 = acc.xs.iter().position(|&i| i == anchor).expect("anchor is a connector vertex");
        let n_g = piece.xs.len();
        let gx = |i: usize| if i < n_g { piece.xs[i] } else { acc.xs[i - n_g] };
        let gy = |j: usize| if j < n_g { piece.ys[j] } else { acc.ys[j - n_g] };
        let glued = glue(params.kind, &piece.sol, &acc.sol, x1, x2, |i, j| all_x.dist_pow(gx(i), &all_y, gy(j), p))?;
        let xs = piece.xs.iter().chain(&acc.xs).copied().collect();
        let ys = piece.ys.iter().chain(&acc.ys).copied().collect();
        acc = Placed { sol: glued.solution, xs, ys };
    }
    let whole = BipartiteInstance::new(all_x.subset(&acc.xs), all_y.subset(&acc.ys), p, params.kind)?;
    let glued = Solution::priced(&whole, acc.sol.edges.clone())?;
    row.glued_feasible = acc.xs.len() == all_x.len().min(all_y.len()) && is_feasible(&whole, &glued);
    row.glued_cost = glued.cost;

    let sample = BipartiteInstance::new(big_n, big_m, p, params.kind)?;
    row.lhs = if params.kind == ProblemKind::Matching {
        solve(&sample, SolverMode::Exact)?.cost()
    } else {
        solve(&sample, params.mode)?.cost().min(glued.cost)
    };
    row.defect = row.lhs - row.cell_sum;
    row.glued_defect = row.glued_cost - row.cell_sum;
    row.error_sum = row.connector_cost + row.centre_matching + row.diameter_sum;
    row.measured_constant = if row.error_sum > 0.0 { row.glued_defect.max(0.0) / row.error_sum } else { 0.0 };
    // Relative slack absorbs rounding in the summed costs.
    row.bound_holds = row.glued_defect <= bound_constant * row.error_sum * (1.0 + 1e-9) + 1e-12
        && row.defect <= row.glued_defect + 1e-9 * row.glued_cost.abs();
    Ok(row)
}

pub fn run_subadditivity(params: &SubadditivityParams, opts: RunOptions) -> Result<SubadditivityOutcome> {
    params.validate()?;
    let stream = SeedStream::new(params.seed);
    let timed_rows = try_run_indexed(params.trials, opts.workers, |t| {
        let (row, ms) = timed(opts.timing, || run_trial(params, t, &stream));
        row.map(|r| (r, ms))
    })?;
    let records = timed_rows
        .iter()
        .filter(|(r, _)| !r.skipped)
        .map(|(r, ms)| {
            let n = r.n_x.min(r.n_y);
            TrialRecord {
                problem: params.kind.to_string(),
                d: params.d,
                p: params.p,
                n,
                trial: r.trial as u64,
                seed: params.seed,
                cost: r.lhs,
                normalized_cost: normalize(r.lhs, n.max(1), params.d, params.p),
                runtime_ms: *ms,
                method: if params.kind == ProblemKind::Matching { "exact".into() } else { "glued-or-heuristic".into() },
            }
        })
        .collect();
    let rows: Vec<DefectRow> = timed_rows.into_iter().map(|(r, _)| r).collect();
    let done: Vec<&DefectRow> = rows.iter().filter(|r| !r.skipped).collect();
    let skipped = rows.len() - done.len();
    let summary = SubadditivitySummary {
        problem: params.kind.to_string(),
        d: params.d,
        p: params.p,
        side: params.side,
        m: params.m,
        eta: params.eta,
        trials: params.trials,
        skipped,
        skip_rate: skipped as f64 / rows.len() as f64,
        all_glued_feasible: done.iter().all(|r| r.glued_feasible),
        all_bounds_hold: done.iter().all(|r| r.bound_holds),
        bound_constant: rows[0].bound_constant,
        max_measured_constant: done.iter().map(|r| r.measured_constant).fold(0.0, f64::max),
        mean_defect: if done.is_empty() { 0.0 } else { done.iter().map(|r| r.defect).sum::<f64>() / done.len() as f64 },
    };
    Ok(SubadditivityOutcome { records, rows, summary })
}
