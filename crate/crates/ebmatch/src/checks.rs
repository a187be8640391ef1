//! Randomised self-checks: exact solvers against brute force, the gluing
//! operation, and transport between unit atoms against matching.

use ebmatch_core::combinatorial::{glue, is_feasible};
use ebmatch_core::sampling::{iid_sample, Density, SeedStream, StreamRng};
use ebmatch_core::solvers::brute::{BRUTE_CAP, BRUTE_MATCHING_CAP};
use ebmatch_core::solvers::{brute_force, optimal_assignment, solve_exact, solve_heuristic};
use ebmatch_core::transport::{wasserstein_pp, AtomMeasure};
use ebmatch_core::{BipartiteInstance, PointSet, ProblemKind, Solution};
use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::runner::try_run_indexed;

/// Relative tolerance of cost comparisons.
pub const COST_TOLERANCE: f64 = 1e-9;

/// Kinds covered by the checks.
pub const CHECK_KINDS: [ProblemKind; 7] = [
    ProblemKind::Matching,
    ProblemKind::BipartiteTsp,
    ProblemKind::KFactor(1),
    ProblemKind::KFactor(2),
    ProblemKind::ConnectedKFactor(2),
    ProblemKind::ConnectedKFactor(3),
    ProblemKind::KBoundedMst(2),
];

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: usize,
    /// Descriptions of failed cases, in case order.
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= COST_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

fn cloud(rng: &mut StreamRng, n: usize, d: usize) -> PointSet {
    iid_sample(&Density::uniform_cube(d), n, rng)
}

fn collect(name: &'static str, cases: usize, outcomes: Vec<Option<String>>) -> CheckReport {
    CheckReport { name, cases, failures: outcomes.into_iter().flatten().collect() }
}

/// Exact solutions agree with brute force in cost, and both are feasible, on
/// `per_pair` random instances of every kind in [`CHECK_KINDS`] for every
/// `(d, p)`. Sizes stay within the brute force caps; a quarter of the
/// instances are rectangular.
pub fn oracle_suite(dims: &[usize], exponents: &[f64], per_pair: usize, seed: u64, workers: usize) -> Result<CheckReport> {
    let stream = SeedStream::new(seed).family(0x0AC1E);
    let mut groups: Vec<(usize, f64, ProblemKind)> = Vec::new();
    for &d in dims {
        for &p in exponents {
            groups.extend(CHECK_KINDS.iter().map(|&kind| (d, p, kind)));
        }
    }
    let total = groups.len() * per_pair;
    let outcomes = try_run_indexed(total, workers, |case| -> Result<Option<String>> {
        let (d, p, kind) = groups[case / per_pair];
        let mut rng = stream.rng(case as u64);
        let cap = if kind == ProblemKind::Matching { BRUTE_MATCHING_CAP } else { BRUTE_CAP };
        let n = rng.random_range(kind.min_size().max(1)..=cap);
        let m = if rng.random_bool(0.25) { rng.random_range(n..=cap) } else { n };
        let (x, y) = if rng.random_bool(0.5) { (cloud(&mut rng, n, d), cloud(&mut rng, m, d)) } else { (cloud(&mut rng, m, d), cloud(&mut rng, n, d)) };
        let inst = BipartiteInstance::new(x, y, p, kind)?;
        let exact = solve_exact(&inst)?;
        let brute = brute_force(&inst)?;
        let describe = |what: &str| format!("case {case} ({kind}, d={d}, p={p}, {}x{}): {what}", inst.x.len(), inst.y.len());
        if !close(exact.cost(), brute.cost()) {
            return Ok(Some(describe(&format!("exact {} vs brute {}", exact.cost(), brute.cost()))));
        }
        if !is_feasible(&inst, &exact.solution) || !is_feasible(&inst, &brute.solution) {
            return Ok(Some(describe("infeasible solution")));
        }
        Ok(None)
    })?;
    Ok(collect("oracle", total, outcomes))
}

/// Side-2 neighbours of every side-1 vertex and side-1 neighbours of every
/// side-2 vertex, each list sorted.
fn neighbourhoods(sol: &Solution) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut nx = vec![Vec::new(); sol.n_x];
    let mut ny = vec![Vec::new(); sol.n_y];
    for &(i, j) in &sol.edges {
        nx[i].push(j);
        ny[j].push(i);
    }
    nx.iter_mut().chain(ny.iter_mut()).for_each(|v| v.sort_unstable());
    (nx, ny)
}

/// Checks one gluing: feasibility, the extra-edge bound, exact cost
/// bookkeeping and that every vertex of the second solution away from `x2`
/// and its neighbours keeps its neighbourhood.
fn check_glue(kind: ProblemKind, n: usize, m: usize, d: usize, p: f64, rng: &mut StreamRng) -> Result<Option<String>> {
    let (gx, gy) = (cloud(rng, n, d), cloud(rng, n, d));
    let (hx, hy) = (cloud(rng, m, d), cloud(rng, m, d));
    let g = solve_heuristic(&BipartiteInstance::new(gx.clone(), gy.clone(), p, kind)?)?.solution;
    let h = solve_heuristic(&BipartiteInstance::new(hx.clone(), hy.clone(), p, kind)?)?.solution;
    let (x1, x2) = (rng.random_range(0..n), rng.random_range(0..m));
    let mut all_x = gx;
    all_x.extend(&hx);
    let mut all_y = gy;
    all_y.extend(&hy);
    let whole = BipartiteInstance::new(all_x, all_y, p, kind)?;
    let glued = glue(kind, &g, &h, x1, x2, |i, j| whole.weight(i, j))?;
    let sol = &glued.solution;
    if !is_feasible(&whole, sol) {
        return Ok(Some("glued solution infeasible".into()));
    }
    if glued.extra.len() > kind.glue_extra_edges() {
        return Ok(Some(format!("{} extra edges", glued.extra.len())));
    }
    let priced = Solution::priced(&whole, sol.edges.clone())?;
    if !close(priced.cost, sol.cost) {
        return Ok(Some(format!("reported cost {} vs {}", sol.cost, priced.cost)));
    }
    let (before_x, before_y) = neighbourhoods(&h);
    let (after_x, after_y) = neighbourhoods(sol);
    let near: Vec<usize> = h.neighbours_of_x(x2);
    let shift = |v: &Vec<usize>| v.iter().map(|k| k + n).collect::<Vec<_>>();
    for i in (0..m).filter(|&i| i != x2) {
        if after_x[i + n] != shift(&before_x[i]) {
            return Ok(Some(format!("side-1 vertex {i} of the second solution changed neighbours")));
        }
    }
    for j in (0..m).filter(|j| !near.contains(j)) {
        if after_y[j + n] != shift(&before_y[j]) {
            return Ok(Some(format!("side-2 vertex {j} of the second solution changed neighbours")));
        }
    }
    Ok(None)
}

/// `per_kind` random gluings of heuristic solutions for every kind in
/// [`CHECK_KINDS`] plus a degree-3 tree.
pub fn glue_suite(per_kind: usize, seed: u64, workers: usize) -> Result<CheckReport> {
    let kinds: Vec<ProblemKind> = CHECK_KINDS.iter().copied().chain([ProblemKind::KBoundedMst(3)]).collect();
    let stream = SeedStream::new(seed).family(0x61E);
    let total = kinds.len() * per_kind;
    let outcomes = try_run_indexed(total, workers, |case| -> Result<Option<String>> {
        let kind = kinds[case / per_kind];
        let mut rng = stream.rng(case as u64);
        let lo = kind.min_size().max(2);
        let (n, m) = (rng.random_range(lo..=lo + 8), rng.random_range(lo..=lo + 8));
        let d = rng.random_range(1..=3);
        let p = [1.0, 1.5, 2.0][rng.random_range(0..3)];
        Ok(check_glue(kind, n, m, d, p, &mut rng)?.map(|why| format!("case {case} ({kind}, {n}+{m}, d={d}, p={p}): {why}")))
    })?;
    Ok(collect("glue", total, outcomes))
}

/// Transport between unit atoms equals the matching cost on `instances`
/// random instances with at most `max_n` points per side.
pub fn transport_suite(instances: usize, max_n: usize, seed: u64, workers: usize) -> Result<CheckReport> {
    let stream = SeedStream::new(seed).family(0xB1F);
    let outcomes = try_run_indexed(instances, workers, |case| -> Result<Option<String>> {
        let mut rng = stream.rng(case as u64);
        let n = rng.random_range(1..=max_n);
        let d = rng.random_range(1..=3);
        let p = [1.0, 1.5, 2.0][rng.random_range(0..3)];
        let (x, y) = (cloud(&mut rng, n, d), cloud(&mut rng, n, d));
        let matching = optimal_assignment(&x, &y, p)?.cost;
        let (transport, plan) = wasserstein_pp(&AtomMeasure::empirical(x), &AtomMeasure::empirical(y), p)?;
        if (transport - matching).abs() > COST_TOLERANCE {
            return Ok(Some(format!("case {case} (n={n}, d={d}, p={p}): transport {transport} vs matching {matching}")));
        }
        if plan.flows.iter().any(|f| (f.2 - 1.0).abs() > 1e-9) {
            return Ok(Some(format!("case {case}: plan is not a permutation")));
        }
        Ok(None)
    })?;
    Ok(collect("transport", instances, outcomes))
}
