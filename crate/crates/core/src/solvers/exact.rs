//! Provably optimal solvers for every problem kind, within size caps.

use alloc::vec;
use alloc::vec::Vec;

use super::assignment::optimal_assignment;
use super::report::{binomial, over_subsets, weights, Method, SolveReport};
use crate::combinatorial::{BipartiteInstance, ProblemKind, Solution, UnionFind};
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::math;
use crate::transport::min_cost_flow;

/// Largest side size for the exact bipartite tour.
pub const EXACT_TSP_CAP: usize = 9;

/// Largest side size for branch-and-bound on connected factors of degree at
/// least three and on degree-bounded spanning trees.
pub const EXACT_BRANCHING_CAP: usize = 6;

/// Largest number of vertex subsets tried when the sides differ in size.
pub const SUBSET_CAP: usize = 4096;

/// Optimal matching of the smaller side into the larger.
pub fn solve_matching_exact(x: &PointSet, y: &PointSet, p: f64) -> Result<SolveReport> {
    let a = optimal_assignment(x, y, p)?;
    Ok(SolveReport::proven(Solution::new(x.len(), y.len(), a.pairs, a.cost), Method::Exact))
}

/// Optimal alternating Hamiltonian cycle on `min(|x|, |y|)` vertices per side.
pub fn solve_bipartite_tsp_exact(x: &PointSet, y: &PointSet, p: f64) -> Result<SolveReport> {
    let inst = BipartiteInstance::new(x.clone(), y.clone(), p, ProblemKind::BipartiteTsp)?;
    solve_exact(&inst)
}

/// Whether [`solve_exact`] accepts the instance.
pub fn within_exact_caps(inst: &BipartiteInstance) -> bool {
    check_caps(inst).is_ok()
}

/// Work budget, in elementary steps, below which automatic solving is exact.
pub const AUTO_WORK_BUDGET: usize = 1 << 22;

/// Within the exact caps and cheap enough for automatic solving: the
/// estimated work over all vertex subsets stays below [`AUTO_WORK_BUDGET`].
pub fn prefers_exact(inst: &BipartiteInstance) -> bool {
    if inst.kind == ProblemKind::Matching {
        return true;
    }
    if check_caps(inst).is_err() {
        return false;
    }
    let z = inst.support_size();
    if z == 0 {
        return true;
    }
    let subsets = binomial(inst.x.len().max(inst.y.len()), z);
    let per_subset = match inst.kind {
        ProblemKind::Matching | ProblemKind::KFactor(_) => z * z * z,
        ProblemKind::BipartiteTsp | ProblemKind::ConnectedKFactor(2) => (1usize << (2 * z - 1)) * z * z,
        ProblemKind::ConnectedKFactor(_) | ProblemKind::KBoundedMst(_) => (1usize << (2 * z)) * z,
    };
    subsets.saturating_mul(per_subset) <= AUTO_WORK_BUDGET
}

pub(crate) fn check_caps(inst: &BipartiteInstance) -> Result<()> {
    let z = inst.support_size();
    let large = inst.x.len().max(inst.y.len());
    let cap = match inst.kind {
        ProblemKind::Matching => return Ok(()),
        ProblemKind::BipartiteTsp | ProblemKind::ConnectedKFactor(2) => Some(("exact tour", EXACT_TSP_CAP)),
        ProblemKind::KFactor(_) => None,
        ProblemKind::ConnectedKFactor(_) | ProblemKind::KBoundedMst(_) => Some(("exact branching", EXACT_BRANCHING_CAP)),
    };
    if let Some((what, cap)) = cap {
        if z > cap {
            return Err(Error::SizeCap { what, size: z, cap });
        }
    }
    if z > 0 && large != z {
        let subsets = binomial(large, z);
        if subsets > SUBSET_CAP {
            return Err(Error::SizeCap { what: "vertex subsets", size: subsets, cap: SUBSET_CAP });
        }
    }
    Ok(())
}

/// Exact minimiser for the instance's problem kind.
pub fn solve_exact(inst: &BipartiteInstance) -> Result<SolveReport> {
    let (n, m) = (inst.x.len(), inst.y.len());
    if inst.kind == ProblemKind::Matching {
        return solve_matching_exact(&inst.x, &inst.y, inst.p);
    }
    if inst.support_size() == 0 {
        return Ok(SolveReport::proven(Solution::empty(n, m), Method::Exact));
    }
    check_caps(inst)?;
    let sol = over_subsets(inst, |sq| {
        let w = weights(sq);
        let k = sq.x.len();
        let edges = match sq.kind {
            ProblemKind::Matching => unreachable!(),
            ProblemKind::BipartiteTsp | ProblemKind::ConnectedKFactor(2) => tour_dp(&w, k),
            ProblemKind::KFactor(kappa) => factor_flow(&w, k, kappa),
            ProblemKind::ConnectedKFactor(kappa) => connected_factor(&w, k, kappa),
            ProblemKind::KBoundedMst(kappa) => bounded_tree(&w, k, kappa),
        };
        Solution::priced(sq, edges)
    })?;
    Ok(SolveReport::proven(sol, Method::Exact))
}

/// Alternating Hamiltonian cycle by dynamic programming over visited sets on
/// both sides. The cycle is anchored at side-1 vertex 0; states record the
/// other visited side-1 vertices, the visited side-2 vertices and the last
/// vertex of the path.
fn tour_dp(w: &[f64], n: usize) -> Vec<(usize, usize)> {
    debug_assert!((2..=EXACT_TSP_CAP).contains(&n));
    let mx_count = 1usize << (n - 1);
    let my_count = 1usize << n;
    let at = |mx: usize, my: usize, v: usize| (mx * my_count + my) * n + v;
    // `end_y`: path ends at side-2 vertex, equal counts on both sides.
    // `end_x`: path ends at side-1 vertex (index >= 1), one more on side 1.
    let size = mx_count * my_count * n;
    let mut end_y = vec![f64::INFINITY; size];
    let mut end_x = vec![f64::INFINITY; size];
    let mut from_y = vec![u8::MAX; size];
    let mut from_x = vec![u8::MAX; size];
    for j in 0..n {
        end_y[at(0, 1 << j, j)] = w[j];
        from_y[at(0, 1 << j, j)] = 0;
    }
    for my in 1..my_count {
        let ny = my.count_ones();
        for mx in 0..mx_count {
            let nx = mx.count_ones() + 1;
            if nx == ny {
                for j in 0..n {
                    let cur = end_y[at(mx, my, j)];
                    if !cur.is_finite() {
                        continue;
                    }
                    for i in 1..n {
                        let bit = 1 << (i - 1);
                        if mx & bit != 0 {
                            continue;
                        }
                        let c = cur + w[i * n + j];
                        let k = at(mx | bit, my, i);
                        if c < end_x[k] {
                            end_x[k] = c;
                            from_x[k] = j as u8;
                        }
                    }
                }
            } else if nx == ny + 1 {
                for i in 1..n {
                    let cur = end_x[at(mx, my, i)];
                    if !cur.is_finite() {
                        continue;
                    }
                    for j in 0..n {
                        if my & (1 << j) != 0 {
                            continue;
                        }
                        let c = cur + w[i * n + j];
                        let k = at(mx, my | (1 << j), j);
                        if c < end_y[k] {
                            end_y[k] = c;
                            from_y[k] = i as u8;
                        }
                    }
                }
            }
        }
    }
    let (fx, fy) = (mx_count - 1, my_count - 1);
    let mut last = 0;
    let mut best = f64::INFINITY;
    for j in 0..n {
        let c = end_y[at(fx, fy, j)] + w[j];
        if c < best {
            best = c;
            last = j;
        }
    }
    let mut edges = vec![(0, last)];
    let (mut mx, mut my, mut j) = (fx, fy, last);
    loop {
        let i = from_y[at(mx, my, j)] as usize;
        edges.push((i, j));
        if i == 0 {
            break;
        }
        my &= !(1 << j);
        j = from_x[at(mx, my, i)] as usize;
        edges.push((i, j));
        mx &= !(1 << (i - 1));
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Integer costs for flow computations: `2^40` at the largest weight.
fn integer_costs(w: &[f64]) -> Vec<i64> {
    let top = w.iter().cloned().fold(0.0f64, f64::max);
    let scale = if top > 0.0 { 1099511627776.0 / top } else { 1.0 };
    w.iter().map(|c| math::round(c * scale) as i64).collect()
}

/// Minimum-cost `kappa`-regular subgraph as a unit-capacity flow.
fn factor_flow(w: &[f64], n: usize, kappa: usize) -> Vec<(usize, usize)> {
    let supply = vec![kappa as f64; n];
    let flows = min_cost_flow(&supply, &supply, &integer_costs(w), Some(1.0)).expect("complete graph has a k-factor");
    flows.into_iter().filter(|f| f.2 > 0.5).map(|(i, j, _)| (i, j)).collect()
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut uf = UnionFind::new(2 * n);
    for &(i, j) in edges {
        uf.union(i, n + j);
    }
    uf.components() == 1
}

fn edge_sum(w: &[f64], n: usize, edges: &[(usize, usize)]) -> f64 {
    let terms: Vec<f64> = edges.iter().map(|&(i, j)| w[i * n + j]).collect();
    math::pairwise_sum(&terms)
}

/// Connected `kappa`-regular subgraph: the unconstrained factor when it is
/// connected, otherwise branch and bound over the column set of each row.
fn connected_factor(w: &[f64], n: usize, kappa: usize) -> Vec<(usize, usize)> {
    let relaxed = factor_flow(w, n, kappa);
    if connected(n, &relaxed) {
        return relaxed;
    }
    // Column subsets of size kappa per row, cheapest first.
    let mut choices: Vec<Vec<(f64, u32)>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == kappa {
                let c: f64 = (0..n).filter(|j| mask & (1 << j) != 0).map(|j| w[i * n + j]).sum();
                v.push((c, mask));
            }
        }
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        choices.push(v);
    }
    let mut search = FactorSearch {
        w,
        n,
        kappa,
        choices,
        left: vec![kappa; n],
        rows: vec![0; n],
        best: f64::INFINITY,
        best_rows: Vec::new(),
    };
    search.descend(0, 0.0);
    let mut edges = Vec::new();
    for (i, &mask) in search.best_rows.iter().enumerate() {
        for j in 0..n {
            if mask & (1 << j) != 0 {
                edges.push((i, j));
            }
        }
    }
    edges
}

struct FactorSearch<'a> {
    w: &'a [f64],
    n: usize,
    kappa: usize,
    choices: Vec<Vec<(f64, u32)>>,
    left: Vec<usize>,
    rows: Vec<u32>,
    best: f64,
    best_rows: Vec<u32>,
}

impl FactorSearch<'_> {
    /// Sum over rows from `from` of their `kappa` cheapest open columns.
    fn bound(&self, from: usize) -> f64 {
        let mut total = 0.0;
        let mut open: Vec<f64> = Vec::with_capacity(self.n);
        for i in from..self.n {
            open.clear();
            open.extend((0..self.n).filter(|&j| self.left[j] > 0).map(|j| self.w[i * self.n + j]));
            open.sort_by(f64::total_cmp);
            total += open.iter().take(self.kappa).sum::<f64>();
        }
        total
    }

    fn descend(&mut self, row: usize, cost: f64) {
        let n = self.n;
        if row == n {
            let rows = &self.rows;
            let edges: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (0..n).filter(move |j| rows[i] & (1 << j) != 0).map(move |j| (i, j))).collect();
            if connected(n, &edges) {
                let exact = edge_sum(self.w, n, &edges);
                if exact < self.best {
                    self.best = exact;
                    self.best_rows = self.rows.clone();
                }
            }
            return;
        }
        let remaining = n - row;
        for c in 0..self.choices[row].len() {
            let (rc, mask) = self.choices[row][c];
            if cost + rc >= self.best {
                break;
            }
            if (0..n).any(|j| mask & (1 << j) != 0 && self.left[j] == 0) {
                continue;
            }
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    self.left[j] -= 1;
                }
            }
            // Each column still needs its remaining degree from later rows.
            let ok = self.left.iter().all(|&l| l < remaining);
            if ok && cost + rc + self.bound(row + 1) < self.best {
                self.rows[row] = mask;
                self.descend(row + 1, cost + rc);
            }
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    self.left[j] += 1;
                }
            }
        }
    }
}

/// Minimum spanning tree of the complete `n + n` bipartite graph with degrees
/// at most `kappa`, by branch and bound over edges in increasing weight with a
/// Kruskal completion bound.
fn bounded_tree(w: &[f64], n: usize, kappa: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    order.sort_by(|a, b| w[a.0 * n + a.1].total_cmp(&w[b.0 * n + b.1]).then(a.cmp(b)));
    let mut search = TreeSearch {
        w,
        n,
        kappa,
        order,
        degree: vec![0; 2 * n],
        chosen: Vec::new(),
        best: f64::INFINITY,
        best_edges: Vec::new(),
    };
    search.descend(0, &UnionFind::new(2 * n), 0.0);
    search.best_edges
}

struct TreeSearch<'a> {
    w: &'a [f64],
    n: usize,
    kappa: usize,
    order: Vec<(usize, usize)>,
    degree: Vec<usize>,
    chosen: Vec<(usize, usize)>,
    best: f64,
    best_edges: Vec<(usize, usize)>,
}

impl TreeSearch<'_> {
    fn weight(&self, e: (usize, usize)) -> f64 {
        self.w[e.0 * self.n + e.1]
    }

    /// Cheapest completion ignoring future degree limits, or `None` if the
    /// forest cannot be completed.
    fn bound(&self, from: usize, uf: &UnionFind) -> Option<f64> {
        let n = self.n;
        let mut uf = uf.clone();
        let mut need = 2 * n - 1 - self.chosen.len();
        let mut total = 0.0;
        for &e in &self.order[from..] {
            if need == 0 {
                break;
            }
            if self.degree[e.0] >= self.kappa || self.degree[n + e.1] >= self.kappa {
                continue;
            }
            if uf.union(e.0, n + e.1) {
                total += self.weight(e);
                need -= 1;
            }
        }
        (need == 0).then_some(total)
    }

    fn descend(&mut self, from: usize, uf: &UnionFind, cost: f64) {
        let n = self.n;
        if self.chosen.len() == 2 * n - 1 {
            let exact = edge_sum(self.w, n, &self.chosen);
            if exact < self.best {
                self.best = exact;
                self.best_edges = self.chosen.clone();
                self.best_edges.sort_unstable();
            }
            return;
        }
        match self.bound(from, uf) {
            Some(b) if cost + b < self.best => {}
            _ => return,
        }
        for k in from..self.order.len() {
            let e = self.order[k];
            if self.degree[e.0] >= self.kappa || self.degree[n + e.1] >= self.kappa {
                continue;
            }
            let mut next = uf.clone();
            if !next.union(e.0, n + e.1) {
                continue;
            }
            // Branch: `e` is the cheapest edge of the completion.
            self.degree[e.0] += 1;
            self.degree[n + e.1] += 1;
            self.chosen.push(e);
            self.descend(k + 1, &next, cost + self.weight(e));
            self.chosen.pop();
            self.degree[e.0] -= 1;
            self.degree[n + e.1] -= 1;
            match self.bound(k + 1, uf) {
                Some(b) if cost + b < self.best => {}
                _ => return,
            }
        }
    }
}
