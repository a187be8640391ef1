//! Exhaustive enumeration of feasible sets, as a reference for the other
//! solvers on tiny instances.

use alloc::vec;
use alloc::vec::Vec;

use super::report::{over_subsets, Method, SolveReport};
use crate::combinatorial::{tour_edges, violations, BipartiteInstance, ProblemKind, Solution, UnionFind};
use crate::error::{Error, Result};
use crate::math;

/// Side-size caps of [`brute_force`]: matchings (both sides), then the other
/// kinds (smaller side).
pub const BRUTE_MATCHING_CAP: usize = 8;
pub const BRUTE_CAP: usize = 5;

/// Heap's algorithm over all permutations of `0..n`.
fn permutations(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Running minimum; equal costs keep the lexicographically smaller edge list.
struct Best<'a> {
    inst: &'a BipartiteInstance,
    cost: f64,
    edges: Option<Vec<(usize, usize)>>,
    terms: Vec<f64>,
}

impl<'a> Best<'a> {
    fn new(inst: &'a BipartiteInstance) -> Self {
        Best { inst, cost: f64::INFINITY, edges: None, terms: Vec::new() }
    }

    fn offer(&mut self, mut edges: Vec<(usize, usize)>) {
        edges.sort_unstable();
        self.terms.clear();
        self.terms.extend(edges.iter().map(|&(i, j)| self.inst.weight(i, j)));
        let c = math::pairwise_sum(&self.terms);
        let better = match &self.edges {
            None => true,
            Some(b) => c < self.cost || (c == self.cost && edges < *b),
        };
        if better {
            self.cost = c;
            self.edges = Some(edges);
        }
    }

    fn finish(self) -> Result<Solution> {
        let edges = self.edges.expect("every kind is feasible at the support size");
        let k = self.inst.x.len();
        debug_assert!(violations(self.inst.kind, k, k, &edges).is_empty());
        Solution::priced(self.inst, edges)
    }
}

pub(crate) fn check_brute_cap(inst: &BipartiteInstance) -> Result<()> {
    let size = inst.x.len().max(inst.y.len());
    let cap = if inst.kind == ProblemKind::Matching { BRUTE_MATCHING_CAP } else { BRUTE_CAP };
    if size > cap {
        return Err(Error::SizeCap { what: "brute force", size, cap });
    }
    Ok(())
}

/// Minimum over the whole feasible set, ties broken by the lexicographically
/// smallest edge list.
pub fn brute_force(inst: &BipartiteInstance) -> Result<SolveReport> {
    let (n, m) = (inst.x.len(), inst.y.len());
    let z = inst.support_size();
    check_brute_cap(inst)?;
    if z == 0 {
        return Ok(SolveReport::proven(Solution::empty(n, m), Method::Brute));
    }
    let sol = over_subsets(inst, |sq| {
        let k = sq.x.len();
        let mut best = Best::new(sq);
        match sq.kind {
            ProblemKind::Matching => permutations(k, |s| best.offer(s.iter().enumerate().map(|(i, &j)| (i, j)).collect())),
            ProblemKind::BipartiteTsp => permutations(k, |sigma| permutations(k, |tau| best.offer(tour_edges(sigma, tau)))),
            ProblemKind::KFactor(kappa) | ProblemKind::ConnectedKFactor(kappa) => {
                let connected = matches!(sq.kind, ProblemKind::ConnectedKFactor(_));
                let masks: Vec<u32> = (0u32..1 << k).filter(|m| m.count_ones() as usize == kappa).collect();
                let mut rows = vec![0u32; k];
                let mut left = vec![kappa; k];
                regular_rows(&masks, &mut rows, &mut left, 0, &mut |rows| {
                    let edges: Vec<(usize, usize)> =
                        (0..k).flat_map(|i| (0..k).filter(move |j| rows[i] & (1 << j) != 0).map(move |j| (i, j))).collect();
                    if !connected || spans(k, &edges) {
                        best.offer(edges);
                    }
                });
            }
            ProblemKind::KBoundedMst(kappa) => {
                let all: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
                let mut walk = TreeWalk { all: &all, k, kappa, degree: vec![0; 2 * k], chosen: Vec::new() };
                walk.run(0, &UnionFind::new(2 * k), &mut |e| best.offer(e.to_vec()));
            }
        }
        best.finish()
    })?;
    Ok(SolveReport::proven(sol, Method::Brute))
}

fn spans(k: usize, edges: &[(usize, usize)]) -> bool {
    let mut uf = UnionFind::new(2 * k);
    for &(i, j) in edges {
        uf.union(i, k + j);
    }
    uf.components() == 1
}

/// Every assignment of a column set to each row that gives every column the
/// same degree as the rows.
fn regular_rows(masks: &[u32], rows: &mut Vec<u32>, left: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[u32])) {
    let k = rows.len();
    if i == k {
        f(rows);
        return;
    }
    for &m in masks {
        if (0..k).any(|j| m & (1 << j) != 0 && left[j] == 0) {
            continue;
        }
        for j in 0..k {
            if m & (1 << j) != 0 {
                left[j] -= 1;
            }
        }
        // Later rows must be able to fill every column.
        if left.iter().all(|&l| l < k - i) {
            rows[i] = m;
            regular_rows(masks, rows, left, i + 1, f);
        }
        for j in 0..k {
            if m & (1 << j) != 0 {
                left[j] += 1;
            }
        }
    }
}

/// Every spanning tree of the complete `k + k` bipartite graph with degrees
/// at most `kappa`, as increasing edge subsequences of `all`.
struct TreeWalk<'a> {
    all: &'a [(usize, usize)],
    k: usize,
    kappa: usize,
    degree: Vec<usize>,
    chosen: Vec<(usize, usize)>,
}

impl TreeWalk<'_> {
    fn run(&mut self, from: usize, uf: &UnionFind, f: &mut impl FnMut(&[(usize, usize)])) {
        let size = 2 * self.k - 1;
        if self.chosen.len() == size {
            f(&self.chosen);
            return;
        }
        for e in from..self.all.len() {
            if self.all.len() - e < size - self.chosen.len() {
                return;
            }
            let (i, j) = self.all[e];
            if self.degree[i] >= self.kappa || self.degree[self.k + j] >= self.kappa {
                continue;
            }
            let mut next = uf.clone();
            if !next.union(i, self.k + j) {
                continue;
            }
            self.degree[i] += 1;
            self.degree[self.k + j] += 1;
            self.chosen.push((i, j));
            self.run(e + 1, &next, f);
            self.chosen.pop();
            self.degree[i] -= 1;
            self.degree[self.k + j] -= 1;
        }
    }
}
