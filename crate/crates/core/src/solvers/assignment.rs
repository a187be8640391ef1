//! Minimum-cost assignment between two point families.
//!
//! Small instances use a dense Hungarian method. Larger ones quantise costs
//! to integers, run an epsilon-scaling auction on a nearest-neighbour
//! candidate graph and then certify optimality against every pair using the
//! auction prices, adding violated pairs and re-solving until the certificate
//! holds. The result is exact for the quantised costs, whose grid is about
//! 2^-37 of the largest possible cost at 16384 points.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use super::hilbert::hilbert_keys;
use crate::geometry::spatial::GridIndex;
use crate::geometry::PointSet;
use crate::math;

/// An optimal assignment of the smaller side into the larger one.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `(i, j)` pairs, side-1 index first, sorted.
    pub pairs: Vec<(usize, usize)>,
    pub cost: f64,
}

impl Assignment {
    /// `partner[i]` for a square assignment.
    pub fn permutation(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.pairs.len()];
        for &(i, j) in &self.pairs {
            out[i] = j;
        }
        out
    }
}

/// Dense Hungarian method on a `rows x cols` matrix with `rows <= cols`.
/// Returns the column assigned to each row.
pub fn hungarian(rows: usize, cols: usize, cost: &[f64]) -> Vec<usize> {
    assert!(rows <= cols && cost.len() == rows * cols);
    if rows == 0 {
        return Vec::new();
    }
    let inf = f64::INFINITY;
    let mut u = vec![0.0; rows + 1];
    let mut v = vec![0.0; cols + 1];
    let mut p = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    let mut minv = vec![inf; cols + 1];
    let mut used = vec![false; cols + 1];
    for i in 1..=rows {
        p[0] = i;
        let mut j0 = 0;
        minv.iter_mut().for_each(|m| *m = inf);
        used.iter_mut().for_each(|b| *b = false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let row = &cost[(i0 - 1) * cols..i0 * cols];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=cols {
                if !used[j] {
                    let cur = row[j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; rows];
    for j in 1..=cols {
        if p[j] != 0 {
            out[p[j] - 1] = j - 1;
        }
    }
    out
}

const NONE: u32 = u32::MAX;

/// Maps costs to integers on a grid fine enough that the assignment is exact
/// to well below double-precision noise on typical edges, while every reduced
/// cost the auction touches stays far inside `i64`.
struct Quantiser {
    scale: f64,
    unit: i64,
}

impl Quantiser {
    fn new(max_cost: f64, rows: usize) -> Self {
        let unit = rows as i64 + 1;
        let bits = 52 - (64 - (unit as u64).leading_zeros()) as i32;
        let max_cost = if max_cost > 0.0 { max_cost } else { 1.0 };
        Quantiser { scale: math::powf(2.0, bits as f64) / max_cost, unit }
    }

    fn of(&self, c: f64) -> i64 {
        math::round(c * self.scale) as i64 * self.unit
    }
}

/// Forward auction with epsilon scaling on a sparse candidate graph. Costs are
/// multiples of `rows + 1`, so the final pass at `eps = 1` is exactly optimal.
struct Auction {
    start: Vec<usize>,
    col: Vec<u32>,
    cost: Vec<i64>,
    price: Vec<i64>,
    owner: Vec<u32>,
    assigned: Vec<u32>,
}

impl Auction {
    fn new(lists: Vec<Vec<(u32, i64)>>, cols: usize) -> Self {
        let rows = lists.len();
        let mut a = Auction {
            start: Vec::new(),
            col: Vec::new(),
            cost: Vec::new(),
            price: vec![0; cols],
            owner: vec![NONE; cols],
            assigned: vec![NONE; rows],
        };
        a.load(lists);
        a
    }

    fn load(&mut self, mut lists: Vec<Vec<(u32, i64)>>) {
        self.start.clear();
        self.col.clear();
        self.cost.clear();
        self.start.push(0);
        for r in &mut lists {
            r.sort_unstable_by_key(|e| e.0);
            r.dedup_by_key(|e| e.0);
            for &(j, c) in r.iter() {
                self.col.push(j);
                self.cost.push(c);
            }
            self.start.push(self.col.len());
        }
    }

    fn rows(&self) -> usize {
        self.assigned.len()
    }

    fn has_edge(&self, i: usize, j: u32) -> bool {
        self.col[self.start[i]..self.start[i + 1]].binary_search(&j).is_ok()
    }

    fn unassign(&mut self, i: usize) {
        let j = self.assigned[i];
        if j != NONE {
            self.owner[j as usize] = NONE;
            self.assigned[i] = NONE;
        }
    }

    /// Adds candidate edges and frees the rows that received them.
    fn add_edges(&mut self, extra: &[(usize, u32, i64)]) {
        let mut lists: Vec<Vec<(u32, i64)>> = (0..self.rows())
            .map(|i| (self.start[i]..self.start[i + 1]).map(|k| (self.col[k], self.cost[k])).collect())
            .collect();
        for &(i, j, c) in extra {
            lists[i].push((j, c));
            self.unassign(i);
        }
        self.load(lists);
    }

    /// Cheapest and second cheapest `cost + price` in row `i`.
    fn best(&self, i: usize) -> (u32, i64, i64) {
        let (mut j1, mut w1, mut w2) = (NONE, i64::MAX, i64::MAX);
        for k in self.start[i]..self.start[i + 1] {
            let w = self.cost[k] + self.price[self.col[k] as usize];
            if w < w1 {
                w2 = w1;
                w1 = w;
                j1 = self.col[k];
            } else if w < w2 {
                w2 = w;
            }
        }
        (j1, w1, w2)
    }

    fn edge_cost(&self, i: usize, j: u32) -> i64 {
        let r = self.start[i]..self.start[i + 1];
        let k = self.col[r.clone()].binary_search(&j).expect("assigned edge is a candidate");
        self.cost[r.start + k]
    }

    /// `cost + price` of the assigned edge of row `i`.
    fn level(&self, i: usize) -> i64 {
        let j = self.assigned[i];
        self.edge_cost(i, j) + self.price[j as usize]
    }

    fn bid(&mut self, mut free: Vec<u32>, eps: i64, touched: &mut Vec<u32>, seen: &mut [bool]) {
        while let Some(i) = free.pop() {
            let i = i as usize;
            if !seen[i] {
                seen[i] = true;
                touched.push(i as u32);
            }
            let (j, w1, w2) = self.best(i);
            let rise = if w2 == i64::MAX { eps } else { w2 - w1 + eps };
            self.price[j as usize] += rise;
            let prev = self.owner[j as usize];
            if prev != NONE {
                self.assigned[prev as usize] = NONE;
                free.push(prev);
            }
            self.owner[j as usize] = i as u32;
            self.assigned[i] = j;
        }
    }

    /// Runs scaling phases from `eps` down to 1, keeping assignments that
    /// already satisfy each phase's complementary slackness. Only rows that
    /// have bid can lose it, so only they are rechecked.
    fn solve_from(&mut self, mut eps: i64, free: Vec<u32>) {
        let mut seen = vec![false; self.rows()];
        let mut touched = Vec::new();
        let mut free = free;
        free.reverse();
        loop {
            eps = eps.max(1);
            self.bid(free, eps, &mut touched, &mut seen);
            if eps == 1 {
                return;
            }
            eps /= SCALING_FACTOR;
            free = Vec::new();
            for &i in &touched {
                let i = i as usize;
                if self.assigned[i] != NONE && self.level(i) > self.best(i).1 + eps {
                    self.unassign(i);
                    free.push(i as u32);
                }
            }
            free.reverse();
        }
    }

    fn free_rows(&self) -> Vec<u32> {
        (0..self.rows() as u32).filter(|&i| self.assigned[i as usize] == NONE).collect()
    }

    /// Lowers prices until every assigned edge is a cheapest edge of its row.
    /// Terminates because the assignment is optimal on the candidate graph.
    fn tighten_prices(&mut self) {
        let rows = self.rows();
        let cols = self.price.len();
        let mut tstart = vec![0usize; cols + 1];
        for &j in &self.col {
            tstart[j as usize + 1] += 1;
        }
        for j in 0..cols {
            tstart[j + 1] += tstart[j];
        }
        let mut fill = tstart.clone();
        let mut trow = vec![0u32; self.col.len()];
        for i in 0..rows {
            for k in self.start[i]..self.start[i + 1] {
                let j = self.col[k] as usize;
                trow[fill[j]] = i as u32;
                fill[j] += 1;
            }
        }
        let mut queued = vec![true; rows];
        let mut queue: alloc::collections::VecDeque<u32> = (0..rows as u32).collect();
        while let Some(i) = queue.pop_front() {
            let i = i as usize;
            queued[i] = false;
            let best = self.best(i).1;
            let j = self.assigned[i] as usize;
            let c = self.edge_cost(i, j as u32);
            if c + self.price[j] > best {
                self.price[j] = best - c;
                for &r in &trow[tstart[j]..tstart[j + 1]] {
                    if r as usize != i && !queued[r as usize] {
                        queued[r as usize] = true;
                        queue.push_back(r);
                    }
                }
            }
        }
    }
}

const SCALING_FACTOR: i64 = 6;

fn union_bounds(a: &PointSet, b: &PointSet) -> (Vec<f64>, Vec<f64>) {
    let (mut lo, mut hi) = a.bounds().unwrap();
    let (lo2, hi2) = b.bounds().unwrap();
    for k in 0..lo.len() {
        lo[k] = lo[k].min(lo2[k]);
        hi[k] = hi[k].max(hi2[k]);
    }
    (lo, hi)
}

/// Columns bucketed on a coarse grid, each bucket carrying the largest negated
/// column price inside it, so that far buckets can be ruled out wholesale.
struct PriceBuckets {
    lo: Vec<f64>,
    width: Vec<f64>,
    per_axis: usize,
    start: Vec<usize>,
    items: Vec<u32>,
    reach: Vec<i64>,
}

impl PriceBuckets {
    fn new(cols: &PointSet, price: &[i64], lo: &[f64], hi: &[f64]) -> Self {
        let d = cols.dim();
        let per_axis = (math::powf(cols.len() as f64 / 16.0, 1.0 / d as f64) as usize).clamp(1, 64);
        let width: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| ((b - a) / per_axis as f64).max(1e-300)).collect();
        let total = per_axis.pow(d as u32);
        let key = |x: &[f64]| {
            let mut k = 0;
            for a in (0..d).rev() {
                let c = math::floor((x[a] - lo[a]) / width[a]).clamp(0.0, (per_axis - 1) as f64) as usize;
                k = k * per_axis + c;
            }
            k
        };
        let keys: Vec<usize> = (0..cols.len()).map(|j| key(cols.point(j))).collect();
        let mut start = vec![0usize; total + 1];
        for &k in &keys {
            start[k + 1] += 1;
        }
        for k in 0..total {
            start[k + 1] += start[k];
        }
        let mut fill = start.clone();
        let mut items = vec![0u32; cols.len()];
        let mut reach = vec![i64::MIN; total];
        for (j, &k) in keys.iter().enumerate() {
            items[fill[k]] = j as u32;
            fill[k] += 1;
            reach[k] = reach[k].max(-price[j]);
        }
        PriceBuckets { lo: lo.to_vec(), width, per_axis, start, items, reach }
    }

    /// Buckets meeting the axis-aligned box of half-width `radius` around `x`.
    fn keys_within(&self, x: &[f64], radius: f64, d: usize, out: &mut Vec<usize>) {
        out.clear();
        let top = (self.per_axis - 1) as f64;
        let lo: Vec<usize> =
            (0..d).map(|a| math::floor((x[a] - radius - self.lo[a]) / self.width[a]).clamp(0.0, top) as usize).collect();
        let hi: Vec<usize> =
            (0..d).map(|a| math::floor((x[a] + radius - self.lo[a]) / self.width[a]).clamp(0.0, top) as usize).collect();
        let mut idx = lo.clone();
        loop {
            let mut k = 0;
            for a in (0..d).rev() {
                k = k * self.per_axis + idx[a];
            }
            out.push(k);
            let mut a = 0;
            while a < d {
                if idx[a] < hi[a] {
                    idx[a] += 1;
                    break;
                }
                idx[a] = lo[a];
                a += 1;
            }
            if a == d {
                return;
            }
        }
    }

    /// Squared distance from `x` to bucket `k`.
    fn gap_sq(&self, x: &[f64], mut k: usize) -> f64 {
        let mut s = 0.0;
        for (a, &xa) in x.iter().enumerate() {
            let c = k % self.per_axis;
            k /= self.per_axis;
            let lo = self.lo[a] + c as f64 * self.width[a];
            let hi = lo + self.width[a];
            let g = if xa < lo {
                lo - xa
            } else if xa > hi {
                xa - hi
            } else {
                0.0
            };
            s += g * g;
        }
        s
    }
}

/// Quantised cost structure of a sparse assignment problem.
struct Costs<'a> {
    rows: &'a PointSet,
    cols: &'a PointSet,
    p: f64,
    q: &'a Quantiser,
    lo: &'a [f64],
    hi: &'a [f64],
}

/// Non-candidate pairs whose reduced cost at current prices is below
/// `margin`, at most a few per row, cheapest first, together with the largest
/// violation (positive only if some pair is cheaper than its row's assigned
/// edge).
fn price_violations(costs: &Costs, auction: &Auction, margin: i64, per_row: usize) -> (Vec<(usize, u32, i64)>, i64) {
    let &Costs { rows, cols, p, q, lo, hi } = costs;
    let buckets = PriceBuckets::new(cols, &auction.price, lo, hi);
    let mut out = Vec::new();
    let mut largest = 0i64;
    let mut worst: Vec<(i64, u32, i64)> = Vec::new();
    let top = buckets.reach.iter().copied().max().unwrap_or(0);
    let d = rows.dim();
    let mut keys = Vec::new();
    for i in 0..rows.len() {
        let xi = rows.point(i);
        let level = auction.level(i);
        worst.clear();
        let bound = (level + top + margin) as f64 + q.unit as f64;
        if bound <= 0.0 {
            continue;
        }
        let radius = math::powf(bound * (1.0 + 1e-9) / (q.scale * q.unit as f64), 1.0 / p) * (1.0 + 1e-9);
        buckets.keys_within(xi, radius, d, &mut keys);
        for &k in &keys {
            if buckets.start[k] == buckets.start[k + 1] {
                continue;
            }
            let bound = (level + buckets.reach[k] + margin) as f64 + q.unit as f64;
            if bound <= 0.0 {
                continue;
            }
            // Relative slack absorbs rounding in the float bound.
            if math::pow_from_sq(buckets.gap_sq(xi, k), p) * q.scale * q.unit as f64 > bound * (1.0 + 1e-9) {
                continue;
            }
            for &j in &buckets.items[buckets.start[k]..buckets.start[k + 1]] {
                let c = q.of(rows.dist_pow(i, cols, j as usize, p));
                let gap = c + auction.price[j as usize] - level;
                if gap < margin && !auction.has_edge(i, j) {
                    worst.push((gap, j, c));
                }
            }
        }
        worst.sort_unstable();
        if let Some(w) = worst.first() {
            largest = largest.max(-w.0);
        }
        out.extend(worst.iter().take(per_row).map(|&(_, j, c)| (i, j, c)));
    }
    (out, largest)
}

/// Pairs added per row in the first round, cheapest reduced cost first; the
/// allowance doubles every further round so degenerate instances converge in
/// few rounds.
const PAIRS_PER_ROW: usize = 32;

/// Pairs within this fraction of the mean assigned cost of being violated are
/// added too; they tend to become violated once prices move.
const NEAR_MARGIN: f64 = 0.5;

/// Low dimensions have long optimal edges relative to the neighbour scale,
/// so they start from a denser candidate graph.
fn initial_neighbours(d: usize) -> usize {
    if d <= 2 {
        40
    } else {
        12
    }
}

fn assign_sparse(rows: &PointSet, cols: &PointSet, p: f64) -> Vec<usize> {
    let n = rows.len();
    let m = cols.len();
    let (lo, hi) = union_bounds(rows, cols);
    let diam_sq: f64 = lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum();
    let q = Quantiser::new(math::pow_from_sq(diam_sq, p), m);
    let col_index = GridIndex::new(cols, &lo, &hi);
    let row_index = GridIndex::new(rows, &lo, &hi);
    let k0 = initial_neighbours(rows.dim());
    let edge = |i: usize, j: usize| (j as u32, q.of(rows.dist_pow(i, cols, j, p)));
    let mut lists: Vec<Vec<(u32, i64)>> =
        (0..n).map(|i| col_index.knn(rows.point(i), k0).into_iter().map(|j| edge(i, j)).collect()).collect();
    for j in 0..m {
        for i in row_index.knn(cols.point(j), k0) {
            lists[i].push(edge(i, j));
        }
    }
    // A rank pairing along a space-filling curve guarantees a perfect matching.
    let keys_r = hilbert_keys(rows, &lo, &hi);
    let keys_c = hilbert_keys(cols, &lo, &hi);
    let mut ord_r: Vec<usize> = (0..n).collect();
    ord_r.sort_by_key(|&i| (keys_r[i], i));
    let mut ord_c: Vec<usize> = (0..m).collect();
    ord_c.sort_by_key(|&j| (keys_c[j], j));
    for (rank, &i) in ord_r.iter().enumerate() {
        lists[i].push(edge(i, ord_c[rank * m / n]));
    }
    for _ in n..m {
        lists.push((0..m as u32).map(|j| (j, 0)).collect());
    }
    let max_edge = lists.iter().flatten().map(|e| e.1).max().unwrap_or(0);
    let mut auction = Auction::new(lists, m);
    let mut eps = max_edge / 2;
    let mut per_row = PAIRS_PER_ROW;
    let costs = Costs { rows, cols, p, q: &q, lo: &lo, hi: &hi };
    loop {
        let free = auction.free_rows();
        auction.solve_from(eps, free);
        auction.tighten_prices();
        let assigned_total: i64 = (0..n).map(|i| auction.level(i) - auction.price[auction.assigned[i] as usize]).sum();
        let margin = (NEAR_MARGIN * assigned_total as f64 / n as f64) as i64;
        let (extra, largest) = price_violations(&costs, &auction, margin, per_row);
        if largest <= 0 {
            return auction.assigned[..n].iter().map(|&j| j as usize).collect();
        }
        auction.add_edges(&extra);
        eps = largest;
        per_row = per_row.saturating_mul(2);
    }
}

const DENSE_LIMIT: usize = 160;

fn assign_rows(rows: &PointSet, cols: &PointSet, p: f64) -> Vec<usize> {
    if rows.len() <= DENSE_LIMIT || rows.dim() > 8 {
        let mut m = Vec::with_capacity(rows.len() * cols.len());
        for i in 0..rows.len() {
            for j in 0..cols.len() {
                m.push(rows.dist_pow(i, cols, j, p));
            }
        }
        hungarian(rows.len(), cols.len(), &m)
    } else {
        assign_sparse(rows, cols, p)
    }
}

/// Minimum of `sum |x_i - y_{s(i)}|^p` over injections `s` from the smaller
/// side into the larger.
pub fn optimal_assignment(x: &PointSet, y: &PointSet, p: f64) -> Result<Assignment> {
    crate::combinatorial::check_exponent(p)?;
    if x.is_empty() || y.is_empty() {
        return Ok(Assignment { pairs: Vec::new(), cost: 0.0 });
    }
    if x.dim() != y.dim() {
        return Err(crate::error::Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    let mut pairs: Vec<(usize, usize)> = if x.dim() == 1 && x.len() == y.len() {
        sorted_pairs(x, y)
    } else if x.len() <= y.len() {
        assign_rows(x, y, p).into_iter().enumerate().collect()
    } else {
        assign_rows(y, x, p).into_iter().enumerate().map(|(j, i)| (i, j)).collect()
    };
    pairs.sort_unstable();
    let terms: Vec<f64> = pairs.iter().map(|&(i, j)| x.dist_pow(i, y, j, p)).collect();
    Ok(Assignment { pairs, cost: math::pairwise_sum(&terms) })
}

/// On the line, pairing both sides in sorted order is optimal for every
/// convex cost, in particular `|x - y|^p` with `p >= 1`.
fn sorted_pairs(x: &PointSet, y: &PointSet) -> Vec<(usize, usize)> {
    let order = |s: &PointSet| {
        let mut idx: Vec<usize> = (0..s.len()).collect();
        idx.sort_by(|&a, &b| s.point(a)[0].total_cmp(&s.point(b)[0]).then(a.cmp(&b)));
        idx
    };
    order(x).into_iter().zip(order(y)).collect()
}

/// Assignment on an explicit dense cost matrix, for callers outside geometry.
pub fn assignment_from_matrix(rows: usize, cols: usize, cost: &[f64]) -> Vec<(usize, usize)> {
    if rows <= cols {
        hungarian(rows, cols, cost).into_iter().enumerate().collect()
    } else {
        let mut t = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                t[j * rows + i] = cost[i * cols + j];
            }
        }
        let mut v: Vec<(usize, usize)> =
            hungarian(cols, rows, &t).into_iter().enumerate().map(|(j, i)| (i, j)).collect();
        v.sort_unstable();
        v
    }
}

#[cfg(test)]
pub(crate) fn force_sparse(x: &PointSet, y: &PointSet, p: f64) -> f64 {
    let pairs: Vec<(usize, usize)> = if x.len() <= y.len() {
        assign_sparse(x, y, p).into_iter().enumerate().collect()
    } else {
        assign_sparse(y, x, p).into_iter().enumerate().map(|(j, i)| (i, j)).collect()
    };
    let terms: Vec<f64> = pairs.iter().map(|&(i, j)| x.dist_pow(i, y, j, p)).collect();
    math::pairwise_sum(&terms)
}

#[cfg(test)]
pub(crate) fn force_dense(x: &PointSet, y: &PointSet, p: f64) -> f64 {
    let (rows, cols, flip) = if x.len() <= y.len() { (x, y, false) } else { (y, x, true) };
    let mut m = Vec::new();
    for i in 0..rows.len() {
        for j in 0..cols.len() {
            m.push(rows.dist_pow(i, cols, j, p));
        }
    }
    let s = hungarian(rows.len(), cols.len(), &m);
    let terms: Vec<f64> = s
        .iter()
        .enumerate()
        .map(|(i, &j)| if flip { x.dist_pow(j, y, i, p) } else { x.dist_pow(i, y, j, p) })
        .collect();
    math::pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn pts(rng: &mut rand_chacha::ChaCha8Rng, n: usize, d: usize) -> PointSet {
        let v: Vec<f64> = (0..n * d).map(|_| rng.random::<f64>()).collect();
        PointSet::from_flat(d, v).unwrap()
    }

    #[test]
    fn sparse_agrees_with_dense() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for &(n, m, d, p) in &[(200usize, 200usize, 2usize, 1.0), (300, 300, 3, 2.0), (150, 220, 2, 1.0), (250, 180, 3, 1.5)] {
            let x = pts(&mut rng, n, d);
            let y = pts(&mut rng, m, d);
            let a = force_dense(&x, &y, p);
            let b = force_sparse(&x, &y, p);
            assert!((a - b).abs() <= 1e-9 * a, "n={n} m={m}: dense {a} sparse {b}");
        }
    }

    #[test]
    fn sparse_handles_lines_and_duplicates() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let x = pts(&mut rng, 240, 1);
        let y = pts(&mut rng, 240, 1);
        let a = force_dense(&x, &y, 1.0);
        let b = force_sparse(&x, &y, 1.0);
        assert!((a - b).abs() <= 1e-9 * a, "dense {a} sparse {b}");
        let same = pts(&mut rng, 200, 2);
        assert_eq!(force_sparse(&same, &same, 1.0), 0.0);
        let mut doubled = same.clone();
        doubled.extend(&same);
        let other = pts(&mut rng, 400, 2);
        let e = force_dense(&doubled, &other, 2.0);
        let f = force_sparse(&doubled, &other, 2.0);
        assert!((e - f).abs() <= 1e-9 * e, "dense {e} sparse {f}");
    }
}
