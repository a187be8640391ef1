//! Gluing two feasible solutions on disjoint vertex sets into one.

use alloc::format;
use alloc::vec::Vec;

use super::feasibility::violations;
use super::kind::ProblemKind;
use super::solution::Solution;
use super::union_find::UnionFind;
use crate::error::{Error, Result};

/// Result of [`glue`]. Indices of the second solution are shifted by the
/// first solution's side size on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct Glued {
    pub solution: Solution,
    pub removed: [(usize, usize); 2],
    pub inserted: [(usize, usize); 2],
    /// Edges added on top of the swap (at most one, for degree-bounded trees).
    pub extra: Vec<(usize, usize)>,
}

/// Joins `g` (on `n + n` vertices) and `h` (on `m + m` vertices) at side-1
/// vertices `x1` of `g` and `x2` of `h`.
///
/// Picks `y` adjacent to `x1` and `y'` adjacent to `x2`, removes `{x1, y}` and
/// `{x2, y'}` and inserts `{x1, y'}` and `{x2, y}`. For degree-bounded trees
/// the two resulting components are reconnected by one edge between a side-1
/// leaf and a side-2 leaf of `g`. Among admissible `(y, y')` the pair with the
/// smallest change in `weight` wins; ties go to the lexicographically smallest.
/// `weight(i, j)` is evaluated on glued indices.
pub fn glue(
    kind: ProblemKind,
    g: &Solution,
    h: &Solution,
    x1: usize,
    x2: usize,
    weight: impl Fn(usize, usize) -> f64,
) -> Result<Glued> {
    let n = g.n_x;
    let m = h.n_x;
    for (name, s) in [("first", g), ("second", h)] {
        if s.n_x != s.n_y {
            return Err(Error::InvalidSolution(format!("{name} solution is not square")));
        }
        let v = violations(kind, s.n_x, s.n_y, &s.edges);
        if !v.is_empty() {
            return Err(Error::InvalidSolution(format!("{name} solution infeasible: {:?}", v[0])));
        }
        if s.n_x < kind.min_size() || s.n_x == 0 {
            return Err(Error::InvalidSolution(format!("{name} solution is empty")));
        }
    }
    if x1 >= n {
        return Err(Error::IndexOutOfRange { index: x1, len: n });
    }
    if x2 >= m {
        return Err(Error::IndexOutOfRange { index: x2, len: m });
    }

    let ny = g.neighbours_of_x(x1);
    let ny2: Vec<usize> = h.neighbours_of_x(x2).into_iter().map(|j| j + n).collect();
    let gx2 = x2 + n;
    let mut best: Option<(f64, usize, usize)> = None;
    for &y in &ny {
        for &y2 in &ny2 {
            let delta = weight(x1, y2) + weight(gx2, y) - weight(x1, y) - weight(gx2, y2);
            if best.is_none_or(|b| delta < b.0) {
                best = Some((delta, y, y2));
            }
        }
    }
    let (delta, y, y2) = best.expect("feasible solutions have no isolated used vertex");

    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(g.edges.len() + h.edges.len() + 1);
    edges.extend(g.edges.iter().copied().filter(|&e| e != (x1, y)));
    edges.extend(h.edges.iter().map(|&(i, j)| (i + n, j + n)).filter(|&e| e != (gx2, y2)));
    edges.push((x1, y2));
    edges.push((gx2, y));

    let mut extra = Vec::new();
    let mut extra_cost = 0.0;
    if let ProblemKind::KBoundedMst(_) = kind {
        let total = n + m;
        let mut uf = UnionFind::new(2 * total);
        for &(i, j) in &edges {
            uf.union(i, total + j);
        }
        let (dx, dy) = g.degrees();
        let leaves_x: Vec<usize> = (0..n).filter(|&i| dx[i] == 1).collect();
        let leaves_y: Vec<usize> = (0..n).filter(|&j| dy[j] == 1).collect();
        let pair = leaves_x
            .iter()
            .flat_map(|&a| leaves_y.iter().map(move |&b| (a, b)))
            .find(|&(a, b)| uf.find(a) != uf.find(total + b))
            .ok_or_else(|| Error::InvalidSolution("no leaf pair reconnects the glued tree".into()))?;
        extra_cost = weight(pair.0, pair.1);
        extra.push(pair);
        edges.push(pair);
    }

    let cost = g.cost + h.cost + delta + extra_cost;
    Ok(Glued {
        solution: Solution::new(n + m, n + m, edges, cost),
        removed: [(x1, y), (gx2, y2)],
        inserted: [(x1, y2), (gx2, y)],
        extra,
    })
}
