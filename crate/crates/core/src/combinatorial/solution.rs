use alloc::vec;
use alloc::vec::Vec;

use super::kind::ProblemKind;
use crate::error::{invalid, Error, Result};
use crate::geometry::PointSet;
use crate::math;

/// Two point families with the edge-weight exponent `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteInstance {
    pub x: PointSet,
    pub y: PointSet,
    pub p: f64,
    pub kind: ProblemKind,
}

impl BipartiteInstance {
    pub fn new(x: PointSet, y: PointSet, p: f64, kind: ProblemKind) -> Result<Self> {
        check_exponent(p)?;
        if !x.is_empty() && !y.is_empty() && x.dim() != y.dim() {
            return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
        }
        Ok(BipartiteInstance { x, y, p, kind: kind.validate()? })
    }

    /// `|x_i - y_j|^p`.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.x.dist_pow(i, &self.y, j, self.p)
    }

    /// Number of vertices used on each side by a feasible solution:
    /// `min(|x|, |y|)`, or zero when that is below the problem's minimum size.
    pub fn support_size(&self) -> usize {
        let z = self.x.len().min(self.y.len());
        if z < self.kind.min_size() {
            0
        } else {
            z
        }
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(invalid("p", "exponent must be finite and at least 1"))
    }
}

/// A subgraph of the complete bipartite graph, stored as side-1/side-2 index pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub n_x: usize,
    pub n_y: usize,
    /// Edges in lexicographic order.
    pub edges: Vec<(usize, usize)>,
    pub cost: f64,
}

impl Solution {
    pub fn new(n_x: usize, n_y: usize, mut edges: Vec<(usize, usize)>, cost: f64) -> Self {
        edges.sort_unstable();
        Solution { n_x, n_y, edges, cost }
    }

    pub fn empty(n_x: usize, n_y: usize) -> Self {
        Solution { n_x, n_y, edges: Vec::new(), cost: 0.0 }
    }

    /// Builds the solution and evaluates its cost on `inst`.
    pub fn priced(inst: &BipartiteInstance, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut s = Solution::new(inst.x.len(), inst.y.len(), edges, 0.0);
        s.cost = cost(inst, &s)?;
        Ok(s)
    }

    pub fn used_x(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.edges.iter().map(|e| e.0).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn used_y(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.edges.iter().map(|e| e.1).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let mut dx = vec![0; self.n_x];
        let mut dy = vec![0; self.n_y];
        for &(i, j) in &self.edges {
            dx[i] += 1;
            dy[j] += 1;
        }
        (dx, dy)
    }

    /// Side-2 neighbours of side-1 vertex `i`.
    pub fn neighbours_of_x(&self, i: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.0 == i).map(|e| e.1).collect()
    }

    /// Side-1 neighbours of side-2 vertex `j`.
    pub fn neighbours_of_y(&self, j: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.1 == j).map(|e| e.0).collect()
    }
}

/// Total weight `sum |x_i - y_j|^p` over the solution's edges.
pub fn cost(inst: &BipartiteInstance, sol: &Solution) -> Result<f64> {
    let mut terms = Vec::with_capacity(sol.edges.len());
    for &(i, j) in &sol.edges {
        if i >= inst.x.len() {
            return Err(Error::IndexOutOfRange { index: i, len: inst.x.len() });
        }
        if j >= inst.y.len() {
            return Err(Error::IndexOutOfRange { index: j, len: inst.y.len() });
        }
        terms.push(inst.weight(i, j));
    }
    Ok(math::pairwise_sum(&terms))
}
