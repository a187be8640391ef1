use alloc::vec::Vec;

use crate::combinatorial::{BipartiteInstance, Solution};
use crate::error::Result;

/// How a solution was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Brute,
    Exact,
    Heuristic(&'static str),
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Method::Brute => f.write_str("brute"),
            Method::Exact => f.write_str("exact"),
            Method::Heuristic(name) => write!(f, "heuristic:{name}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimality {
    Proven,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Solution,
    pub method: Method,
    pub optimality: Optimality,
}

impl SolveReport {
    pub fn cost(&self) -> f64 {
        self.solution.cost
    }

    pub(crate) fn proven(solution: Solution, method: Method) -> Self {
        SolveReport { solution, method, optimality: Optimality::Proven }
    }

    pub(crate) fn heuristic(solution: Solution, name: &'static str) -> Self {
        SolveReport { solution, method: Method::Heuristic(name), optimality: Optimality::Heuristic }
    }
}

/// Dense `n_x * n_y` weight matrix, row-major.
pub(crate) fn weights(inst: &BipartiteInstance) -> Vec<f64> {
    let (n, m) = (inst.x.len(), inst.y.len());
    let mut w = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            w.push(inst.weight(i, j));
        }
    }
    w
}

/// Calls `f` with every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if k > n {
        return Ok(());
    }
    let mut s: Vec<usize> = (0..k).collect();
    loop {
        f(&s)?;
        let Some(i) = (0..k).rev().find(|&i| s[i] < n - k + i) else {
            return Ok(());
        };
        s[i] += 1;
        for t in i + 1..k {
            s[t] = s[t - 1] + 1;
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Best solution over all ways of choosing `min(n_x, n_y)` vertices of the
/// larger side, solving each square subinstance with `square`. Ties keep the
/// lexicographically first subset.
pub(crate) fn over_subsets(
    inst: &BipartiteInstance,
    mut square: impl FnMut(&BipartiteInstance) -> Result<Solution>,
) -> Result<Solution> {
    let (n, m) = (inst.x.len(), inst.y.len());
    if n == m {
        return square(inst);
    }
    let flip = n > m;
    let (small, large) = if flip { (m, n) } else { (n, m) };
    let mut best: Option<Solution> = None;
    for_each_subset(large, small, |s| {
        let sub = if flip {
            BipartiteInstance { x: inst.x.subset(s), y: inst.y.clone(), p: inst.p, kind: inst.kind }
        } else {
            BipartiteInstance { x: inst.x.clone(), y: inst.y.subset(s), p: inst.p, kind: inst.kind }
        };
        let sol = square(&sub)?;
        let edges: Vec<(usize, usize)> =
            sol.edges.iter().map(|&(i, j)| if flip { (s[i], j) } else { (i, s[j]) }).collect();
        let full = Solution::priced(inst, edges)?;
        if best.as_ref().is_none_or(|b| full.cost < b.cost) {
            best = Some(full);
        }
        Ok(())
    })?;
    Ok(best.unwrap_or_else(|| Solution::empty(n, m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_in_order() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| {
            seen.push((s[0], s[1]));
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(binomial(9, 4), 126);
        let mut count = 0;
        for_each_subset(3, 0, |_| {
            count += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(count, 1);
    }
}
