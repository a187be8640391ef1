use alloc::vec::Vec;

use super::kind::ProblemKind;
use super::solution::{BipartiteInstance, Solution};
use super::union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
}

/// One reason a subgraph is not a feasible solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    IndexOutOfRange { side: Side, index: usize },
    RepeatedEdge(usize, usize),
    SupportSize { side: Side, expected: usize, found: usize },
    Degree { side: Side, vertex: usize, degree: usize, expected: usize },
    DegreeAbove { side: Side, vertex: usize, degree: usize, bound: usize },
    Disconnected { components: usize },
    EdgeCount { expected: usize, found: usize },
}

/// Checks `edges` against the constraints of `kind` on an `n_x` by `n_y`
/// instance. A feasible solution uses exactly `min(n_x, n_y)` vertices per side
/// (none when that is below the problem minimum) and satisfies the
/// kind's predicate on the used vertices.
pub fn violations(kind: ProblemKind, n_x: usize, n_y: usize, edges: &[(usize, usize)]) -> Vec<Violation> {
    let mut out = Vec::new();
    for &(i, j) in edges {
        if i >= n_x {
            out.push(Violation::IndexOutOfRange { side: Side::X, index: i });
        }
        if j >= n_y {
            out.push(Violation::IndexOutOfRange { side: Side::Y, index: j });
        }
    }
    if !out.is_empty() {
        return out;
    }
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            out.push(Violation::RepeatedEdge(w[0].0, w[0].1));
        }
    }
    let z_raw = n_x.min(n_y);
    let z = if z_raw < kind.min_size() { 0 } else { z_raw };
    let sol = Solution::new(n_x, n_y, sorted, 0.0);
    let (dx, dy) = sol.degrees();
    let used_x = dx.iter().filter(|d| **d > 0).count();
    let used_y = dy.iter().filter(|d| **d > 0).count();
    if used_x != z {
        out.push(Violation::SupportSize { side: Side::X, expected: z, found: used_x });
    }
    if used_y != z {
        out.push(Violation::SupportSize { side: Side::Y, expected: z, found: used_y });
    }
    if z == 0 {
        return out;
    }

    let exact_degree = match kind {
        ProblemKind::Matching => Some(1),
        ProblemKind::BipartiteTsp => Some(2),
        ProblemKind::ConnectedKFactor(k) | ProblemKind::KFactor(k) => Some(k),
        ProblemKind::KBoundedMst(_) => None,
    };
    let bound = kind.max_degree();
    for (side, degs) in [(Side::X, &dx), (Side::Y, &dy)] {
        for (v, &deg) in degs.iter().enumerate() {
            if deg == 0 {
                continue;
            }
            match exact_degree {
                Some(e) if deg != e => out.push(Violation::Degree { side, vertex: v, degree: deg, expected: e }),
                None if deg > bound => out.push(Violation::DegreeAbove { side, vertex: v, degree: deg, bound }),
                _ => {}
            }
        }
    }

    let needs_connected = matches!(
        kind,
        ProblemKind::BipartiteTsp | ProblemKind::ConnectedKFactor(_) | ProblemKind::KBoundedMst(_)
    );
    if needs_connected {
        let mut uf = UnionFind::new(n_x + n_y);
        for &(i, j) in &sol.edges {
            uf.union(i, n_x + j);
        }
        let unused = (n_x - used_x) + (n_y - used_y);
        let components = uf.components() - unused;
        if components != 1 {
            out.push(Violation::Disconnected { components });
        }
    }
    if let ProblemKind::KBoundedMst(_) = kind {
        let expected = used_x + used_y - 1;
        if sol.edges.len() != expected {
            out.push(Violation::EdgeCount { expected, found: sol.edges.len() });
        }
    }
    out
}

/// Whether `sol` is feasible for the instance's problem kind.
pub fn is_feasible(inst: &BipartiteInstance, sol: &Solution) -> bool {
    sol.n_x == inst.x.len()
        && sol.n_y == inst.y.len()
        && violations(inst.kind, inst.x.len(), inst.y.len(), &sol.edges).is_empty()
}
