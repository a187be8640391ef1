//! Constructive solutions from a short tour and an optimal matching, with
//! local improvement.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::assignment::{optimal_assignment, Assignment};
use super::mono_tsp::{solve_mono_tsp, TourMode};
use super::report::{Method, SolveReport};
use crate::combinatorial::{tour_factor_edges, BipartiteInstance, ProblemKind, Solution};
use crate::error::Result;
use crate::geometry::spatial::GridIndex;

/// Sweep limit of the pair-relocation improvement on bipartite tours.
pub const RELOCATION_SWEEPS: usize = 50;

/// Near neighbours considered per vertex by the local searches.
const CANDIDATES: usize = 8;

/// Feasible solution for any kind: the optimal matching for matchings, and
/// otherwise the regular graph built from a heuristic tour of side 1 and the
/// optimal matching, improved by local search for tours and trees. With
/// unequal sides the vertices of the optimal matching are used.
pub fn solve_heuristic(inst: &BipartiteInstance) -> Result<SolveReport> {
    if inst.support_size() == 0 {
        return Ok(SolveReport::heuristic(Solution::empty(inst.x.len(), inst.y.len()), name(inst.kind)));
    }
    solve_heuristic_with(inst, optimal_assignment(&inst.x, &inst.y, inst.p)?)
}

/// [`solve_heuristic`] from an optimal assignment the caller already holds.
pub fn solve_heuristic_with(inst: &BipartiteInstance, matching: Assignment) -> Result<SolveReport> {
    let (n, m) = (inst.x.len(), inst.y.len());
    if inst.support_size() == 0 {
        return Ok(SolveReport::heuristic(Solution::empty(n, m), name(inst.kind)));
    }
    if inst.kind == ProblemKind::Matching {
        return Ok(SolveReport::proven(Solution::new(n, m, matching.pairs, matching.cost), Method::Exact));
    }
    let xs: Vec<usize> = matching.pairs.iter().map(|e| e.0).collect();
    let ys: Vec<usize> = matching.pairs.iter().map(|e| e.1).collect();
    let square = if n == m {
        inst.clone()
    } else {
        BipartiteInstance { x: inst.x.subset(&xs), y: inst.y.subset(&ys), p: inst.p, kind: inst.kind }
    };
    let rho = if n == m { matching.permutation() } else { (0..xs.len()).collect() };
    let edges = square_heuristic(&square, &rho)?;
    let edges = if n == m { edges } else { edges.into_iter().map(|(i, j)| (xs[i], ys[j])).collect() };
    Ok(SolveReport::heuristic(Solution::priced(inst, edges)?, name(inst.kind)))
}

fn name(kind: ProblemKind) -> &'static str {
    match kind {
        ProblemKind::Matching => "assignment",
        ProblemKind::BipartiteTsp => "tour-factor+relocation",
        ProblemKind::ConnectedKFactor(_) | ProblemKind::KFactor(_) => "tour-factor",
        ProblemKind::KBoundedMst(_) => "tour-factor-bfs+swap",
    }
}

fn square_heuristic(inst: &BipartiteInstance, rho: &[usize]) -> Result<Vec<(usize, usize)>> {
    let sigma = solve_mono_tsp(&inst.x, inst.p, TourMode::Heuristic)?.order;
    Ok(match inst.kind {
        ProblemKind::Matching => unreachable!("matchings are solved exactly"),
        ProblemKind::BipartiteTsp => {
            let n = sigma.len();
            let mut seq = Vec::with_capacity(2 * n);
            for i in 0..n {
                seq.push(sigma[i]);
                seq.push(n + rho[sigma[(i + 1) % n]]);
            }
            relocate_pairs(inst, &seq)
        }
        ProblemKind::ConnectedKFactor(k) | ProblemKind::KFactor(k) => tour_factor_edges(&sigma, rho, k)?,
        ProblemKind::KBoundedMst(k) => {
            let n = sigma.len();
            if n == 1 {
                return Ok(vec![(0, 0)]);
            }
            let factor = tour_factor_edges(&sigma, rho, k.min(n))?;
            let tree = bfs_tree(n, &factor);
            improve_tree(inst, tree, k)
        }
    })
}

/// Weight between two vertices of opposite sides; side-2 ids are offset by `n`.
fn vertex_weight(inst: &BipartiteInstance, n: usize, a: usize, b: usize) -> f64 {
    if a < n {
        inst.weight(a, b - n)
    } else {
        inst.weight(b, a - n)
    }
}

/// Opposite-side near neighbours of every vertex, in vertex-id numbering.
fn cross_neighbours(inst: &BipartiteInstance, k: usize) -> Vec<Vec<usize>> {
    let n = inst.x.len();
    let k = k.min(n);
    let mut all = inst.x.clone();
    all.extend(&inst.y);
    let (lo, hi) = all.bounds().expect("instance is non-empty");
    let ix = GridIndex::new(&inst.x, &lo, &hi);
    let iy = GridIndex::new(&inst.y, &lo, &hi);
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        out.push(iy.knn(inst.x.point(i), k).into_iter().map(|j| n + j).collect());
    }
    for j in 0..n {
        out.push(ix.knn(inst.y.point(j), k));
    }
    out
}

/// Or-opt on an alternating cycle over vertex ids `0..2n`: moves a pair of
/// consecutive vertices elsewhere, reversing it when needed to keep sides
/// alternating.
fn relocate_pairs(inst: &BipartiteInstance, seq: &[usize]) -> Vec<(usize, usize)> {
    let n = inst.x.len();
    let len = seq.len();
    let mut next = vec![0; len];
    let mut prev = vec![0; len];
    for k in 0..len {
        next[seq[k]] = seq[(k + 1) % len];
        prev[seq[(k + 1) % len]] = seq[k];
    }
    if n >= 3 {
        let near = cross_neighbours(inst, CANDIDATES);
        let w = |a: usize, b: usize| vertex_weight(inst, n, a, b);
        for _ in 0..RELOCATION_SWEEPS {
            let mut improved = false;
            for s1 in 0..len {
                let s2 = next[s1];
                let (a, b) = (prev[s1], next[s2]);
                let gain = w(a, s1) + w(s2, b) - w(a, b);
                let tol = 1e-12 * gain.abs();
                let mut best: Option<(f64, usize, usize, bool)> = None;
                for &c in near[s1].iter().chain(&near[s2]) {
                    for (u, v) in [(c, next[c]), (prev[c], c)] {
                        if u == s1 || u == s2 || v == s1 || v == s2 {
                            continue;
                        }
                        // `u` opposite to `s1` gives u-s1-s2-v, otherwise u-s2-s1-v.
                        let forward = (u < n) != (s1 < n);
                        let add = if forward { w(u, s1) + w(s2, v) } else { w(u, s2) + w(s1, v) } - w(u, v);
                        if add < gain - tol && best.is_none_or(|bst| add < bst.0) {
                            best = Some((add, u, v, forward));
                        }
                    }
                }
                if let Some((_, u, v, forward)) = best {
                    next[a] = b;
                    prev[b] = a;
                    let (first, second) = if forward { (s1, s2) } else { (s2, s1) };
                    next[u] = first;
                    prev[first] = u;
                    next[first] = second;
                    prev[second] = first;
                    next[second] = v;
                    prev[v] = second;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
    }
    let mut edges: Vec<(usize, usize)> =
        (0..len).map(|v| if v < n { (v, next[v] - n) } else { (next[v], v - n) }).collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Breadth-first spanning tree of a connected subgraph, rooted at side-1
/// vertex 0 with neighbours visited in increasing order.
fn bfs_tree(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut adj = vec![Vec::new(); 2 * n];
    for &(i, j) in edges {
        adj[i].push(n + j);
        adj[n + j].push(i);
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let mut seen = vec![false; 2 * n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut tree = Vec::with_capacity(2 * n - 1);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                tree.push(if u < n { (u, v - n) } else { (v, u - n) });
                queue.push_back(v);
            }
        }
    }
    tree
}

/// Parent and depth of every vertex of a spanning tree rooted at vertex 0.
struct Rooted {
    parent: Vec<usize>,
    depth: Vec<usize>,
}

fn root_tree(n: usize, tree: &[(usize, usize)]) -> Rooted {
    let mut adj = vec![Vec::new(); 2 * n];
    for &(i, j) in tree {
        adj[i].push(n + j);
        adj[n + j].push(i);
    }
    let mut parent = vec![usize::MAX; 2 * n];
    let mut depth = vec![0; 2 * n];
    let mut stack = vec![0usize];
    parent[0] = 0;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if parent[v] == usize::MAX {
                parent[v] = u;
                depth[v] = depth[u] + 1;
                stack.push(v);
            }
        }
    }
    Rooted { parent, depth }
}

/// Edge swaps: insert a short non-tree edge and drop the heaviest edge on the
/// cycle it closes, provided degrees stay within `kappa`. At most `10 n`
/// swaps are made.
fn improve_tree(inst: &BipartiteInstance, mut tree: Vec<(usize, usize)>, kappa: usize) -> Vec<(usize, usize)> {
    let n = inst.x.len();
    let near = cross_neighbours(inst, CANDIDATES);
    let mut cands: Vec<(f64, usize, usize)> = Vec::new();
    for (v, list) in near.iter().enumerate() {
        for &u in list {
            let (i, j) = if v < n { (v, u - n) } else { (u, v - n) };
            cands.push((inst.weight(i, j), i, j));
        }
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    cands.dedup_by(|a, b| (a.1, a.2) == (b.1, b.2));
    let mut degree = vec![0usize; 2 * n];
    for &(i, j) in &tree {
        degree[i] += 1;
        degree[n + j] += 1;
    }
    let cap = 10 * n;
    let mut swaps = 0;
    let mut rooted = root_tree(n, &tree);
    loop {
        let mut changed = false;
        for &(we, i, j) in &cands {
            if swaps >= cap {
                return tree;
            }
            let (a, b) = (i, n + j);
            if rooted.parent[a] == b || rooted.parent[b] == a {
                continue;
            }
            // Climb both ends to their common ancestor, keeping the heaviest
            // removable edge on the way.
            let (mut u, mut v) = (a, b);
            let mut best: Option<(f64, usize, usize)> = None;
            let mut consider = |c: usize, p: usize| {
                let wf = vertex_weight(inst, n, c, p);
                let da = degree[a] + 1 - usize::from(c == a || p == a);
                let db = degree[b] + 1 - usize::from(c == b || p == b);
                if da <= kappa && db <= kappa && best.is_none_or(|bst| wf > bst.0) {
                    best = Some((wf, c, p));
                }
            };
            while u != v {
                if rooted.depth[u] >= rooted.depth[v] {
                    consider(u, rooted.parent[u]);
                    u = rooted.parent[u];
                } else {
                    consider(v, rooted.parent[v]);
                    v = rooted.parent[v];
                }
            }
            let Some((wf, c, p)) = best else { continue };
            if wf <= we + 1e-12 * we.abs() {
                continue;
            }
            let drop = if c < n { (c, p - n) } else { (p, c - n) };
            let pos = tree.iter().position(|&e| e == drop).expect("path edge is in the tree");
            tree[pos] = (i, j);
            degree[drop.0] -= 1;
            degree[n + drop.1] -= 1;
            degree[a] += 1;
            degree[b] += 1;
            swaps += 1;
            changed = true;
            rooted = root_tree(n, &tree);
        }
        if !changed {
            return tree;
        }
    }
}
