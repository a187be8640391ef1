//! Successive shortest paths for dense transportation problems.

use alloc::vec;
use alloc::vec::Vec;

const INF: i64 = i64::MAX;

/// Minimum-cost flow from `supply` (rows) to `demand` (columns) over the
/// complete bipartite graph with integer arc costs `cost[i * cols + j]`.
///
/// Masses are real. Supplies and demands must have equal totals; amounts below
/// `1e-12` of the total are treated as exhausted. With `capacity = Some(c)`
/// every arc carries at most `c`. Returns the positive flows `(i, j, mass)` in
/// row-major order, or `None` when the demand cannot be met.
pub fn min_cost_flow(supply: &[f64], demand: &[f64], cost: &[i64], capacity: Option<f64>) -> Option<Vec<(usize, usize, f64)>> {
    let n = supply.len();
    let m = demand.len();
    debug_assert_eq!(cost.len(), n * m);
    let total: f64 = supply.iter().sum();
    let tol = 1e-12 * total.max(f64::MIN_POSITIVE);
    let cap = capacity.unwrap_or(f64::INFINITY);
    let mut left: Vec<f64> = supply.to_vec();
    let mut need: Vec<f64> = demand.to_vec();
    let mut flow = vec![0.0f64; n * m];
    // Node v < n is row v, node n + j is column j. Reduced arc costs
    // c + pi[u] - pi[v] stay non-negative throughout.
    let mut pi = vec![0i64; n + m];
    for j in 0..m {
        pi[n + j] = (0..n).map(|i| cost[i * m + j]).min().unwrap_or(0);
    }
    let mut dist = vec![INF; n + m];
    let mut pred = vec![usize::MAX; n + m];
    let mut done = vec![false; n + m];
    loop {
        for v in left.iter_mut().chain(need.iter_mut()) {
            if *v <= tol {
                *v = 0.0;
            }
        }
        if left.iter().all(|&v| v == 0.0) {
            break;
        }
        dist.fill(INF);
        pred.fill(usize::MAX);
        done.fill(false);
        for i in 0..n {
            if left[i] > 0.0 {
                dist[i] = 0;
            }
        }
        let mut target = usize::MAX;
        loop {
            let mut u = usize::MAX;
            let mut best = INF;
            for v in 0..n + m {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u >= n && need[u - n] > 0.0 {
                target = u;
                break;
            }
            if u < n {
                for j in 0..m {
                    let v = n + j;
                    if done[v] || flow[u * m + j] >= cap - tol {
                        continue;
                    }
                    let nd = best + cost[u * m + j] + pi[u] - pi[v];
                    if nd < dist[v] {
                        dist[v] = nd;
                        pred[v] = u;
                    }
                }
            } else {
                let j = u - n;
                for i in 0..n {
                    if done[i] || flow[i * m + j] <= tol {
                        continue;
                    }
                    let nd = best - cost[i * m + j] + pi[u] - pi[i];
                    if nd < dist[i] {
                        dist[i] = nd;
                        pred[i] = u;
                    }
                }
            }
        }
        if target == usize::MAX {
            return None;
        }
        let reach = dist[target];
        for v in 0..n + m {
            pi[v] += dist[v].min(reach);
        }
        let mut amount = need[target - n];
        let mut v = target;
        while pred[v] != usize::MAX {
            let u = pred[v];
            amount = amount.min(if u < n { cap - flow[u * m + v - n] } else { flow[v * m + u - n] });
            v = u;
        }
        amount = amount.min(left[v]);
        left[v] -= amount;
        need[target - n] -= amount;
        let mut v = target;
        while pred[v] != usize::MAX {
            let u = pred[v];
            if u < n {
                flow[u * m + v - n] += amount;
            } else {
                let f = &mut flow[v * m + u - n];
                *f -= amount;
                if *f <= tol {
                    *f = 0.0;
                }
            }
            v = u;
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if flow[i * m + j] > 0.0 {
                out.push((i, j, flow[i * m + j]));
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_mass_across_targets() {
        // One source of mass 2, two sinks of mass 1 at costs 1 and 2.
        let f = min_cost_flow(&[2.0], &[1.0, 1.0], &[1, 2], None).unwrap();
        assert_eq!(f, vec![(0, 0, 1.0), (0, 1, 1.0)]);
    }

    #[test]
    fn unit_capacities_force_spreading() {
        // Two rows of supply 2 into two columns, arcs capped at 1: every arc used.
        let f = min_cost_flow(&[2.0, 2.0], &[2.0, 2.0], &[1, 5, 5, 1], Some(1.0)).unwrap();
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn reroutes_through_reverse_arcs() {
        // Greedy would send row 0 to column 0; the optimum crosses.
        let cost = [1, 2, 1, 100];
        let f = min_cost_flow(&[1.0, 1.0], &[1.0, 1.0], &cost, None).unwrap();
        assert_eq!(f, vec![(0, 1, 1.0), (1, 0, 1.0)]);
    }
}
