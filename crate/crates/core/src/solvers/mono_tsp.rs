//! Travelling salesman tours on a single point family.

use alloc::vec;
use alloc::vec::Vec;

use super::hilbert::hilbert_order;
use crate::error::{Error, Result};
use crate::geometry::spatial::GridIndex;
use crate::geometry::PointSet;
use crate::math;

/// Largest instance solved exactly by dynamic programming.
pub const EXACT_TOUR_CAP: usize = 16;

/// Sweep limit of the 2-opt improvement.
pub const TWO_OPT_SWEEPS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TourMode {
    Exact,
    Heuristic,
}

/// A closed tour visiting every point once.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    pub order: Vec<usize>,
    pub cost: f64,
}

/// `sum_i |x_{order(i)} - x_{order(i+1)}|^p`, indices mod `n`.
pub fn tour_cost(x: &PointSet, order: &[usize], p: f64) -> f64 {
    let n = order.len();
    if n < 2 {
        return 0.0;
    }
    let terms: Vec<f64> = (0..n).map(|i| x.dist_pow(order[i], x, order[(i + 1) % n], p)).collect();
    math::pairwise_sum(&terms)
}

/// Minimum-cost closed tour through `x`. Exact mode runs Held-Karp and is
/// capped at [`EXACT_TOUR_CAP`] points; heuristic mode orders the points along
/// a Hilbert curve and improves the order by 2-opt.
pub fn solve_mono_tsp(x: &PointSet, p: f64, mode: TourMode) -> Result<Tour> {
    crate::combinatorial::check_exponent(p)?;
    let order = match mode {
        TourMode::Exact => {
            if x.len() > EXACT_TOUR_CAP {
                return Err(Error::SizeCap { what: "exact tour", size: x.len(), cap: EXACT_TOUR_CAP });
            }
            held_karp(x, p)
        }
        TourMode::Heuristic => {
            let mut order = hilbert_order(x);
            two_opt(x, &mut order, p, TWO_OPT_SWEEPS);
            order
        }
    };
    let cost = tour_cost(x, &order, p);
    Ok(Tour { order, cost })
}

fn held_karp(x: &PointSet, p: f64) -> Vec<usize> {
    let n = x.len();
    if n <= 3 {
        return (0..n).collect();
    }
    let w: Vec<f64> = (0..n * n).map(|k| x.dist_pow(k / n, x, k % n, p)).collect();
    // Tours start at point 0; `mask` ranges over the others (bit b is point b+1).
    let m = n - 1;
    let full = (1usize << m) - 1;
    let mut dp = vec![f64::INFINITY; (full + 1) * m];
    let mut parent = vec![u8::MAX; (full + 1) * m];
    for b in 0..m {
        dp[(1 << b) * m + b] = w[b + 1];
    }
    for mask in 1..=full {
        for last in 0..m {
            let cur = dp[mask * m + last];
            if mask & (1 << last) == 0 || !cur.is_finite() {
                continue;
            }
            for next in 0..m {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let nm = mask | (1 << next);
                let c = cur + w[(last + 1) * n + next + 1];
                if c < dp[nm * m + next] {
                    dp[nm * m + next] = c;
                    parent[nm * m + next] = last as u8;
                }
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut last = 0;
    for b in 0..m {
        let c = dp[full * m + b] + w[b + 1];
        if c < best {
            best = c;
            last = b;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    loop {
        order.push(last + 1);
        let prev = parent[mask * m + last];
        mask &= !(1 << last);
        if prev == u8::MAX {
            break;
        }
        last = prev as usize;
    }
    order.push(0);
    order.reverse();
    order
}

/// Reverses the cyclic stretch of `len` positions starting at `start`.
fn reverse(tour: &mut [usize], pos: &mut [usize], start: usize, len: usize) {
    let n = tour.len();
    for k in 0..len / 2 {
        let a = (start + k) % n;
        let b = (start + len - 1 - k) % n;
        tour.swap(a, b);
        pos[tour[a]] = a;
        pos[tour[b]] = b;
    }
}

/// First-improvement 2-opt over nearest-neighbour candidate moves.
fn two_opt(x: &PointSet, tour: &mut [usize], p: f64, sweeps: usize) {
    let n = tour.len();
    if n < 4 {
        return;
    }
    let neighbours = GridIndex::over(x).neighbour_lists(10.min(n - 1));
    let mut pos = vec![0; n];
    for (i, &v) in tour.iter().enumerate() {
        pos[v] = i;
    }
    let w = |a: usize, b: usize| x.dist_pow(a, x, b, p);
    for _ in 0..sweeps {
        let mut improved = false;
        for i in 0..n {
            for forward in [true, false] {
                let a = tour[i];
                let b = if forward { tour[(i + 1) % n] } else { tour[(i + n - 1) % n] };
                let ab = w(a, b);
                for &c in &neighbours[a] {
                    let ac = w(a, c);
                    if ac >= ab {
                        break;
                    }
                    let j = pos[c];
                    let d = if forward { tour[(j + 1) % n] } else { tour[(j + n - 1) % n] };
                    if c == b || d == a {
                        continue;
                    }
                    let delta = ac + w(b, d) - ab - w(c, d);
                    if delta < -1e-12 * (ab + ac) {
                        // Forward: edges (a,b),(c,d) become (a,c),(b,d) by reversing b..c.
                        let (s, e) = if forward { ((i + 1) % n, j) } else { (j, (i + n - 1) % n) };
                        let len = (e + n - s) % n + 1;
                        if 2 * len <= n {
                            reverse(tour, &mut pos, s, len);
                        } else {
                            reverse(tour, &mut pos, (e + 1) % n, n - len);
                        }
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(x: &PointSet, p: f64) -> f64 {
        let n = x.len();
        let mut rest: Vec<usize> = (1..n).collect();
        let mut best = f64::INFINITY;
        permute(&mut rest, 0, &mut |perm| {
            let mut order = vec![0];
            order.extend_from_slice(perm);
            best = best.min(tour_cost(x, &order, p));
        });
        best
    }

    fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    fn lcg_points(n: usize, d: usize, seed: u64) -> PointSet {
        let mut s = seed;
        let v: Vec<f64> = (0..n * d)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect();
        PointSet::from_flat(d, v).unwrap()
    }

    #[test]
    fn held_karp_matches_enumeration() {
        for seed in 0..20 {
            let x = lcg_points(3 + (seed as usize % 6), 2, seed);
            for &p in &[1.0, 2.0] {
                let t = solve_mono_tsp(&x, p, TourMode::Exact).unwrap();
                let b = brute(&x, p);
                assert!((t.cost - b).abs() <= 1e-12 * b.max(1.0), "seed {seed}: {} vs {b}", t.cost);
            }
        }
    }

    #[test]
    fn two_opt_never_worse_than_hilbert() {
        for seed in 0..5 {
            let x = lcg_points(500, 2, seed);
            let base = tour_cost(&x, &hilbert_order(&x), 1.0);
            let t = solve_mono_tsp(&x, 1.0, TourMode::Heuristic).unwrap();
            assert!(t.cost <= base);
            let mut seen = t.order.clone();
            seen.sort();
            assert_eq!(seen, (0..500).collect::<Vec<_>>());
            assert!((t.cost - tour_cost(&x, &t.order, 1.0)).abs() < 1e-12);
        }
    }
}
