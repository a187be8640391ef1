//! Uniform bucket grid for nearest-neighbour and fixed-radius queries.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::points::PointSet;
use crate::math;

#[derive(Debug, Clone)]
pub struct GridIndex<'a> {
    points: &'a PointSet,
    lo: Vec<f64>,
    cell: Vec<f64>,
    counts: Vec<usize>,
    starts: Vec<usize>,
    items: Vec<usize>,
}

#[derive(PartialEq)]
struct Cand(f64, usize);

impl Eq for Cand {}

impl PartialOrd for Cand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cand {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl<'a> GridIndex<'a> {
    /// Indexes `points` over the box `[lo, hi]`, which must contain every point
    /// that will be indexed or queried.
    pub fn new(points: &'a PointSet, lo: &[f64], hi: &[f64]) -> Self {
        let d = points.dim();
        let n = points.len().max(1);
        let extent: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a).max(1e-12)).collect();
        let vol: f64 = extent.iter().product();
        // About two points per bucket.
        let target = math::powf(vol * 2.0 / n as f64, 1.0 / d as f64);
        let counts: Vec<usize> = extent.iter().map(|e| ((e / target) as usize).clamp(1, 1 << 20)).collect();
        let cell: Vec<f64> = extent.iter().zip(&counts).map(|(e, c)| e / *c as f64).collect();
        let total: usize = counts.iter().product();
        let mut idx = GridIndex { points, lo: lo.to_vec(), cell, counts, starts: vec![0; total + 1], items: vec![0; points.len()] };
        let keys: Vec<usize> = (0..points.len()).map(|i| idx.key(points.point(i))).collect();
        for &k in &keys {
            idx.starts[k + 1] += 1;
        }
        for k in 0..total {
            idx.starts[k + 1] += idx.starts[k];
        }
        let mut fill = idx.starts.clone();
        for (i, &k) in keys.iter().enumerate() {
            idx.items[fill[k]] = i;
            fill[k] += 1;
        }
        idx
    }

    /// Indexes `points` over their own bounding box.
    pub fn over(points: &'a PointSet) -> Self {
        match points.bounds() {
            Some((lo, hi)) => GridIndex::new(points, &lo, &hi),
            None => GridIndex::new(points, &vec![0.0; points.dim()], &vec![1.0; points.dim()]),
        }
    }

    /// The `k` nearest other points of every indexed point, nearest first.
    pub fn neighbour_lists(&self, k: usize) -> Vec<Vec<usize>> {
        (0..self.points.len())
            .map(|i| {
                let mut v = self.knn(self.points.point(i), k + 1);
                v.retain(|&j| j != i);
                v.truncate(k);
                v
            })
            .collect()
    }

    fn coord(&self, axis: usize, x: f64) -> usize {
        let c = math::floor((x - self.lo[axis]) / self.cell[axis]);
        if c < 0.0 {
            0
        } else {
            (c as usize).min(self.counts[axis] - 1)
        }
    }

    fn key(&self, p: &[f64]) -> usize {
        let mut k = 0;
        let mut stride = 1;
        for (axis, &x) in p.iter().enumerate() {
            k += self.coord(axis, x) * stride;
            stride *= self.counts[axis];
        }
        k
    }

    /// Visits every bucket whose Chebyshev offset from `centre` is exactly `ring`.
    fn visit_ring(&self, centre: &[usize], ring: usize, f: &mut impl FnMut(usize)) -> bool {
        let d = centre.len();
        let lo: Vec<usize> = (0..d).map(|k| centre[k].saturating_sub(ring)).collect();
        let hi: Vec<usize> = (0..d).map(|k| (centre[k] + ring).min(self.counts[k] - 1)).collect();
        let mut any = false;
        let mut idx = lo.clone();
        loop {
            let on_ring = (0..d).any(|k| centre[k].abs_diff(idx[k]) == ring);
            if on_ring {
                any = true;
                let mut key = 0;
                let mut stride = 1;
                for k in 0..d {
                    key += idx[k] * stride;
                    stride *= self.counts[k];
                }
                for &it in &self.items[self.starts[key]..self.starts[key + 1]] {
                    f(it);
                }
            }
            let mut k = 0;
            while k < d {
                if idx[k] < hi[k] {
                    idx[k] += 1;
                    break;
                }
                idx[k] = lo[k];
                k += 1;
            }
            if k == d {
                break;
            }
        }
        any
    }

    /// Indices of the `k` nearest indexed points to `q`, nearest first
    /// (ties by index).
    pub fn knn(&self, q: &[f64], k: usize) -> Vec<usize> {
        let k = k.min(self.points.len());
        if k == 0 {
            return Vec::new();
        }
        let centre: Vec<usize> = q.iter().enumerate().map(|(a, &x)| self.coord(a, x)).collect();
        let min_cell = self.cell.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut heap: BinaryHeap<Cand> = BinaryHeap::with_capacity(k + 1);
        let mut ring = 0;
        loop {
            let pts = self.points;
            let any = self.visit_ring(&centre, ring, &mut |i| {
                let dsq = math::sq_dist(q, pts.point(i));
                let c = Cand(dsq, i);
                if heap.len() < k {
                    heap.push(c);
                } else if c < *heap.peek().unwrap() {
                    heap.pop();
                    heap.push(c);
                }
            });
            if !any {
                break;
            }
            if heap.len() == k {
                let bound = ring as f64 * min_cell;
                if heap.peek().unwrap().0 <= bound * bound {
                    break;
                }
            }
            ring += 1;
        }
        let mut v = heap.into_vec();
        v.sort();
        v.into_iter().map(|c| c.1).collect()
    }

    /// Calls `f(i, |q - p_i|^2)` for every indexed point within squared radius `r2` of `q`.
    pub fn within(&self, q: &[f64], r2: f64, mut f: impl FnMut(usize, f64)) {
        let d = q.len();
        let r = math::sqrt(r2.max(0.0));
        let lo: Vec<usize> = (0..d).map(|a| self.coord(a, q[a] - r)).collect();
        let hi: Vec<usize> = (0..d).map(|a| self.coord(a, q[a] + r)).collect();
        let mut idx = lo.clone();
        loop {
            let mut key = 0;
            let mut stride = 1;
            for a in 0..d {
                key += idx[a] * stride;
                stride *= self.counts[a];
            }
            for &it in &self.items[self.starts[key]..self.starts[key + 1]] {
                let dsq = math::sq_dist(q, self.points.point(it));
                if dsq <= r2 {
                    f(it, dsq);
                }
            }
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
                break;
            }
        }
    }

    /// Number of buckets a radius query of `r` would scan.
    pub fn buckets_in_radius(&self, q: &[f64], r: f64) -> usize {
        (0..q.len()).map(|a| self.coord(a, q[a] + r) - self.coord(a, q[a] - r) + 1).product()
    }
}
