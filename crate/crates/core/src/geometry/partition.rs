//! Partitions of a domain into cubes: regular grids and Whitney-type
//! decompositions with a layer of boundary cells of diameter comparable to `delta`.

use alloc::vec;
use alloc::vec::Vec;

use super::domain::{dyadic_resolution, AxisBox, Domain};
use crate::error::{invalid, Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellTag {
    Grid,
    Whitney,
    Boundary,
}

/// Read-only view of one cubic cell.
#[derive(Debug, Clone, Copy)]
pub struct Cell<'a> {
    pub lo: &'a [f64],
    pub side: f64,
    pub tag: CellTag,
}

impl Cell<'_> {
    pub fn diameter(&self) -> f64 {
        self.side * math::sqrt(self.lo.len() as f64)
    }

    pub fn volume(&self) -> f64 {
        math::powf(self.side, self.lo.len() as f64)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().map(|a| a + 0.5 * self.side).collect()
    }

    pub fn to_box(&self) -> AxisBox {
        AxisBox { lo: self.lo.to_vec(), hi: self.lo.iter().map(|a| a + self.side).collect() }
    }

    /// Half-open membership `lo <= p < lo + side`.
    pub fn contains_half_open(&self, p: &[f64]) -> bool {
        p.iter().zip(self.lo).all(|(x, a)| *a <= *x && *x < *a + self.side)
    }
}

/// Measured constants of a Whitney-type partition.
#[derive(Debug, Clone, PartialEq)]
pub struct WhitneyConstants {
    pub delta: f64,
    pub whitney_cells: usize,
    pub boundary_cells: usize,
    /// Range of `dist(Q, complement) / diam(Q)` over interior cubes.
    pub dist_over_diam: (f64, f64),
    /// Range of `diam(Q) / delta` over boundary cells.
    pub boundary_diam_over_delta: (f64, f64),
    /// Upper bound of `sup_{x in Q} dist(x, complement) / delta` over boundary cells.
    pub boundary_reach_over_delta: f64,
    /// `#boundary cells * delta^(d-1)`.
    pub boundary_count_constant: f64,
    /// `volume / diam^d`, identical for every cube.
    pub volume_over_diam_pow: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Layout {
    Grid { per_axis: usize, cell_side: f64 },
    Whitney(WhitneyConstants),
}

/// A finite family of disjoint cubes covering a domain up to a null set.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    dim: usize,
    lo: Vec<f64>,
    side: Vec<f64>,
    tag: Vec<CellTag>,
    layout: Layout,
}

impl Partition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.side.len()
    }

    pub fn is_empty(&self) -> bool {
        self.side.is_empty()
    }

    pub fn cell(&self, k: usize) -> Cell<'_> {
        Cell { lo: &self.lo[k * self.dim..(k + 1) * self.dim], side: self.side[k], tag: self.tag[k] }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell<'_>> + '_ {
        (0..self.len()).map(move |k| self.cell(k))
    }

    pub fn whitney_constants(&self) -> Option<&WhitneyConstants> {
        match &self.layout {
            Layout::Whitney(c) => Some(c),
            Layout::Grid { .. } => None,
        }
    }

    /// Grid resolution `m` for grid partitions.
    pub fn grid_resolution(&self) -> Option<usize> {
        match self.layout {
            Layout::Grid { per_axis, .. } => Some(per_axis),
            Layout::Whitney(_) => None,
        }
    }

    /// Index of the cell containing `p`. Grid cells are half-open except on the
    /// top faces of the domain, so every point of the closed cube has one owner.
    pub fn locate(&self, p: &[f64]) -> Option<usize> {
        match self.layout {
            Layout::Grid { per_axis, cell_side } => {
                let mut k = 0usize;
                let mut stride = 1usize;
                for &x in p {
                    if !(x >= 0.0 && x <= cell_side * per_axis as f64) {
                        return None;
                    }
                    let i = (math::floor(x / cell_side) as usize).min(per_axis - 1);
                    k += i * stride;
                    stride *= per_axis;
                }
                Some(k)
            }
            Layout::Whitney(_) => (0..self.len()).find(|&k| self.cell(k).contains_half_open(p)),
        }
    }
}

/// Splits the cube `(0, L)^d` into `m^d` congruent subcubes.
///
/// Cell `k` has multi-index `(i_1, ..., i_d)` with `k = sum_j i_j m^(j-1)`.
pub fn grid_partition(domain: &Domain, m: usize) -> Result<Partition> {
    let (dim, side) = match domain {
        Domain::Cube { dim, side } => (*dim, *side),
        Domain::Polycube(_) => return Err(invalid("domain", "grid partitions need a cube domain")),
    };
    if m == 0 {
        return Err(invalid("m", "grid resolution must be positive"));
    }
    let count = m.checked_pow(dim as u32).ok_or_else(|| invalid("m", "too many cells"))?;
    let h = side / m as f64;
    let mut lo = Vec::with_capacity(count * dim);
    for k in 0..count {
        let mut r = k;
        for _ in 0..dim {
            lo.push((r % m) as f64 * h);
            r /= m;
        }
    }
    Ok(Partition {
        dim,
        lo,
        side: vec![h; count],
        tag: vec![CellTag::Grid; count],
        layout: Layout::Grid { per_axis: m, cell_side: h },
    })
}

/// Integer geometry of the domain complement at a base dyadic level.
struct Complement {
    dim: usize,
    base_level: i32,
    bbox_lo: Vec<i64>,
    bbox_hi: Vec<i64>,
    /// Flat `lo, hi` pairs of the bounded complement boxes inside the bounding box.
    holes: Vec<i64>,
}

impl Complement {
    fn new(boxes: &[AxisBox], base_level: i32) -> Self {
        let dim = boxes[0].dim();
        let scale = math::powf(2.0, base_level as f64);
        let to_int = |c: f64| math::round(c * scale) as i64;
        let mut axes: Vec<Vec<i64>> = vec![Vec::new(); dim];
        for b in boxes {
            for k in 0..dim {
                axes[k].push(to_int(b.lo[k]));
                axes[k].push(to_int(b.hi[k]));
            }
        }
        for a in &mut axes {
            a.sort_unstable();
            a.dedup();
        }
        let int_boxes: Vec<(Vec<i64>, Vec<i64>)> = boxes
            .iter()
            .map(|b| (b.lo.iter().map(|&c| to_int(c)).collect(), b.hi.iter().map(|&c| to_int(c)).collect()))
            .collect();
        let bbox_lo: Vec<i64> = axes.iter().map(|a| a[0]).collect();
        let bbox_hi: Vec<i64> = axes.iter().map(|a| *a.last().unwrap()).collect();
        let counts: Vec<usize> = axes.iter().map(|a| a.len() - 1).collect();
        let total: usize = counts.iter().product();
        let mut holes = Vec::new();
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            // Doubled centre avoids halves.
            let centre2: Vec<i64> = (0..dim).map(|k| axes[k][idx[k]] + axes[k][idx[k] + 1]).collect();
            let covered = int_boxes.iter().any(|(lo, hi)| (0..dim).all(|k| 2 * lo[k] < centre2[k] && centre2[k] < 2 * hi[k]));
            if !covered {
                for k in 0..dim {
                    holes.push(axes[k][idx[k]]);
                }
                for k in 0..dim {
                    holes.push(axes[k][idx[k] + 1]);
                }
            }
            for k in 0..dim {
                idx[k] += 1;
                if idx[k] < counts[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Complement { dim, base_level, bbox_lo, bbox_hi, holes }
    }

    /// Squared distance from the cube `[a, a+1]` (units of `2^-level`) to the complement,
    /// in the same units.
    fn dist_sq(&self, level: i32, a: &[i64]) -> i128 {
        let shift = (level - self.base_level) as u32;
        let mut best = i128::MAX;
        for k in 0..self.dim {
            let lo_gap = a[k] - (self.bbox_lo[k] << shift);
            let hi_gap = (self.bbox_hi[k] << shift) - (a[k] + 1);
            let g = lo_gap.min(hi_gap) as i128;
            best = best.min(g * g);
        }
        let stride = 2 * self.dim;
        for h in self.holes.chunks_exact(stride) {
            let mut s: i128 = 0;
            for k in 0..self.dim {
                let lo = h[k] << shift;
                let hi = h[self.dim + k] << shift;
                let gap = (lo - (a[k] + 1)).max(a[k] - hi).max(0) as i128;
                s += gap * gap;
            }
            best = best.min(s);
        }
        best
    }
}

/// Largest exponent `e` with every coordinate a multiple of `2^e`.
fn coarsest_level(boxes: &[AxisBox]) -> i32 {
    let res = dyadic_resolution(boxes);
    let scale = math::powf(2.0, res as f64);
    let mut min_tz = i32::MAX;
    for b in boxes {
        for &c in b.lo.iter().chain(&b.hi) {
            let v = math::round(c * scale) as i64;
            if v != 0 {
                min_tz = min_tz.min(v.trailing_zeros() as i32);
            }
        }
    }
    // side = 2^(min_tz - res), level = -(log2 side)
    res - min_tz
}

/// Whitney-type decomposition of a dyadic domain.
///
/// Dyadic cubes are refined from the coarsest aligned grid. A cube `Q` is kept
/// as an interior cell once `diam(Q) <= dist(Q, complement)`; refinement stops
/// before cubes drop below diameter `delta`, and cubes that are still too close
/// to the boundary at that scale become boundary cells with
/// `delta <= diam < 2 delta`.
pub fn whitney_partition(domain: &Domain, delta: f64) -> Result<Partition> {
    let dim = domain.dim();
    if !(delta.is_finite() && delta > 0.0) {
        return Err(invalid("delta", "must be positive and finite"));
    }
    if delta >= domain.diameter() {
        return Err(invalid("delta", "must be smaller than the domain diameter"));
    }
    let boxes = domain.boxes();
    for b in &boxes {
        for &c in b.lo.iter().chain(&b.hi) {
            let mut v = c;
            let mut ok = false;
            for _ in 0..=40 {
                if v == math::floor(v) {
                    ok = true;
                    break;
                }
                v *= 2.0;
            }
            if !ok {
                return Err(Error::InvalidDomain("whitney partition needs dyadic box coordinates".into()));
            }
        }
    }
    let base = coarsest_level(&boxes);
    let comp = Complement::new(&boxes, base);
    let sqrt_d = math::sqrt(dim as f64);

    let mut out_lo = Vec::new();
    let mut out_side = Vec::new();
    let mut out_tag = Vec::new();
    let mut dist_ratio = (f64::INFINITY, 0.0f64);
    let mut bdiam_ratio = (f64::INFINITY, 0.0f64);
    let mut reach: f64 = 0.0;

    // Seed with base-level cubes inside the domain.
    let mut stack: Vec<(i32, Vec<i64>)> = Vec::new();
    let base_scale = math::powf(2.0, base as f64);
    for b in &boxes {
        let lo: Vec<i64> = b.lo.iter().map(|&c| math::round(c * base_scale) as i64).collect();
        let hi: Vec<i64> = b.hi.iter().map(|&c| math::round(c * base_scale) as i64).collect();
        let mut idx = lo.clone();
        loop {
            stack.push((base, idx.clone()));
            let mut k = 0;
            loop {
                if k == dim {
                    break;
                }
                idx[k] += 1;
                if idx[k] < hi[k] {
                    break;
                }
                idx[k] = lo[k];
                k += 1;
            }
            if k == dim {
                break;
            }
        }
    }

    let mut children = Vec::new();
    while let Some((level, a)) = stack.pop() {
        if level - base > 40 {
            return Err(invalid("delta", "refinement too deep"));
        }
        let side = math::powf(2.0, -level as f64);
        let diam = side * sqrt_d;
        let dist_sq = comp.dist_sq(level, &a);
        let accepted = dist_sq >= dim as i128;
        let tag = if accepted && diam >= delta {
            Some(CellTag::Whitney)
        } else if diam < 2.0 * delta {
            Some(CellTag::Boundary)
        } else {
            None
        };
        match tag {
            Some(t) => {
                let dist = math::sqrt(dist_sq as f64) * side;
                match t {
                    CellTag::Whitney => {
                        dist_ratio.0 = dist_ratio.0.min(dist / diam);
                        dist_ratio.1 = dist_ratio.1.max(dist / diam);
                    }
                    _ => {
                        bdiam_ratio.0 = bdiam_ratio.0.min(diam / delta);
                        bdiam_ratio.1 = bdiam_ratio.1.max(diam / delta);
                        reach = reach.max((dist + diam) / delta);
                    }
                }
                out_lo.extend(a.iter().map(|&i| i as f64 * side));
                out_side.push(side);
                out_tag.push(t);
            }
            None => {
                children.clear();
                for mask in 0..1usize << dim {
                    let c: Vec<i64> = (0..dim).map(|k| 2 * a[k] + ((mask >> k) & 1) as i64).collect();
                    children.push(c);
                }
                for c in children.drain(..) {
                    stack.push((level + 1, c));
                }
            }
        }
    }

    let whitney_cells = out_tag.iter().filter(|t| **t == CellTag::Whitney).count();
    let boundary_cells = out_tag.len() - whitney_cells;
    let constants = WhitneyConstants {
        delta,
        whitney_cells,
        boundary_cells,
        dist_over_diam: dist_ratio,
        boundary_diam_over_delta: bdiam_ratio,
        boundary_reach_over_delta: reach,
        boundary_count_constant: boundary_cells as f64 * math::powf(delta, dim as f64 - 1.0),
        volume_over_diam_pow: math::powf(dim as f64, -(dim as f64) / 2.0),
    };
    Ok(Partition { dim, lo: out_lo, side: out_side, tag: out_tag, layout: Layout::Whitney(constants) })
}

/// `sum_k diam(cell_k)^alpha`, pairwise summed.
pub fn partition_sum(partition: &Partition, alpha: f64) -> f64 {
    let terms: Vec<f64> = partition.cells().map(|c| math::powf(c.diameter(), alpha)).collect();
    math::pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::domain::Polycube;

    #[test]
    fn grid_cells_tile_the_cube() {
        let dom = Domain::cube(3, 4.0).unwrap();
        let part = grid_partition(&dom, 2).unwrap();
        assert_eq!(part.len(), 8);
        assert_eq!(part.cells().map(|c| c.volume()).sum::<f64>(), 64.0);
        assert_eq!(part.locate(&[3.0, 0.5, 2.0]), Some(1 + 4));
        assert_eq!(part.locate(&[4.0, 4.0, 4.0]), Some(7));
        assert_eq!(part.locate(&[4.5, 0.0, 0.0]), None);
    }

    #[test]
    fn coarse_delta_gives_only_boundary_cells() {
        let dom = Domain::unit_cube(3);
        let part = whitney_partition(&dom, 0.49).unwrap();
        assert_eq!(part.len(), 8);
        assert!(part.cells().all(|c| c.tag == CellTag::Boundary));
    }

    #[test]
    fn whitney_volumes_sum_to_domain_volume() {
        let pc = Polycube::new(vec![
            AxisBox::new(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap(),
            AxisBox::new(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap(),
        ])
        .unwrap();
        let dom = Domain::Polycube(pc);
        let part = whitney_partition(&dom, 1.0 / 64.0).unwrap();
        assert_eq!(part.cells().map(|c| c.volume()).sum::<f64>(), 3.0);
        let k = part.whitney_constants().unwrap();
        assert!(k.dist_over_diam.0 >= 1.0 && k.dist_over_diam.1 <= 4.0, "{k:?}");
    }
}
