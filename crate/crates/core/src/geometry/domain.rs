use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// A closed axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidDomain(format!(
                "box corners have dimensions {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        if lo.iter().chain(&hi).any(|c| !c.is_finite()) {
            return Err(Error::InvalidDomain("non-finite box corner".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::InvalidDomain("degenerate box (lo >= hi on some axis)".into()));
        }
        Ok(AxisBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn diameter(&self) -> f64 {
        math::sqrt(self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a) * (b - a)).sum())
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| *a <= *x && *x <= *b)
    }

    /// Volume of the intersection with `other`.
    pub fn overlap_volume(&self, other: &AxisBox) -> f64 {
        let mut v = 1.0;
        for k in 0..self.dim() {
            let w = self.hi[k].min(other.hi[k]) - self.lo[k].max(other.lo[k]);
            if w <= 0.0 {
                return 0.0;
            }
            v *= w;
        }
        v
    }

    /// True when the boxes share a face of positive `(d-1)`-volume.
    pub fn shares_face(&self, other: &AxisBox) -> bool {
        let mut touching_axes = 0;
        for k in 0..self.dim() {
            let w = self.hi[k].min(other.hi[k]) - self.lo[k].max(other.lo[k]);
            if w < 0.0 {
                return false;
            }
            if w == 0.0 {
                touching_axes += 1;
            }
        }
        touching_axes == 1
    }
}

/// A finite union of disjoint dyadic boxes whose interior is connected.
#[derive(Debug, Clone, PartialEq)]
pub struct Polycube {
    boxes: Vec<AxisBox>,
}

/// Largest binary exponent accepted for box coordinates.
const MAX_DYADIC_BITS: i32 = 40;

fn dyadic_bits(x: f64) -> Option<i32> {
    let mut v = x;
    for j in 0..=MAX_DYADIC_BITS {
        if v == math::floor(v) {
            return Some(j);
        }
        v *= 2.0;
    }
    None
}

impl Polycube {
    pub fn new(boxes: Vec<AxisBox>) -> Result<Self> {
        let first = boxes.first().ok_or_else(|| Error::InvalidDomain("no boxes".into()))?;
        let d = first.dim();
        for b in &boxes {
            if b.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: b.dim() });
            }
            for &c in b.lo.iter().chain(&b.hi) {
                if dyadic_bits(c).is_none() {
                    return Err(Error::InvalidDomain(format!("coordinate {c} is not dyadic")));
                }
            }
        }
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if boxes[i].overlap_volume(&boxes[j]) > 0.0 {
                    return Err(Error::InvalidDomain(format!("boxes {i} and {j} overlap")));
                }
            }
        }
        let n = boxes.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && boxes[i].shares_face(&boxes[j]) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidDomain("polycube interior is not connected".into()));
        }
        Ok(Polycube { boxes })
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }
}

/// A bounded connected open set on which points are sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// The open cube `(0, side)^dim`.
    Cube { dim: usize, side: f64 },
    Polycube(Polycube),
}

impl Domain {
    pub fn cube(dim: usize, side: f64) -> Result<Self> {
        if dim == 0 {
            return Err(crate::error::invalid("d", "dimension must be positive"));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(crate::error::invalid("side", "cube side must be positive and finite"));
        }
        Ok(Domain::Cube { dim, side })
    }

    pub fn unit_cube(dim: usize) -> Self {
        Domain::Cube { dim, side: 1.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Cube { dim, .. } => *dim,
            Domain::Polycube(pc) => pc.boxes[0].dim(),
        }
    }

    /// The closed boxes whose union is the closure of the domain.
    pub fn boxes(&self) -> Vec<AxisBox> {
        match self {
            Domain::Cube { dim, side } => vec![AxisBox { lo: vec![0.0; *dim], hi: vec![*side; *dim] }],
            Domain::Polycube(pc) => pc.boxes.clone(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Domain::Cube { dim, side } => math::powf(*side, *dim as f64),
            Domain::Polycube(pc) => pc.boxes.iter().map(AxisBox::volume).sum(),
        }
    }

    /// Largest distance between two points of the closure.
    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Cube { dim, side } => side * math::sqrt(*dim as f64),
            Domain::Polycube(pc) => {
                let d = self.dim();
                let corners: Vec<Vec<f64>> = pc
                    .boxes
                    .iter()
                    .flat_map(|b| {
                        (0..1usize << d).map(move |mask| {
                            (0..d).map(|k| if mask >> k & 1 == 1 { b.hi[k] } else { b.lo[k] }).collect()
                        })
                    })
                    .collect();
                let mut best: f64 = 0.0;
                for a in &corners {
                    for b in &corners {
                        best = best.max(math::sq_dist(a, b));
                    }
                }
                math::sqrt(best)
            }
        }
    }

    pub fn bounding_box(&self) -> AxisBox {
        let boxes = self.boxes();
        let d = self.dim();
        let mut lo = boxes[0].lo.clone();
        let mut hi = boxes[0].hi.clone();
        for b in &boxes[1..] {
            for k in 0..d {
                lo[k] = lo[k].min(b.lo[k]);
                hi[k] = hi[k].max(b.hi[k]);
            }
        }
        AxisBox { lo, hi }
    }

    /// Membership in the closure.
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Domain::Cube { side, .. } => p.iter().all(|&x| (0.0..=*side).contains(&x)),
            Domain::Polycube(pc) => pc.boxes.iter().any(|b| b.contains(p)),
        }
    }
}

/// Smallest `J` such that every box coordinate times `2^J` is an integer.
pub(crate) fn dyadic_resolution(boxes: &[AxisBox]) -> i32 {
    boxes
        .iter()
        .flat_map(|b| b.lo.iter().chain(&b.hi))
        .map(|&c| dyadic_bits(c).unwrap_or(MAX_DYADIC_BITS))
        .max()
        .unwrap_or(0)
}
