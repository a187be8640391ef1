//! Point processes and densities.
//!
//! Every sampler takes an explicit random stream. [`SeedStream`] derives the
//! stream of each trial from a master seed, so results do not depend on how
//! trials are scheduled.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{invalid, Error, Result};
use crate::geometry::{AxisBox, Domain, PointSet};

/// Random stream used by every sampler.
pub type StreamRng = ChaCha8Rng;

/// Independent random streams indexed by trial, derived from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    master: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeedStream {
    pub fn new(master: u64) -> Self {
        SeedStream { master }
    }

    pub fn master_seed(&self) -> u64 {
        self.master
    }

    /// The stream of trial `index`: the ChaCha8 generator keyed by the
    /// master seed, on stream number `index`.
    pub fn rng(&self, index: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(index);
        rng
    }

    /// An independent family of streams labelled `label`, for experiments
    /// that need several families under one master seed.
    pub fn family(&self, label: u64) -> SeedStream {
        SeedStream { master: splitmix64(self.master ^ splitmix64(label)) }
    }
}

/// Probability density on a cube given by node values on a regular grid and
/// multilinear interpolation between them.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderDensity {
    dim: usize,
    side: f64,
    /// Nodes per axis.
    k: usize,
    /// Node values, first axis fastest.
    values: Vec<f64>,
    rho0: f64,
    alpha: f64,
    max_value: f64,
}

/// Relative tolerance on the total mass of a tabulated density.
pub const MASS_TOLERANCE: f64 = 1e-6;

impl HolderDensity {
    /// Density on `(0, side)^dim` with node `(i_1, .., i_d)` at
    /// `side * i / (k - 1)`. Requires unit mass within [`MASS_TOLERANCE`]
    /// and `rho0 <= value * side^dim <= 1 / rho0` at every node.
    pub fn new(dim: usize, side: f64, k: usize, values: Vec<f64>, rho0: f64, alpha: f64) -> Result<Self> {
        if dim == 0 || !(side.is_finite() && side > 0.0) {
            return Err(Error::InvalidDensity(format!("bad cube: dim {dim}, side {side}")));
        }
        if k < 2 {
            return Err(Error::InvalidDensity("need at least 2 nodes per axis".into()));
        }
        let nodes = k.checked_pow(dim as u32).ok_or_else(|| Error::InvalidDensity("grid too large".into()))?;
        if values.len() != nodes {
            return Err(Error::InvalidDensity(format!("expected {nodes} node values, found {}", values.len())));
        }
        if !(rho0 > 0.0 && rho0 <= 1.0) {
            return Err(Error::InvalidDensity(format!("lower bound {rho0} not in (0, 1]")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidDensity(format!("Holder exponent {alpha} not in (0, 1]")));
        }
        let vol = crate::math::powf(side, dim as f64);
        for (i, &v) in values.iter().enumerate() {
            let scaled = v * vol;
            if !(scaled >= rho0 * (1.0 - 1e-12) && scaled <= (1.0 + 1e-12) / rho0) {
                return Err(Error::InvalidDensity(format!("node {i} has value {v}, outside [rho0, 1/rho0] / volume")));
            }
        }
        let max_value = values.iter().cloned().fold(0.0, f64::max);
        let density = HolderDensity { dim, side, k, values, rho0, alpha, max_value };
        let mass = density.mass();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDensity(format!("total mass {mass} is not 1")));
        }
        Ok(density)
    }

    /// Tabulates `f` on a `k`-node grid, rescales to unit mass and takes the
    /// tightest `rho0` the table allows.
    pub fn from_fn(dim: usize, side: f64, k: usize, alpha: f64, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        if k < 2 || dim == 0 {
            return Err(Error::InvalidDensity("need at least 2 nodes per axis".into()));
        }
        let nodes = k.pow(dim as u32);
        let mut point = vec![0.0; dim];
        let mut values = Vec::with_capacity(nodes);
        for idx in 0..nodes {
            let mut r = idx;
            for c in point.iter_mut() {
                *c = side * (r % k) as f64 / (k - 1) as f64;
                r /= k;
            }
            values.push(f(&point));
        }
        let raw = HolderDensity { dim, side, k, values, rho0: 1.0, alpha, max_value: 0.0 };
        let mass = raw.mass();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidDensity(format!("total mass {mass}")));
        }
        let vol = crate::math::powf(side, dim as f64);
        let values: Vec<f64> = raw.values.iter().map(|v| v / mass).collect();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min) * vol;
        let hi = values.iter().cloned().fold(0.0, f64::max) * vol;
        let rho0 = lo.min(1.0 / hi).min(1.0);
        HolderDensity::new(dim, side, k, values, rho0, alpha)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Exact integral of the interpolant (trapezoid rule on the nodes).
    pub fn mass(&self) -> f64 {
        let k = self.k;
        let mut total = 0.0;
        for (idx, &v) in self.values.iter().enumerate() {
            let mut w = 1.0;
            let mut r = idx;
            for _ in 0..self.dim {
                let i = r % k;
                if i == 0 || i == k - 1 {
                    w *= 0.5;
                }
                r /= k;
            }
            total += w * v;
        }
        let cell = self.side / (k - 1) as f64;
        total * crate::math::powf(cell, self.dim as f64)
    }

    /// Interpolated density at `p`; zero outside the cube.
    pub fn value(&self, p: &[f64]) -> f64 {
        if p.len() != self.dim || p.iter().any(|&c| !(0.0..=self.side).contains(&c)) {
            return 0.0;
        }
        let k = self.k;
        let mut base = 0;
        let mut stride = 1;
        let mut frac = vec![0.0; self.dim];
        let mut strides = vec![0; self.dim];
        for (a, &c) in p.iter().enumerate() {
            let t = c / self.side * (k - 1) as f64;
            let i = (crate::math::floor(t) as usize).min(k - 2);
            frac[a] = t - i as f64;
            base += i * stride;
            strides[a] = stride;
            stride *= k;
        }
        let mut out = 0.0;
        for corner in 0..1usize << self.dim {
            let mut w = 1.0;
            let mut idx = base;
            for a in 0..self.dim {
                if corner >> a & 1 == 1 {
                    w *= frac[a];
                    idx += strides[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            out += w * self.values[idx];
        }
        out
    }

    /// Mass of the interpolant on an axis box, by Gauss-Legendre quadrature
    /// on every grid cell the box meets.
    pub fn mass_in(&self, lo: &[f64], hi: &[f64]) -> f64 {
        // Three-point Gauss-Legendre is exact on multilinear pieces.
        const NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
        const WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        let h = self.side / (self.k - 1) as f64;
        let mut axes: Vec<Vec<(f64, f64)>> = Vec::with_capacity(self.dim);
        for a in 0..self.dim {
            let (l, u) = (lo[a].max(0.0), hi[a].min(self.side));
            let mut pts = Vec::new();
            if u > l {
                let first = crate::math::floor(l / h) as usize;
                let mut c = first;
                loop {
                    let (cl, cu) = ((c as f64 * h).max(l), ((c + 1) as f64 * h).min(u));
                    if cl >= u {
                        break;
                    }
                    if cu > cl {
                        let (mid, half) = (0.5 * (cl + cu), 0.5 * (cu - cl));
                        for q in 0..3 {
                            pts.push((mid + half * NODES[q], half * WEIGHTS[q]));
                        }
                    }
                    c += 1;
                }
            }
            axes.push(pts);
        }
        if axes.iter().any(Vec::is_empty) {
            return 0.0;
        }
        let mut idx = vec![0usize; self.dim];
        let mut point = vec![0.0; self.dim];
        let mut total = 0.0;
        loop {
            let mut w = 1.0;
            for a in 0..self.dim {
                point[a] = axes[a][idx[a]].0;
                w *= axes[a][idx[a]].1;
            }
            total += w * self.value(&point);
            let mut a = 0;
            while a < self.dim {
                idx[a] += 1;
                if idx[a] < axes[a].len() {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if a == self.dim {
                return total;
            }
        }
    }
}

/// Law of the sampled points.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Uniform(Domain),
    Holder(HolderDensity),
}

impl Density {
    pub fn uniform_cube(dim: usize) -> Self {
        Density::Uniform(Domain::unit_cube(dim))
    }

    pub fn dim(&self) -> usize {
        match self {
            Density::Uniform(d) => d.dim(),
            Density::Holder(h) => h.dim,
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            Density::Uniform(d) => d.clone(),
            Density::Holder(h) => Domain::Cube { dim: h.dim, side: h.side },
        }
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        match self {
            Density::Uniform(d) if d.contains(p) => 1.0 / d.volume(),
            Density::Uniform(_) => 0.0,
            Density::Holder(h) => h.value(p),
        }
    }

    /// Probability that one uniform proposal is accepted by the rejection
    /// sampler; 1 for uniform densities.
    pub fn acceptance_probability(&self) -> f64 {
        match self {
            Density::Uniform(_) => 1.0,
            Density::Holder(h) => 1.0 / (h.max_value * crate::math::powf(h.side, h.dim as f64)),
        }
    }
}

fn uniform_in_box<R: Rng + ?Sized>(b: &AxisBox, rng: &mut R, out: &mut [f64]) {
    for (a, c) in out.iter_mut().enumerate() {
        *c = b.lo[a] + (b.hi[a] - b.lo[a]) * rng.random::<f64>();
    }
}

/// `n` independent points with law `density`, and the number of proposals
/// the rejection sampler used (equal to `n` for uniform densities).
pub fn iid_sample_counted<R: Rng + ?Sized>(density: &Density, n: usize, rng: &mut R) -> (PointSet, u64) {
    let d = density.dim();
    let mut out = PointSet::with_capacity(d, n);
    let mut buf = vec![0.0; d];
    match density {
        Density::Uniform(domain) => {
            let boxes = domain.boxes();
            let cumulative: Vec<f64> = boxes
                .iter()
                .scan(0.0, |acc, b| {
                    *acc += b.volume();
                    Some(*acc)
                })
                .collect();
            let total = *cumulative.last().expect("domain has a box");
            for _ in 0..n {
                let b = if boxes.len() == 1 {
                    0
                } else {
                    let u = rng.random::<f64>() * total;
                    cumulative.iter().position(|&c| u < c).unwrap_or(boxes.len() - 1)
                };
                uniform_in_box(&boxes[b], rng, &mut buf);
                out.push(&buf);
            }
            (out, n as u64)
        }
        Density::Holder(h) => {
            let cube = AxisBox { lo: vec![0.0; d], hi: vec![h.side; d] };
            let mut proposals = 0;
            while out.len() < n {
                proposals += 1;
                uniform_in_box(&cube, rng, &mut buf);
                if rng.random::<f64>() * h.max_value < h.value(&buf) {
                    out.push(&buf);
                }
            }
            (out, proposals)
        }
    }
}

/// `n` independent points with law `density`: direct sampling for uniform
/// laws, rejection from the uniform law otherwise.
pub fn iid_sample<R: Rng + ?Sized>(density: &Density, n: usize, rng: &mut R) -> PointSet {
    iid_sample_counted(density, n, rng).0
}

/// Poisson point process with intensity `intensity * density`: a
/// Poisson(`intensity`) count of independent points.
pub fn poisson_process<R: Rng + ?Sized>(density: &Density, intensity: f64, rng: &mut R) -> Result<PointSet> {
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(invalid("intensity", "must be positive and finite"));
    }
    let count = Poisson::new(intensity).map_err(|e| invalid("intensity", format!("{e}")))?.sample(rng) as usize;
    Ok(iid_sample(density, count, rng))
}

/// Splits `points` by independent coin flips: each point goes to `removed`
/// with probability `eta`. Both outputs keep the input order.
pub fn thin<R: Rng + ?Sized>(points: &PointSet, eta: f64, rng: &mut R) -> Result<(PointSet, PointSet)> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid("eta", "must lie in [0, 1]"));
    }
    let d = points.dim();
    let mut kept = PointSet::new(d);
    let mut removed = PointSet::new(d);
    for p in points.iter() {
        if rng.random_bool(eta) {
            removed.push(p);
        } else {
            kept.push(p);
        }
    }
    Ok((kept, removed))
}
