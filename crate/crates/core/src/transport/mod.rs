//! Discrete optimal transport between weighted atom sets.

pub mod flow;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Domain, Partition, PointSet};
use crate::math;

pub use flow::min_cost_flow;

/// Finite measure `sum_i m_i delta_{a_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomMeasure {
    pub atoms: PointSet,
    pub masses: Vec<f64>,
}

impl AtomMeasure {
    pub fn new(atoms: PointSet, masses: Vec<f64>) -> Result<Self> {
        if masses.len() != atoms.len() {
            return Err(invalid("masses", "one mass per atom is required"));
        }
        if let Some(i) = masses.iter().position(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::NonFinite { index: i });
        }
        Ok(AtomMeasure { atoms, masses })
    }

    /// Unit mass at every point: the empirical measure of a point set.
    pub fn empirical(points: PointSet) -> Self {
        let masses = vec![1.0; points.len()];
        AtomMeasure { atoms: points, masses }
    }

    pub fn total_mass(&self) -> f64 {
        math::pairwise_sum(&self.masses)
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// A coupling given by its positive entries.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `(source atom, target atom, mass)`.
    pub flows: Vec<(usize, usize, f64)>,
    pub cost: f64,
    /// Factor by which unit costs were multiplied before rounding to integers.
    pub cost_scale: f64,
}

impl TransportPlan {
    fn empty() -> Self {
        TransportPlan { flows: Vec::new(), cost: 0.0, cost_scale: 1.0 }
    }
}

/// Default cost scale; reduced when the largest cost would leave too little
/// headroom for potentials in `i64`.
const COST_SCALE: f64 = 4294967296.0;
const COST_CEILING: f64 = 1099511627776.0;

/// Optimal transport cost `W_p^p(mu, nu)` and an optimal plan.
///
/// Masses must agree to `1e-8` relative; otherwise the cost is `+inf` and the
/// plan is empty. Costs are rounded after scaling (see
/// [`TransportPlan::cost_scale`]); the returned cost is evaluated exactly on
/// the resulting plan.
pub fn wasserstein_pp(mu: &AtomMeasure, nu: &AtomMeasure, p: f64) -> Result<(f64, TransportPlan)> {
    crate::combinatorial::check_exponent(p)?;
    let (a, b) = (mu.total_mass(), nu.total_mass());
    if (a - b).abs() > 1e-8 * a.max(b) {
        return Ok((f64::INFINITY, TransportPlan::empty()));
    }
    if a == 0.0 {
        return Ok((0.0, TransportPlan::empty()));
    }
    if mu.atoms.dim() != nu.atoms.dim() {
        return Err(Error::DimensionMismatch { expected: mu.atoms.dim(), found: nu.atoms.dim() });
    }
    let (n, m) = (mu.atoms.len(), nu.atoms.len());
    let mut unit = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            unit.push(mu.atoms.dist_pow(i, &nu.atoms, j, p));
        }
    }
    let largest = unit.iter().cloned().fold(0.0f64, f64::max);
    let scale = if largest * COST_SCALE > COST_CEILING { COST_CEILING / largest } else { COST_SCALE };
    let cost: Vec<i64> = unit.iter().map(|c| math::round(c * scale) as i64).collect();
    // Rescale the target so both sides carry exactly the same total.
    let demand: Vec<f64> = nu.masses.iter().map(|v| v * a / b).collect();
    let flows = min_cost_flow(&mu.masses, &demand, &cost, None).expect("complete graph with balanced masses");
    let terms: Vec<f64> = flows.iter().map(|&(i, j, f)| f * unit[i * m + j]).collect();
    let total = math::pairwise_sum(&terms);
    Ok((total, TransportPlan { flows, cost: total, cost_scale: scale }))
}

/// Transport cost to the uniform measure on a cube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformTransport {
    pub cost: f64,
    /// Side of the grid cells carrying the discretised uniform measure.
    pub spacing: f64,
}

/// Cell centres of the `k^d` grid on `[0, side]^d`, first axis fastest.
fn grid_centres(dim: usize, side: f64, k: usize) -> PointSet {
    let h = side / k as f64;
    let total = k.pow(dim as u32);
    let mut pts = PointSet::with_capacity(dim, total);
    let mut c = vec![0.0; dim];
    for idx in 0..total {
        let mut r = idx;
        for a in 0..dim {
            c[a] = (r % k) as f64 * h + 0.5 * h;
            r /= k;
        }
        pts.push(&c);
    }
    pts
}

/// `W_p^p` between unit atoms at `points` and the uniform measure of the same
/// mass on a cube domain, discretised as `grid_k^d` equal atoms at cell centres.
pub fn wasserstein_to_uniform(points: &PointSet, domain: &Domain, grid_k: usize, p: f64) -> Result<UniformTransport> {
    let side = match domain {
        Domain::Cube { side, .. } => *side,
        Domain::Polycube(_) => return Err(invalid("domain", "uniform target needs a cube")),
    };
    if grid_k == 0 {
        return Err(invalid("grid_k", "resolution must be positive"));
    }
    if points.is_empty() {
        return Err(invalid("points", "at least one point is required"));
    }
    if points.dim() != domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), found: points.dim() });
    }
    let centres = grid_centres(domain.dim(), side, grid_k);
    let share = points.len() as f64 / centres.len() as f64;
    let target = AtomMeasure { masses: vec![share; centres.len()], atoms: centres };
    let (cost, _) = wasserstein_pp(&AtomMeasure::empirical(points.clone()), &target, p)?;
    Ok(UniformTransport { cost, spacing: side / grid_k as f64 })
}

/// The three terms of the subadditivity estimate for transport to a uniform
/// measure over a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// `W_p^p(mu, alpha lambda)` with `alpha = mu(Omega) / |Omega|`.
    pub lhs: f64,
    /// `sum_k W_p^p` on cell `k` between `mu` restricted to it and
    /// `alpha_k lambda`, `alpha_k = mu(cell) / |cell|`.
    pub sum_local: f64,
    /// `W_p^p(sum_k alpha_k 1_k lambda, alpha lambda)`.
    pub remainder: f64,
    /// Constant `C` for which `lhs <= (1 + eps) sum_local + C / eps^(p-1) remainder`
    /// holds for every pair of measures.
    pub bound_constant: f64,
    /// Smallest `C` that makes the inequality hold here (zero if the
    /// remainder-free part already holds).
    pub measured_constant: f64,
}

/// Splitting constant of `(a + b)^p <= (1 + eps) a^p + C / eps^(p-1) b^p`.
pub fn splitting_constant(p: f64, eps: f64) -> f64 {
    if p == 1.0 {
        return 1.0;
    }
    let t = 1.0 - math::powf(1.0 + eps, -1.0 / (p - 1.0));
    math::powf(eps / t, p - 1.0)
}

/// Computes the terms of the subadditivity estimate for `mu` against the
/// uniform density on the union of the partition's cells. Lebesgue measure is
/// discretised by splitting every cell into `refine^d` subcubes carrying their
/// volume at the centre. Atoms of `mu` outside every cell are ignored.
pub fn subadditivity_decompose(mu: &AtomMeasure, partition: &Partition, p: f64, eps: f64, refine: usize) -> Result<Decomposition> {
    crate::combinatorial::check_exponent(p)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid("epsilon", "must lie in (0, 1]"));
    }
    if refine == 0 {
        return Err(invalid("refine", "must be positive"));
    }
    let d = partition.dim();
    let cells = partition.len();
    let mut owner: Vec<Vec<usize>> = vec![Vec::new(); cells];
    for i in 0..mu.atoms.len() {
        if let Some(k) = partition.locate(mu.atoms.point(i)) {
            owner[k].push(i);
        }
    }
    // Sub-cell atoms per cell.
    let mut atoms: Vec<PointSet> = Vec::with_capacity(cells);
    let mut vols: Vec<f64> = Vec::with_capacity(cells);
    for cell in partition.cells() {
        let mut pts = grid_centres(d, cell.side, refine);
        let shifted: Vec<f64> = pts.coords().chunks(d).flat_map(|c| c.iter().zip(cell.lo).map(|(a, b)| a + b)).collect();
        pts = PointSet::from_flat(d, shifted)?;
        atoms.push(pts);
        vols.push(cell.volume() / refine.pow(d as u32) as f64);
    }
    let cell_mass: Vec<f64> = owner.iter().map(|o| math::pairwise_sum(&o.iter().map(|&i| mu.masses[i]).collect::<Vec<_>>())).collect();
    let total_mass = math::pairwise_sum(&cell_mass);
    let total_vol = math::pairwise_sum(&partition.cells().map(|c| c.volume()).collect::<Vec<_>>());
    let alpha = total_mass / total_vol;

    let mut local = Vec::with_capacity(cells);
    for k in 0..cells {
        if owner[k].is_empty() {
            local.push(0.0);
            continue;
        }
        let here = mu.atoms.subset(&owner[k]);
        let masses = owner[k].iter().map(|&i| mu.masses[i]).collect();
        let alpha_k = cell_mass[k] / partition.cell(k).volume();
        let target = AtomMeasure { masses: vec![alpha_k * vols[k]; atoms[k].len()], atoms: atoms[k].clone() };
        local.push(wasserstein_pp(&AtomMeasure { atoms: here, masses }, &target, p)?.0);
    }
    let sum_local = math::pairwise_sum(&local);

    let mut all = PointSet::with_capacity(d, atoms.iter().map(|a| a.len()).sum());
    let mut even = Vec::new();
    let mut uneven = Vec::new();
    for k in 0..cells {
        all.extend(&atoms[k]);
        let alpha_k = cell_mass[k] / partition.cell(k).volume();
        even.extend(core::iter::repeat_n(alpha * vols[k], atoms[k].len()));
        uneven.extend(core::iter::repeat_n(alpha_k * vols[k], atoms[k].len()));
    }
    let inside: Vec<usize> = owner.iter().flatten().copied().collect();
    let mu_inside = AtomMeasure { atoms: mu.atoms.subset(&inside), masses: inside.iter().map(|&i| mu.masses[i]).collect() };
    let lhs = wasserstein_pp(&mu_inside, &AtomMeasure { atoms: all.clone(), masses: even.clone() }, p)?.0;
    let remainder = wasserstein_pp(&AtomMeasure { atoms: all.clone(), masses: uneven }, &AtomMeasure { atoms: all, masses: even }, p)?.0;
    let excess = lhs - (1.0 + eps) * sum_local;
    let measured_constant = if excess <= 0.0 {
        0.0
    } else if remainder > 0.0 {
        excess * math::powf(eps, p - 1.0) / remainder
    } else {
        f64::INFINITY
    };
    Ok(Decomposition { lhs, sum_local, remainder, bound_constant: splitting_constant(p, eps), measured_constant })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(d: usize, v: &[f64]) -> PointSet {
        PointSet::from_flat(d, v.to_vec()).unwrap()
    }

    #[test]
    fn mass_two_atom_splits() {
        let mu = AtomMeasure::new(pts(1, &[0.0]), vec![2.0]).unwrap();
        let nu = AtomMeasure::new(pts(1, &[1.0, 2.0]), vec![1.0, 1.0]).unwrap();
        let (c, plan) = wasserstein_pp(&mu, &nu, 1.0).unwrap();
        assert!((c - 3.0).abs() < 1e-12);
        assert_eq!(plan.flows.len(), 2);
    }

    #[test]
    fn unequal_mass_is_infinite() {
        let mu = AtomMeasure::new(pts(1, &[0.0]), vec![2.0]).unwrap();
        let nu = AtomMeasure::new(pts(1, &[1.0]), vec![1.0]).unwrap();
        let (c, plan) = wasserstein_pp(&mu, &nu, 1.0).unwrap();
        assert!(c.is_infinite() && plan.flows.is_empty());
    }

    #[test]
    fn splitting_constant_holds_on_a_grid() {
        for &p in &[1.0, 1.5, 2.0, 3.0] {
            for &eps in &[0.1, 0.5, 1.0] {
                let c = splitting_constant(p, eps) / math::powf(eps, p - 1.0);
                for ia in 0..=20 {
                    let a = ia as f64 / 10.0;
                    let b = 2.0 - a;
                    let lhs = math::powf(a + b, p);
                    let rhs = (1.0 + eps) * math::powf(a, p) + c * math::powf(b, p);
                    assert!(lhs <= rhs * (1.0 + 1e-12), "p={p} eps={eps} a={a}");
                }
            }
        }
    }
}
