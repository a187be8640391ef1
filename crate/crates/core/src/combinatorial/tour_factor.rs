use alloc::vec;
use alloc::vec::Vec;

use super::solution::{BipartiteInstance, Solution};
use crate::error::{invalid, Result};

fn check_permutation(name: &'static str, v: &[usize], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(invalid(name, "length differs from the side size"));
    }
    let mut seen = vec![false; n];
    for &i in v {
        if i >= n || seen[i] {
            return Err(invalid(name, "not a permutation"));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Edges `{(sigma(i), tau(i)), (sigma(i), tau(i+1))}`, indices mod `n`.
pub fn tour_edges(sigma: &[usize], tau: &[usize]) -> Vec<(usize, usize)> {
    let n = sigma.len();
    let mut e = Vec::with_capacity(2 * n);
    for i in 0..n {
        e.push((sigma[i], tau[i]));
        e.push((sigma[i], tau[(i + 1) % n]));
    }
    e.sort_unstable();
    e.dedup();
    e
}

/// Edges `{(sigma(i), rho(sigma(i + l))) : i < n, l < kappa}` with indices mod `n`.
///
/// `sigma` orders side 1 (typically a short tour) and `rho` maps side-1 vertex
/// `i` to its side-2 partner (typically an optimal matching). The result is
/// `kappa`-regular, and connected for `kappa >= 2`.
pub fn tour_factor_edges(sigma: &[usize], rho: &[usize], kappa: usize) -> Result<Vec<(usize, usize)>> {
    let n = sigma.len();
    check_permutation("sigma", sigma, n)?;
    check_permutation("rho", rho, n)?;
    if kappa == 0 || kappa > n {
        return Err(invalid("kappa", "degree must lie in 1..=n"));
    }
    let mut e = Vec::with_capacity(kappa * n);
    for i in 0..n {
        for l in 0..kappa {
            e.push((sigma[i], rho[sigma[(i + l) % n]]));
        }
    }
    e.sort_unstable();
    Ok(e)
}

/// [`tour_factor_edges`] priced on a square instance.
pub fn tour_factor_construct(inst: &BipartiteInstance, sigma: &[usize], rho: &[usize], kappa: usize) -> Result<Solution> {
    if inst.x.len() != inst.y.len() || sigma.len() != inst.x.len() {
        return Err(invalid("instance", "construction needs equal side sizes"));
    }
    Solution::priced(inst, tour_factor_edges(sigma, rho, kappa)?)
}
