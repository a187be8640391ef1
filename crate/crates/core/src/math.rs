//! Scalar helpers shared by every module.
//!
//! All transcendental functions route through `libm` so that results do not
//! depend on the platform's libm or on whether `std` is linked.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `|a - b|^2`.
#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (u, v) in a.iter().zip(b) {
        let t = u - v;
        s += t * t;
    }
    s
}

/// `r^p` given `r^2`. Zero maps to zero for every `p`.
#[inline]
pub fn pow_from_sq(sq: f64, p: f64) -> f64 {
    if sq <= 0.0 {
        0.0
    } else if p == 1.0 {
        sqrt(sq)
    } else if p == 2.0 {
        sq
    } else {
        exp(0.5 * p * ln(sq))
    }
}

/// `|a - b|^p`.
#[inline]
pub fn dist_pow(a: &[f64], b: &[f64], p: f64) -> f64 {
    pow_from_sq(sq_dist(a, b), p)
}

/// Pairwise (cascade) summation; error grows like `O(log n)` rather than `O(n)`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        s
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}
