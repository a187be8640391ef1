//! Hilbert-curve ordering in any dimension (Skilling's transpose algorithm).

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::PointSet;

/// Hilbert index of integer coordinates with `bits` bits each.
fn hilbert_key(coords: &mut [u32], bits: u32) -> u128 {
    let n = coords.len();
    let m = 1u32 << (bits - 1);
    let mut q = m;
    while q > 1 {
        let p = q - 1;
        for i in 0..n {
            if coords[i] & q != 0 {
                coords[0] ^= p;
            } else {
                let t = (coords[0] ^ coords[i]) & p;
                coords[0] ^= t;
                coords[i] ^= t;
            }
        }
        q >>= 1;
    }
    for i in 1..n {
        coords[i] ^= coords[i - 1];
    }
    let mut t = 0;
    let mut q = m;
    while q > 1 {
        if coords[n - 1] & q != 0 {
            t ^= q - 1;
        }
        q >>= 1;
    }
    for c in coords.iter_mut() {
        *c ^= t;
    }
    let mut key: u128 = 0;
    for b in (0..bits).rev() {
        for c in coords.iter() {
            key = (key << 1) | ((c >> b) & 1) as u128;
        }
    }
    key
}

/// Keys of `points` along a Hilbert curve through the box `[lo, hi]`.
pub fn hilbert_keys(points: &PointSet, lo: &[f64], hi: &[f64]) -> Vec<u128> {
    let d = points.dim();
    let bits = (128 / d as u32).clamp(1, 20);
    let top = ((1u64 << bits) - 1) as f64;
    let mut buf = vec![0u32; d];
    points
        .iter()
        .map(|p| {
            for k in 0..d {
                let w = hi[k] - lo[k];
                let t = if w > 0.0 { (p[k] - lo[k]) / w } else { 0.0 };
                buf[k] = (t.clamp(0.0, 1.0) * top) as u32;
            }
            hilbert_key(&mut buf, bits)
        })
        .collect()
}

/// Indices of `points` sorted along a Hilbert curve through their bounding box
/// (ties by index).
pub fn hilbert_order(points: &PointSet) -> Vec<usize> {
    let Some((lo, hi)) = points.bounds() else {
        return Vec::new();
    };
    let keys = hilbert_keys(points, &lo, &hi);
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by_key(|&i| (keys[i], i));
    idx
}
