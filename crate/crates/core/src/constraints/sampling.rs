//! Deterministic sample plans: even sample indices walk the signed-axis grid
//! (index 0 is all `e1`) and then draw from the special-vector pool, odd
//! indices are Haar-uniform. Every sample depends only on `(seed, index)`.

use crate::rng::{sample_rng, unit_vector3, Domain};
use crate::tensor::BlochVector3;
use rand::Rng;
use std::f64::consts::FRAC_1_SQRT_2;

fn signed_axes() -> [BlochVector3; 6] {
    let e = BlochVector3::axis;
    [e(0), -e(0), e(1), -e(1), e(2), -e(2)]
}

/// The six signed axes followed by the twelve `(±ei ± ej)/√2`.
pub fn special_vectors() -> Vec<BlochVector3> {
    let mut out = signed_axes().to_vec();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let v = BlochVector3::axis(i).0 * (si * FRAC_1_SQRT_2) + BlochVector3::axis(j).0 * (sj * FRAC_1_SQRT_2);
            out.push(BlochVector3(v));
        }
    }
    out
}

pub(crate) struct Sample {
    pub k: usize,
    pub a: Vec<BlochVector3>,
    pub b: Vec<BlochVector3>,
}

/// `a1..an, b1..bn` as base-6 digits, `bn` fastest.
fn grid_vectors(n: usize, mut j: u64) -> (Vec<BlochVector3>, Vec<BlochVector3>) {
    let axes = signed_axes();
    let mut digits = vec![0usize; 2 * n];
    for d in digits.iter_mut().rev() {
        *d = (j % 6) as usize;
        j /= 6;
    }
    let a = digits[..n].iter().map(|&d| axes[d]).collect();
    let b = digits[n..].iter().map(|&d| axes[d]).collect();
    (a, b)
}

fn grid_len(n: usize) -> u64 {
    6u64.pow(2 * n as u32)
}

fn random_vectors(n: usize, seed: u64, domain: Domain, i: u64, pool: bool) -> (Vec<BlochVector3>, Vec<BlochVector3>) {
    let mut rng = sample_rng(seed, domain, i);
    let specials = special_vectors();
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
        if pool {
            specials[rng.random_range(0..specials.len())]
        } else {
            BlochVector3(unit_vector3(rng))
        }
    };
    let a = (0..n).map(|_| draw(&mut rng)).collect();
    let b = (0..n).map(|_| draw(&mut rng)).collect();
    (a, b)
}

/// Product state `a` and product effect `b` for sample `i`.
pub(crate) fn product_sample(n: usize, seed: u64, domain: Domain, i: u64) -> (Vec<BlochVector3>, Vec<BlochVector3>) {
    if i % 2 == 1 {
        return random_vectors(n, seed, domain, i, false);
    }
    let j = i / 2;
    if j < grid_len(n) {
        grid_vectors(n, j)
    } else {
        random_vectors(n, seed, domain, i, true)
    }
}

/// Like [`product_sample`], plus the constrained qubit `k`. On the grid `k`
/// is the fastest digit.
pub(crate) fn constraint_sample(n: usize, seed: u64, domain: Domain, i: u64) -> Sample {
    let j = i / 2;
    let k = (j % n as u64) as usize;
    let (a, b) = if i % 2 == 1 {
        random_vectors(n, seed, domain, i, false)
    } else if j / (n as u64) < grid_len(n) {
        grid_vectors(n, j / n as u64)
    } else {
        random_vectors(n, seed, domain, i, true)
    };
    Sample { k, a, b }
}

/// Earliest index whose violation is within 1e-12 of `max`.
pub(crate) fn earliest_worst(violations: impl Iterator<Item = f64>, max: f64) -> u64 {
    violations
        .enumerate()
        .find(|&(_, v)| v >= max - 1e-12)
        .map(|(i, _)| i as u64)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_zero_is_all_e1() {
        let (a, b) = product_sample(3, 0, Domain::RangeGrid, 0);
        assert!(a.iter().chain(&b).all(|v| *v == BlochVector3::e1()));
        let s = constraint_sample(2, 0, Domain::FirstOrder, 2);
        assert_eq!(s.k, 1);
        assert!(s.a.iter().all(|v| *v == BlochVector3::e1()));
    }

    #[test]
    fn grid_then_pool_then_haar_are_unit() {
        for i in [0, 1, 2, 3, 2 * grid_len(1), 2 * grid_len(1) + 2] {
            let (a, b) = product_sample(1, 4, Domain::RangeGrid, i);
            for v in a.iter().chain(&b) {
                assert!((v.norm() - 1.0).abs() < 1e-15);
            }
        }
        assert_eq!(special_vectors().len(), 18);
    }

    #[test]
    fn grid_enumerates_every_combination_once() {
        let mut seen = std::collections::HashSet::new();
        for j in 0..grid_len(1) {
            let (a, b) = grid_vectors(1, j);
            seen.insert(format!("{:?}{:?}", a[0].0.as_slice(), b[0].0.as_slice()));
        }
        assert_eq!(seen.len(), 36);
    }

    #[test]
    fn ties_keep_earliest() {
        assert_eq!(earliest_worst([0.0, 2.0, 2.0 - 1e-13, 2.0].into_iter(), 2.0), 1);
    }
}
