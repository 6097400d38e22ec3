//! Admissibility constraints on generators and finite transformations.
//!
//! For unit Bloch vectors the expansion of `2^-n v(b)ᵀ e^{εX} v(a) ∈ [0, 1]`
//! gives, with `a'` equal to `b` except `-ak` at qubit `k`:
//!
//! * first order: `v(a')ᵀ X v(a) = 0`,
//! * second order: `v(a')ᵀ X² v(a) ≥ 0` and `v(a)ᵀ X² v(a) ≤ 0`.

mod nullspace;
mod range;
mod sampling;
pub(crate) mod subspace;

pub use nullspace::{
    basis_residual, first_order_nullspace, first_order_nullspace_dense, NullspaceResult, ResidualWitness, SamplingPlan,
    SectorSummary,
};
pub use range::range_check;
pub use sampling::special_vectors;
pub use subspace::{local_membership, subspace_decompose, LocalMembership, SubspaceDecomposition};

use crate::algebra::GeneratorMatrix;
use crate::rng::Domain;
use crate::tensor::{product_coeffs, BlochVector3};
use crate::{Error, RMatrix, Result};
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

const UNIT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    FirstOrder,
    SecondOrder,
    Range,
}

/// Inputs of the worst sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub sample: u64,
    /// Qubit carrying `-ak` on the left; absent for range checks.
    pub qubit: Option<usize>,
    pub a: Vec<[f64; 3]>,
    pub b: Vec<[f64; 3]>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub kind: ConstraintKind,
    pub n: usize,
    pub max_violation: f64,
    #[serde(rename = "witness_inputs")]
    pub witness: Option<Witness>,
    pub min_value: f64,
    pub max_value: f64,
    pub samples: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub passed: bool,
}

pub(crate) fn to_arrays(v: &[BlochVector3]) -> Vec<[f64; 3]> {
    v.iter().map(|x| [x.0.x, x.0.y, x.0.z]).collect()
}

fn check_inputs(n: usize, a: &[BlochVector3], b: &[BlochVector3], k: usize) -> Result<()> {
    if a.len() != n || b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.len().min(b.len()),
        });
    }
    if k >= n {
        return Err(Error::InvalidArgument(format!("qubit {k} out of range for n = {n}")));
    }
    let unit = |v: &BlochVector3| {
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            Err(Error::BlochNorm {
                norm,
                expected: "unit length",
            })
        } else {
            Ok(())
        }
    };
    for (j, (aj, bj)) in a.iter().zip(b).enumerate() {
        unit(aj)?;
        if j != k {
            unit(bj)?;
        }
    }
    Ok(())
}

/// `(v(a'), v(a))` with `a'` = `b` except `-ak` at qubit `k`. No checks.
pub(crate) fn constraint_vectors(a: &[BlochVector3], b: &[BlochVector3], k: usize) -> (DVector<f64>, DVector<f64>) {
    let left: Vec<_> = (0..a.len()).map(|j| if j == k { -a[j].0 } else { b[j].0 }).collect();
    let right: Vec<_> = a.iter().map(|v| v.0).collect();
    (product_coeffs(&left), product_coeffs(&right))
}

/// `v(b1.., -ak, ..bn)ᵀ X v(a1..an)`; `bk` is ignored.
pub fn first_order_residual(x: &GeneratorMatrix, a: &[BlochVector3], b: &[BlochVector3], k: usize) -> Result<f64> {
    check_inputs(x.n(), a, b, k)?;
    let (left, right) = constraint_vectors(a, b, k);
    Ok(left.dot(&(x.matrix() * right)))
}

/// `(v(b1.., -ak, ..bn)ᵀ X² v(a), v(a)ᵀ X² v(a))`. Admissibility requires
/// the first to be `≥ 0` and the second `≤ 0`.
pub fn second_order_values(
    x: &GeneratorMatrix,
    a: &[BlochVector3],
    b: &[BlochVector3],
    k: usize,
) -> Result<(f64, f64)> {
    check_inputs(x.n(), a, b, k)?;
    Ok(second_order_unchecked(&(x.matrix() * x.matrix()), a, b, k))
}

pub(crate) fn second_order_unchecked(x2: &RMatrix, a: &[BlochVector3], b: &[BlochVector3], k: usize) -> (f64, f64) {
    let (left, right) = constraint_vectors(a, b, k);
    let image = x2 * &right;
    (left.dot(&image), right.dot(&image))
}

/// Scan of `samples` constraint evaluations for one generator. Even sample
/// indices walk the axis grid (then the special-vector pool), odd ones are
/// Haar-random; the qubit `k` cycles with the sample.
fn constraint_scan(x: &GeneratorMatrix, kind: ConstraintKind, samples: u64, seed: u64, tol: f64) -> ConstraintReport {
    let n = x.n();
    let domain = match kind {
        ConstraintKind::SecondOrder => Domain::SecondOrder,
        _ => Domain::FirstOrder,
    };
    let x2 = match kind {
        ConstraintKind::SecondOrder => Some(x.matrix() * x.matrix()),
        _ => None,
    };
    // (violation, reported value) per sample
    let evaluated: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = sampling::constraint_sample(n, seed, domain, i);
            match &x2 {
                None => {
                    let (left, right) = constraint_vectors(&s.a, &s.b, s.k);
                    let v = left.dot(&(x.matrix() * right));
                    (v.abs(), v)
                }
                Some(x2) => {
                    let (off, diag) = second_order_unchecked(x2, &s.a, &s.b, s.k);
                    let violation = (-off).max(diag).max(0.0);
                    // report whichever inequality is worse
                    (violation, if -off >= diag { off } else { diag })
                }
            }
        })
        .collect();
    let mut report = ConstraintReport {
        kind,
        n,
        max_violation: 0.0,
        witness: None,
        min_value: f64::INFINITY,
        max_value: f64::NEG_INFINITY,
        samples,
        seed,
        tolerance: tol,
        passed: true,
    };
    for &(violation, value) in &evaluated {
        report.min_value = report.min_value.min(value);
        report.max_value = report.max_value.max(value);
        report.max_violation = report.max_violation.max(violation);
    }
    if samples == 0 {
        report.min_value = 0.0;
        report.max_value = 0.0;
    }
    report.passed = report.max_violation <= tol;
    if !report.passed {
        let i = sampling::earliest_worst(evaluated.iter().map(|e| e.0), report.max_violation);
        let value = evaluated[i as usize].1;
        let s = sampling::constraint_sample(n, seed, domain, i);
        report.witness = Some(Witness {
            sample: i,
            qubit: Some(s.k),
            a: to_arrays(&s.a),
            b: to_arrays(&s.b),
            value,
        });
    }
    report
}

/// First-order constraint over a grid/Haar sample plan.
pub fn first_order_check(x: &GeneratorMatrix, samples: u64, seed: u64, tol: f64) -> ConstraintReport {
    constraint_scan(x, ConstraintKind::FirstOrder, samples, seed, tol)
}

/// Both second-order inequalities over a grid/Haar sample plan.
pub fn second_order_check(x: &GeneratorMatrix, samples: u64, seed: u64, tol: f64) -> ConstraintReport {
    constraint_scan(x, ConstraintKind::SecondOrder, samples, seed, tol)
}
