//! Nullspace of the assembled first-order constraint system.
//!
//! The unknowns are the `16^n` entries of `X`. A constraint row for vectors
//! `(a', a)` has entry `v(a')[β] v(a)[α]` at `(β, α)`; per qubit it is the
//! 16-vector `v(a'_k) ⊗ v(a_k)`.
//!
//! The row set is closed under negating both vectors on any single qubit,
//! and `v(-a) = P v(a)` with `P = diag(1, -1, -1, -1)`. Hence the row space
//! splits into `2^n` parity sectors: column `(β, α)` has parity
//! `[βk ≠ 0] xor [αk ≠ 0]` on qubit `k`. Restricted to a sector, a row and
//! its negated partners agree up to sign, so one representative per orbit
//! suffices. Each sector is then reduced independently (QR, then SVD of R).

use super::{constraint_vectors, to_arrays, UNIT_TOLERANCE};
use crate::algebra::GeneratorMatrix;
use crate::rng::{sample_rng, unit_vector3, Domain};
use crate::tensor::BlochVector3;
use crate::{Error, RMatrix, Result};
use faer::Mat;
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

/// Relative singular-value cutoff for rank decisions.
pub const RANK_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingPlan {
    /// `±ei` and `±(ei + ej)/√2` on the constrained qubit, `(b, a)` pairs of
    /// signed axes elsewhere.
    Paper,
    /// Haar-random unit vectors; `rows_per_qubit` defaults to 1.25 times the
    /// rank each qubit contributes.
    Randomized { rows_per_qubit: Option<usize>, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorSummary {
    /// Per-qubit parity, qubit 0 first (`"010"`).
    pub parity: String,
    pub columns: usize,
    pub rows: usize,
    pub rank: usize,
    pub nullity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NullspaceResult {
    pub n: usize,
    pub plan: String,
    pub rows: usize,
    pub columns: usize,
    pub dimension: usize,
    pub expected_dimension: usize,
    pub cutoff: f64,
    pub largest_singular_value: f64,
    pub smallest_retained_singular_value: f64,
    pub largest_discarded_singular_value: f64,
    /// Smallest retained over largest discarded singular value.
    pub spectral_gap: f64,
    /// Some singular value lies within a decade of the cutoff.
    pub ambiguous: bool,
    pub sectors: Vec<SectorSummary>,
    /// Orthonormal basis, one column per nullspace vector, entry
    /// `β 4^n + α` holding `X[β][α]`.
    #[serde(skip)]
    pub basis: RMatrix,
}

impl NullspaceResult {
    pub fn basis_generator(&self, j: usize) -> GeneratorMatrix {
        let dim = 1usize << (2 * self.n);
        let col = self.basis.column(j);
        GeneratorMatrix::new(RMatrix::from_fn(dim, dim, |b, a| col[b * dim + a]))
            .expect("basis vectors have generator shape")
    }
}

struct Row {
    left: DVector<f64>,
    right: DVector<f64>,
}

fn paper_rows(n: usize) -> Vec<Row> {
    let e = BlochVector3::axis;
    let diag = |i: usize, j: usize| BlochVector3((e(i).0 + e(j).0) * FRAC_1_SQRT_2);
    // orbit representatives under a -> -a
    let constrained = [e(0), e(1), e(2), diag(0, 1), diag(0, 2), diag(1, 2)];
    let signed = [e(0), -e(0), e(1), -e(1), e(2), -e(2)];
    let mut pairs = Vec::new();
    for a in [e(0), e(1), e(2)] {
        for b in signed {
            pairs.push((b, a));
        }
    }
    let mut rows = Vec::new();
    for k in 0..n {
        let others = pairs.len().pow(n as u32 - 1);
        for ak in constrained {
            for mut idx in 0..others {
                let mut a = vec![ak; n];
                let mut b = vec![ak; n];
                for j in (0..n).rev().filter(|&j| j != k) {
                    let (bj, aj) = pairs[idx % pairs.len()];
                    idx /= pairs.len();
                    a[j] = aj;
                    b[j] = bj;
                }
                let (left, right) = constraint_vectors(&a, &b, k);
                rows.push(Row { left, right });
            }
        }
    }
    rows
}

fn randomized_rows(n: usize, rows_per_qubit: usize, seed: u64) -> Vec<Row> {
    let mut rows = Vec::with_capacity(n * rows_per_qubit);
    for k in 0..n {
        for r in 0..rows_per_qubit {
            let mut rng = sample_rng(seed, Domain::Nullspace, (k * rows_per_qubit + r) as u64);
            let a: Vec<_> = (0..n).map(|_| BlochVector3(unit_vector3(&mut rng))).collect();
            let b: Vec<_> = (0..n).map(|_| BlochVector3(unit_vector3(&mut rng))).collect();
            let (left, right) = constraint_vectors(&a, &b, k);
            rows.push(Row { left, right });
        }
    }
    rows
}

/// Column `(β, α)` pairs of each parity sector, in flat order.
fn sector_columns(n: usize) -> Vec<Vec<(usize, usize)>> {
    let dim = 1usize << (2 * n);
    let mut sectors = vec![Vec::new(); 1 << n];
    for beta in 0..dim {
        for alpha in 0..dim {
            let mut s = 0usize;
            for k in 0..n {
                let shift = 2 * (n - 1 - k);
                let bk = (beta >> shift) & 3 != 0;
                let ak = (alpha >> shift) & 3 != 0;
                s = (s << 1) | usize::from(bk ^ ak);
            }
            sectors[s].push((beta, alpha));
        }
    }
    sectors
}

/// Singular values (descending) and the full right singular basis.
fn reduce(m: Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let r = if m.nrows() > m.ncols() {
        m.qr().thin_R().to_owned()
    } else {
        m
    };
    let svd = r
        .svd()
        .map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    let s = svd.S().column_vector().iter().copied().collect();
    Ok((s, svd.V().to_owned()))
}

/// Nullspace of the first-order system for `n ∈ 1..=3`.
pub fn first_order_nullspace(n: usize, plan: SamplingPlan) -> Result<NullspaceResult> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "nullspace assembly supports n = 1..=3, got {n}"
        )));
    }
    let (rows, plan_name) = match plan {
        SamplingPlan::Paper => (paper_rows(n), "paper".to_string()),
        SamplingPlan::Randomized { rows_per_qubit, seed } => {
            let default = (9 * 16usize.pow(n as u32 - 1) * 5).div_ceil(4);
            let per = rows_per_qubit.unwrap_or(default);
            (
                randomized_rows(n, per, seed),
                format!("randomized(rows_per_qubit={per}, seed={seed})"),
            )
        }
    };
    let sectors = sector_columns(n);
    let mut reduced = Vec::with_capacity(sectors.len());
    for cols in &sectors {
        let m = Mat::from_fn(rows.len(), cols.len(), |r, c| {
            let (beta, alpha) = cols[c];
            rows[r].left[beta] * rows[r].right[alpha]
        });
        reduced.push(reduce(m)?);
    }
    let largest = reduced.iter().flat_map(|(s, _)| s.iter().copied()).fold(0.0, f64::max);
    let cutoff = RANK_CUTOFF * largest;
    let columns = 1usize << (4 * n);
    let mut basis_cols: Vec<DVector<f64>> = Vec::new();
    let mut summaries = Vec::new();
    let mut smallest_retained = f64::INFINITY;
    let mut largest_discarded = 0.0f64;
    let mut ambiguous = false;
    for (s_idx, (cols, (sv, v))) in sectors.iter().zip(&reduced).enumerate() {
        let rank = sv.iter().filter(|&&x| x > cutoff).count();
        for &x in sv {
            if x > cutoff {
                smallest_retained = smallest_retained.min(x);
            } else {
                largest_discarded = largest_discarded.max(x);
            }
            if x > cutoff / 10.0 && x < cutoff * 10.0 {
                ambiguous = true;
            }
        }
        for j in rank..cols.len() {
            let mut full = DVector::zeros(columns);
            for (c, &(beta, alpha)) in cols.iter().enumerate() {
                full[beta * (1 << (2 * n)) + alpha] = v[(c, j)];
            }
            basis_cols.push(full);
        }
        let parity = (0..n)
            .map(|k| if s_idx >> (n - 1 - k) & 1 == 1 { '1' } else { '0' })
            .collect();
        summaries.push(SectorSummary {
            parity,
            columns: cols.len(),
            rows: rows.len(),
            rank,
            nullity: cols.len() - rank,
        });
    }
    let dimension = basis_cols.len();
    let basis = if basis_cols.is_empty() {
        RMatrix::zeros(columns, 0)
    } else {
        RMatrix::from_columns(&basis_cols)
    };
    Ok(NullspaceResult {
        n,
        plan: plan_name,
        rows: rows.len(),
        columns,
        dimension,
        expected_dimension: 7usize.pow(n as u32),
        cutoff,
        largest_singular_value: largest,
        smallest_retained_singular_value: smallest_retained,
        largest_discarded_singular_value: largest_discarded,
        spectral_gap: if largest_discarded > 0.0 {
            smallest_retained / largest_discarded
        } else {
            f64::INFINITY
        },
        ambiguous,
        sectors: summaries,
        basis,
    })
}

/// Cross-check route for `n ≤ 2`: every paper row (no orbit reduction, no
/// sectors), one dense SVD.
pub fn first_order_nullspace_dense(n: usize) -> Result<NullspaceResult> {
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "dense route supports n = 1..=2, got {n}"
        )));
    }
    let e = BlochVector3::axis;
    let signed = [e(0), -e(0), e(1), -e(1), e(2), -e(2)];
    let mut constrained = signed.to_vec();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let d = BlochVector3((e(i).0 + e(j).0) * FRAC_1_SQRT_2);
        constrained.push(d);
        constrained.push(-d);
    }
    let mut rows: Vec<DVector<f64>> = Vec::new();
    for k in 0..n {
        for &ak in &constrained {
            let others = 36usize.pow(n as u32 - 1);
            for mut idx in 0..others {
                let mut a = vec![ak; n];
                let mut b = vec![ak; n];
                for j in (0..n).filter(|&j| j != k) {
                    a[j] = signed[idx % 6];
                    b[j] = signed[(idx / 6) % 6];
                    idx /= 36;
                }
                let (left, right) = constraint_vectors(&a, &b, k);
                rows.push(left.kronecker(&right));
            }
        }
    }
    let columns = 1usize << (4 * n);
    let m = RMatrix::from_fn(rows.len(), columns, |r, c| rows[r][c]);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    let cutoff = RANK_CUTOFF * largest;
    let retained: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > cutoff).collect();
    let null: Vec<DVector<f64>> = (0..sv.len())
        .filter(|&i| sv[i] <= cutoff)
        .map(|i| v_t.row(i).transpose())
        .collect();
    let smallest_retained = retained.iter().map(|&i| sv[i]).fold(f64::INFINITY, f64::min);
    let largest_discarded = sv.iter().copied().filter(|&x| x <= cutoff).fold(0.0, f64::max);
    Ok(NullspaceResult {
        n,
        plan: "dense".into(),
        rows: rows.len(),
        columns,
        dimension: columns - retained.len(),
        expected_dimension: 7usize.pow(n as u32),
        cutoff,
        largest_singular_value: largest,
        smallest_retained_singular_value: smallest_retained,
        largest_discarded_singular_value: largest_discarded,
        spectral_gap: if largest_discarded > 0.0 {
            smallest_retained / largest_discarded
        } else {
            f64::INFINITY
        },
        ambiguous: sv.iter().any(|&x| x > cutoff / 10.0 && x < cutoff * 10.0),
        sectors: Vec::new(),
        basis: if null.is_empty() {
            RMatrix::zeros(columns, 0)
        } else {
            RMatrix::from_columns(&null)
        },
    })
}

/// Left inputs, right inputs and constrained qubit of a residual witness.
pub type ResidualWitness = (Vec<[f64; 3]>, Vec<[f64; 3]>, usize);

/// Largest `|first_order_residual|` of any basis vector over `samples` fresh
/// Haar-random constraint inputs, with the worst inputs.
pub fn basis_residual(result: &NullspaceResult, samples: u64, seed: u64) -> (f64, Option<ResidualWitness>) {
    let n = result.n;
    let basis_t = result.basis.transpose();
    let worst: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (a, b, k) = residual_sample(n, seed, i);
            let (left, right) = constraint_vectors(&a, &b, k);
            let row = left.kronecker(&right);
            (&basis_t * row).amax()
        })
        .collect();
    let max = worst.iter().copied().fold(0.0, f64::max);
    let at = worst.iter().position(|&w| w == max);
    let witness = at.map(|i| {
        let (a, b, k) = residual_sample(n, seed, i as u64);
        (to_arrays(&a), to_arrays(&b), k)
    });
    (max, witness)
}

fn residual_sample(n: usize, seed: u64, i: u64) -> (Vec<BlochVector3>, Vec<BlochVector3>, usize) {
    let mut rng = sample_rng(seed, Domain::Residual, i);
    let a: Vec<_> = (0..n).map(|_| BlochVector3(unit_vector3(&mut rng))).collect();
    let b: Vec<_> = (0..n).map(|_| BlochVector3(unit_vector3(&mut rng))).collect();
    debug_assert!(a.iter().all(|v| (v.norm() - 1.0).abs() < UNIT_TOLERANCE));
    (a, b, (i % n as u64) as usize)
}
