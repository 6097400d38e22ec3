//! Dominant non-local support pattern and the local rotations that align it.

use crate::algebra::factor::{FactorKind, FactorLabel};
use crate::algebra::rotation::rotation_to_e1;
use crate::algebra::{local_transform, GeneratorMatrix, TransformMatrix};
use crate::constraints::subspace::{is_local_pattern, pattern_name};
use crate::constraints::subspace_decompose;
use crate::{Error, Result};
use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

/// Relative tolerance for treating two pattern weights as tied.
const TIE_TOLERANCE: f64 = 1e-12;
/// Below this fraction of the dominant entry the fibre overlap is rejected.
const FIBRE_OVERLAP_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct SupportSignature {
    pub n: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub n_i: usize,
    pub m: usize,
    /// New position `p` holds old qubit `permutation[p]`.
    pub permutation: Vec<usize>,
    /// Dominant pattern in the original qubit order, e.g. `"A2 I B3"`.
    pub pattern: String,
    #[serde(skip)]
    pub labels: Vec<FactorLabel>,
    pub coefficient: f64,
    /// `|c| · ‖F‖` of the dominant pattern.
    pub weight: f64,
    /// Number of patterns tied with the dominant one; `> 1` means the
    /// lexicographic tie-break decided.
    pub tied_patterns: usize,
}

impl SupportSignature {
    /// Whether `n_A ≥ 2` or `n_B ≥ 1`.
    pub fn is_nonlocal_support(&self) -> bool {
        self.n_a >= 2 || self.n_b >= 1
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignatureOutcome {
    Local,
    Nonlocal(SupportSignature),
}

/// Finds the non-local pattern with the largest `|c| · ‖F‖`. Patterns with
/// `n_A ≥ 2` or `n_B ≥ 1` are preferred over the all-`I` pattern. `tol` is
/// relative to `max(1, ‖X‖)` and applies both to the subspace residual and
/// to the non-local coefficients.
pub fn support_signature(x: &GeneratorMatrix, tol: f64) -> Result<SignatureOutcome> {
    let n = x.n();
    let scale = x.frobenius_norm().max(1.0);
    let d = subspace_decompose(x);
    if d.residual() > tol * scale {
        return Err(Error::SupportLeakage(d.residual()));
    }
    let mut best: Option<(bool, f64, usize)> = None;
    let mut candidates = Vec::new();
    for (i, &c) in d.coefficients().iter().enumerate() {
        let p = d.pattern(i);
        if is_local_pattern(&p) || c.abs() <= tol * scale {
            continue;
        }
        let strong =
            p.iter().any(|l| l.kind() == FactorKind::B) || p.iter().filter(|l| l.kind() == FactorKind::A).count() >= 2;
        let weight = c.abs() * p.iter().map(|l| l.norm_sq()).product::<f64>().sqrt();
        candidates.push((i, strong, weight));
        let better = match best {
            None => true,
            Some((bs, bw, _)) => (strong && !bs) || (strong == bs && weight > bw * (1.0 + TIE_TOLERANCE)),
        };
        if better {
            best = Some((strong, weight, i));
        }
    }
    let Some((strong, weight, index)) = best else {
        return Ok(SignatureOutcome::Local);
    };
    let tied_patterns = candidates
        .iter()
        .filter(|&&(_, s, w)| s == strong && w >= weight * (1.0 - TIE_TOLERANCE))
        .count();
    let labels = d.pattern(index);
    let lab = &labels;
    let of_kind = |k: FactorKind| (0..n).filter(move |&q| lab[q].kind() == k);
    let permutation: Vec<usize> = of_kind(FactorKind::A)
        .chain(of_kind(FactorKind::B))
        .chain(of_kind(FactorKind::I))
        .collect();
    let n_a = of_kind(FactorKind::A).count();
    let n_b = of_kind(FactorKind::B).count();
    Ok(SignatureOutcome::Nonlocal(SupportSignature {
        n,
        n_a,
        n_b,
        n_i: n - n_a - n_b,
        m: n_a + n_b,
        permutation,
        pattern: pattern_name(&labels),
        coefficient: d.coefficients()[index],
        weight,
        tied_patterns,
        labels,
    }))
}

/// Per-qubit rotations that take the dominant pattern's axes to `e1`.
#[derive(Debug, Clone, Serialize)]
pub struct Alignment {
    #[serde(skip)]
    pub transform: TransformMatrix,
    pub rotations: Vec<[[f64; 3]; 3]>,
    /// Axis sent to `e1` on each non-idle qubit.
    pub axes: Vec<Option<[f64; 3]>>,
    /// Coefficient of the aligned target `A_e1/B_e1/I` pattern after
    /// conjugation, predicted from the decomposition.
    pub overlap: f64,
    /// True when the fibre axes overlapped too little and the dominant
    /// pattern's plain axes were used instead.
    pub fallback: bool,
}

/// Closed-form alignment. Within the dominant kind pattern `K` the
/// coefficients form a tensor `T[i1..]` over the axes of the non-idle qubits;
/// each qubit's axis is the normalized fibre of `T` through the dominant
/// entry, sign-fixed so the dominant component is positive.
pub fn local_align(x: &GeneratorMatrix, signature: &SupportSignature) -> Result<Alignment> {
    let n = x.n();
    if signature.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: signature.n,
        });
    }
    let d = subspace_decompose(x);
    let labels = &signature.labels;
    let active: Vec<usize> = (0..n).filter(|&q| labels[q].kind() != FactorKind::I).collect();
    let dominant_axes: Vec<usize> = active.iter().map(|&q| labels[q].axis().unwrap_or(0)).collect();
    let entry = |axes: &[usize]| {
        let mut pattern = labels.clone();
        for (&q, &a) in active.iter().zip(axes) {
            pattern[q] = FactorLabel::with_axis(labels[q].kind(), a);
        }
        d.coefficient(&pattern)
    };
    let dominant = entry(&dominant_axes);
    let mut fibres: Vec<Vector3<f64>> = Vec::with_capacity(active.len());
    for j in 0..active.len() {
        let mut w = Vector3::zeros();
        let mut axes = dominant_axes.clone();
        for i in 0..3 {
            axes[j] = i;
            w[i] = entry(&axes);
        }
        let w = w * w[dominant_axes[j]].signum();
        fibres.push(w.normalize());
    }
    let overlap_of = |us: &[Vector3<f64>]| {
        let total = 3usize.pow(active.len() as u32);
        let mut sum = 0.0;
        for flat in 0..total {
            let mut axes = vec![0; active.len()];
            let mut r = flat;
            for a in axes.iter_mut().rev() {
                *a = r % 3;
                r /= 3;
            }
            let weight: f64 = axes.iter().zip(us).map(|(&a, u)| u[a]).product();
            if weight != 0.0 {
                sum += weight * entry(&axes);
            }
        }
        sum
    };
    let mut overlap = overlap_of(&fibres);
    let fallback = overlap.abs() < FIBRE_OVERLAP_FLOOR * dominant.abs();
    if fallback {
        fibres = dominant_axes.iter().map(|&a| Vector3::ith(a, 1.0)).collect();
        overlap = dominant;
    }
    let mut rotations = vec![Matrix3::identity(); n];
    let mut axes = vec![None; n];
    for (&q, u) in active.iter().zip(&fibres) {
        rotations[q] = rotation_to_e1(u);
        axes[q] = Some([u.x, u.y, u.z]);
    }
    let transform = local_transform(&rotations)?;
    Ok(Alignment {
        transform,
        rotations: rotations
            .iter()
            .map(|r| {
                [
                    [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
                    [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
                    [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
                ]
            })
            .collect(),
        axes,
        overlap,
        fallback,
    })
}
