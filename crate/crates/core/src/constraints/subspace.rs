use crate::algebra::factor::FactorLabel;
use crate::algebra::modes::{from_modes, mode_apply, to_modes, vec4};
use crate::algebra::GeneratorMatrix;
use crate::tensor::pauli::multi_index;
use crate::RMatrix;
use serde::Serialize;

/// 7x16 analysis map: row `l` is `vec(F_l) / |F_l|²`.
fn analysis_map() -> RMatrix {
    let mut m = RMatrix::zeros(7, 16);
    for l in FactorLabel::ALL {
        let v = vec4(&l.matrix());
        for (j, x) in v.iter().enumerate() {
            m[(l.index(), j)] = x / l.norm_sq();
        }
    }
    m
}

/// 16x7 synthesis map: column `l` is `vec(F_l)`.
fn synthesis_map() -> RMatrix {
    let mut m = RMatrix::zeros(16, 7);
    for l in FactorLabel::ALL {
        for (j, x) in vec4(&l.matrix()).iter().enumerate() {
            m[(j, l.index())] = *x;
        }
    }
    m
}

/// Orthogonal projection of a generator onto `(A ⊕ B ⊕ I)^⊗n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceDecomposition {
    n: usize,
    /// `7^n` coefficients, pattern index in base 7 with qubit 0 slowest.
    coefficients: Vec<f64>,
    reconstruction: RMatrix,
    remainder: RMatrix,
}

impl SubspaceDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, pattern: &[FactorLabel]) -> f64 {
        let idx = pattern.iter().fold(0, |acc, l| acc * 7 + l.index());
        self.coefficients[idx]
    }

    /// `Σ c_L F_L1 ⊗ .. ⊗ F_Ln`.
    pub fn reconstruction(&self) -> &RMatrix {
        &self.reconstruction
    }

    /// `X - reconstruction`.
    pub fn remainder(&self) -> &RMatrix {
        &self.remainder
    }

    pub fn residual(&self) -> f64 {
        self.remainder.norm()
    }

    pub fn is_member(&self, tol: f64) -> bool {
        self.residual() <= tol
    }

    pub fn pattern(&self, index: usize) -> Vec<FactorLabel> {
        multi_index(index, self.n, 7)
            .into_iter()
            .map(|d| FactorLabel::from_index(d as usize))
            .collect()
    }

    /// Patterns with `|c| > tol`, in pattern order.
    pub fn nonzero_patterns(&self, tol: f64) -> Vec<(Vec<FactorLabel>, f64)> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > tol)
            .map(|(i, &c)| (self.pattern(i), c))
            .collect()
    }
}

pub fn subspace_decompose(x: &GeneratorMatrix) -> SubspaceDecomposition {
    let n = x.n();
    let analysis = analysis_map();
    let synthesis = synthesis_map();
    let mut t = to_modes(x.matrix(), n);
    let mut dims = vec![16; n];
    for k in 0..n {
        t = mode_apply(&t, &dims, k, &analysis);
        dims[k] = 7;
    }
    let coefficients = t.clone();
    for k in 0..n {
        t = mode_apply(&t, &dims, k, &synthesis);
        dims[k] = 16;
    }
    let reconstruction = from_modes(&t, n);
    let remainder = x.matrix() - &reconstruction;
    SubspaceDecomposition {
        n,
        coefficients,
        reconstruction,
        remainder,
    }
}

pub(crate) fn is_local_pattern(p: &[FactorLabel]) -> bool {
    p.iter().filter(|l| matches!(l, FactorLabel::A(_))).count() == 1
        && p.iter().all(|l| matches!(l, FactorLabel::A(_) | FactorLabel::I))
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalMembership {
    pub is_local: bool,
    pub residual: f64,
    /// Norm of the part outside the local algebra (including the residual).
    pub nonlocal_norm: f64,
    /// Local patterns present, e.g. `"A3 I"`, with coefficients.
    pub local_terms: Vec<(String, f64)>,
    #[serde(skip)]
    pub local_part: RMatrix,
    #[serde(skip)]
    pub decomposition: SubspaceDecomposition,
}

pub(crate) fn pattern_name(p: &[FactorLabel]) -> String {
    p.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

/// Whether `X` lies in `⊕_π π(A ⊗ I^⊗(n-1))`. `tol` is absolute on the
/// Frobenius norm of the non-local part.
pub fn local_membership(x: &GeneratorMatrix, tol: f64) -> LocalMembership {
    let decomposition = subspace_decompose(x);
    let n = x.n();
    let mut local_coeffs = vec![0.0; decomposition.coefficients.len()];
    let mut local_terms = Vec::new();
    for (i, &c) in decomposition.coefficients.iter().enumerate() {
        let p = decomposition.pattern(i);
        if is_local_pattern(&p) {
            local_coeffs[i] = c;
            if c.abs() > tol {
                local_terms.push((pattern_name(&p), c));
            }
        }
    }
    let synthesis = synthesis_map();
    let mut t = local_coeffs;
    let mut dims = vec![7; n];
    for k in 0..n {
        t = mode_apply(&t, &dims, k, &synthesis);
        dims[k] = 16;
    }
    let local_part = from_modes(&t, n);
    let nonlocal_norm = (x.matrix() - &local_part).norm();
    LocalMembership {
        is_local: nonlocal_norm <= tol,
        residual: decomposition.residual(),
        nonlocal_norm,
        local_terms,
        local_part,
        decomposition,
    }
}
