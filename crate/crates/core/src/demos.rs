//! The partial-transpose branch produces non-positive "states": the
//! transposed Bell projector and a negative outcome probability after a
//! unitary rotates its negative eigenvector onto `|00⟩`. Also the closure of
//! local rotations under conjugation by the single-qubit transpose.

use crate::algebra::rotation::{
    rotation_of_unitary, special_orthogonal_defect, su2_from_quaternion, transpose_reflection,
};
use crate::algebra::{adjoint_transform, local_unitary_transpose_twin, partial_transpose_map};
use crate::rng::{sample_rng, unit_quaternion, Domain};
use crate::tensor::{
    bloch_from_hermitian, check_no_signalling, distribution_from_state, hermitian_from_bloch, BlochTensor,
    HermitianOperator,
};
use crate::{CMatrix, Result, C64};
use nalgebra::{DVector, Matrix2};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

/// Transposed qubit in the demo (the second qubit).
pub const TRANSPOSED_QUBIT: usize = 1;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn basis_projector(index: usize) -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(index, index)] = c(1.0);
    m
}

/// `V|00⟩ = (|00⟩+|11⟩)/√2`, `V|11⟩ = (|11⟩-|00⟩)/√2`, `|01⟩` and `|10⟩`
/// fixed.
pub fn bell_rotation() -> CMatrix {
    let s = FRAC_1_SQRT_2;
    let mut v = CMatrix::identity(4, 4);
    v[(0, 0)] = c(s);
    v[(3, 0)] = c(s);
    v[(0, 3)] = c(-s);
    v[(3, 3)] = c(s);
    v
}

/// Another completion: `|01⟩ ↔ |10⟩` and `V|11⟩ = (|00⟩-|11⟩)/√2`.
pub fn bell_rotation_alt() -> CMatrix {
    let s = FRAC_1_SQRT_2;
    let mut v = CMatrix::zeros(4, 4);
    v[(0, 0)] = c(s);
    v[(3, 0)] = c(s);
    v[(2, 1)] = c(1.0);
    v[(1, 2)] = c(1.0);
    v[(0, 3)] = c(s);
    v[(3, 3)] = c(-s);
    v
}

/// Householder reflection sending the unit vector `psi` to a phase times
/// `|0..0⟩`.
pub fn householder_to_zero(psi: &DVector<C64>) -> CMatrix {
    let dim = psi.len();
    let lead = psi[0];
    let phase = if lead.norm() > 1e-14 {
        lead / lead.norm()
    } else {
        c(1.0)
    };
    let mut w = psi.clone();
    w[0] -= phase;
    let norm_sq = w.norm_squared();
    if norm_sq < 1e-28 {
        return CMatrix::identity(dim, dim);
    }
    CMatrix::identity(dim, dim) - (&w * w.adjoint()) * c(2.0 / norm_sq)
}

/// Phase-fixed so the first non-negligible component is real and positive.
fn fix_phase(v: DVector<C64>) -> DVector<C64> {
    let lead = v.iter().copied().find(|z| z.norm() > 1e-8).unwrap_or(c(1.0));
    let phase = lead.conj() / lead.norm();
    v * phase
}

fn complex_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()
}

fn complex_entries(v: &DVector<C64>) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

/// `(T_2 ∘ ad_V ∘ T_2)[|00⟩⟨00|]` for the given `V`, in the Bloch
/// representation.
fn transposed_image(v: &CMatrix) -> Result<BlochTensor> {
    let t2 = partial_transpose_map(TRANSPOSED_QUBIT, 2)?;
    let map = t2.compose(&adjoint_transform(v)?)?.compose(&t2)?;
    let start = bloch_from_hermitian(&HermitianOperator::new(basis_projector(0))?);
    map.apply(&start)
}

/// The four `(σ3, σ3)` outcome values `(++, +-, -+, --)` of `ad_W[r]`.
fn computational_values(w: &CMatrix, r: &BlochTensor) -> Result<[f64; 4]> {
    let mapped = adjoint_transform(w)?.apply(r)?;
    let dist = distribution_from_state(&mapped)?;
    Ok([
        dist.get(&[3, 3], &[1, 1]),
        dist.get(&[3, 3], &[1, -1]),
        dist.get(&[3, 3], &[-1, 1]),
        dist.get(&[3, 3], &[-1, -1]),
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct NegativeState {
    pub state: Vec<Vec<[f64; 2]>>,
    pub bloch: Vec<f64>,
    pub trace: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<[f64; 2]>>,
    pub min_eigenvalue: f64,
    pub negative_eigenvector: Vec<[f64; 2]>,
    pub hermiticity_defect: f64,
    pub no_signalling_deviation: f64,
    #[serde(skip)]
    pub operator: HermitianOperator,
    #[serde(skip)]
    pub tensor: BlochTensor,
    #[serde(skip)]
    pub negative_vector: DVector<C64>,
}

/// The state part of the certificate, built with [`bell_rotation`].
pub fn build_negative_state() -> Result<NegativeState> {
    negative_state_for(&bell_rotation())
}

fn negative_state_for(v: &CMatrix) -> Result<NegativeState> {
    let tensor = transposed_image(v)?;
    let operator = hermitian_from_bloch(&tensor);
    let m = operator.matrix();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors: Vec<DVector<C64>> = order
        .iter()
        .map(|&i| fix_phase(eig.eigenvectors.column(i).into_owned()))
        .collect();
    let negative_vector = vectors[0].clone();
    Ok(NegativeState {
        state: complex_rows(m),
        bloch: tensor.coeffs().iter().copied().collect(),
        trace: operator.trace(),
        min_eigenvalue: eigenvalues[0],
        eigenvalues,
        eigenvectors: vectors.iter().map(complex_entries).collect(),
        negative_eigenvector: complex_entries(&negative_vector),
        hermiticity_defect: crate::tensor::hermiticity_defect(m),
        no_signalling_deviation: check_no_signalling(&tensor, 1e-12).max_deviation,
        operator,
        tensor,
        negative_vector,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VariantProbability {
    pub v: &'static str,
    pub w: &'static str,
    pub probability_00: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NegativityCertificate {
    pub transposed_qubit: usize,
    #[serde(flatten)]
    pub state: NegativeState,
    pub w: Vec<Vec<[f64; 2]>>,
    pub final_state: Vec<f64>,
    /// `P(+1,+1 | σ3,σ3)` after `ad_W`.
    pub probability_00: f64,
    /// `(++, +-, -+, --)` for settings `(σ3, σ3)`.
    pub computational_basis: [f64; 4],
    pub computational_sum: f64,
    /// Same probability for other completions of `V` and other choices of `W`.
    pub variants: Vec<VariantProbability>,
    /// Smallest outcome value over all settings of `ad_V[|00⟩⟨00|]`
    /// without the transposes.
    pub control_min_probability: f64,
    pub valid: bool,
}

/// Builds the transposed Bell projector, rotates its negative eigenvector onto
/// `|00⟩` with a Householder `W` and reads off `P(+1,+1 | σ3,σ3)`.
pub fn negative_probability_demo() -> Result<NegativityCertificate> {
    let state = build_negative_state()?;
    let w = householder_to_zero(&state.negative_vector);
    let final_state = adjoint_transform(&w)?.apply(&state.tensor)?;
    let computational_basis = computational_values(&w, &state.tensor)?;
    let probability_00 = computational_basis[0];

    // W followed by a diagonal phase still sends the eigenvector to |00⟩
    let phases = CMatrix::from_diagonal(&DVector::from_vec(vec![
        c(1.0),
        C64::from_polar(1.0, 0.3),
        C64::from_polar(1.0, 1.1),
        c(-1.0),
    ]));
    let mut variants = Vec::new();
    for (v_name, v) in [("standard", bell_rotation()), ("alternative", bell_rotation_alt())] {
        let s = negative_state_for(&v)?;
        for (w_name, wm) in [
            ("householder", householder_to_zero(&s.negative_vector)),
            ("phased", &phases * householder_to_zero(&s.negative_vector)),
        ] {
            variants.push(VariantProbability {
                v: v_name,
                w: w_name,
                probability_00: computational_values(&wm, &s.tensor)?[0],
            });
        }
    }

    let start = bloch_from_hermitian(&HermitianOperator::new(basis_projector(0))?);
    let control = adjoint_transform(&bell_rotation())?.apply(&start)?;
    let control_min_probability = distribution_from_state(&control)?.min();

    let valid = state.min_eigenvalue < 0.0 && probability_00 < 0.0;
    Ok(NegativityCertificate {
        transposed_qubit: TRANSPOSED_QUBIT,
        w: complex_rows(&w),
        final_state: final_state.coeffs().iter().copied().collect(),
        probability_00,
        computational_basis,
        computational_sum: computational_basis.iter().sum(),
        variants,
        control_min_probability,
        valid,
        state,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TwinClosureReport {
    pub trials: u64,
    pub seed: u64,
    /// `max |RᵀR - I|` over `D R_V D`.
    pub max_orthogonality_defect: f64,
    pub max_determinant_defect: f64,
    /// `max |R(twin(V))  - D R_V D|`.
    pub max_lift_error: f64,
    /// `max |R(twin(V1 V2)) - R(twin(V1)) R(twin(V2))|`.
    pub max_composition_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn random_su2(seed: u64, index: u64) -> Matrix2<C64> {
    su2_from_quaternion(&unit_quaternion(&mut sample_rng(seed, Domain::Twin, index)))
}

/// For random `V ∈ SU(2)`, checks that `T R_V T` is a proper rotation and
/// that its SU(2) lift composes like `V`.
pub fn transpose_twin_closure_check(trials: u64, seed: u64) -> Result<TwinClosureReport> {
    if trials == 0 {
        return Err(crate::Error::InvalidArgument("trials must be at least 1".into()));
    }
    let d = transpose_reflection();
    let rows: Vec<Result<[f64; 4]>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let v1 = random_su2(seed, 2 * i);
            let v2 = random_su2(seed, 2 * i + 1);
            let reflected = d * rotation_of_unitary(&v1) * d;
            let (orth, det) = special_orthogonal_defect(&reflected);
            let t1 = local_unitary_transpose_twin(&v1)?;
            let t2 = local_unitary_transpose_twin(&v2)?;
            let t12 = local_unitary_transpose_twin(&(v1 * v2))?;
            let lift = (rotation_of_unitary(&t1) - reflected).abs().max();
            let comp = (rotation_of_unitary(&t12) - rotation_of_unitary(&t1) * rotation_of_unitary(&t2))
                .abs()
                .max();
            Ok([orth, (det - 1.0).abs(), lift, comp])
        })
        .collect();
    let mut max = [0.0f64; 4];
    for row in rows {
        for (m, v) in max.iter_mut().zip(row?) {
            *m = m.max(v);
        }
    }
    let tolerance = 1e-12;
    Ok(TwinClosureReport {
        trials,
        seed,
        max_orthogonality_defect: max[0],
        max_determinant_defect: max[1],
        max_lift_error: max[2],
        max_composition_error: max[3],
        tolerance,
        passed: max[0] <= tolerance && max[1] <= tolerance && max[2] <= 1e-10 && max[3] <= 1e-10,
    })
}
