//! Classification of admissible non-local generators.
//!
//! A generator that passes the admissibility screen and is not local is
//! aligned by local rotations, reordered so its dominant pattern reads
//! `A..AB..BI..I`, projected factorwise onto `E^⊗m ⊗ I^⊗n_I` and reduced to
//! a coefficient table. The coefficient chain then either fails (the input
//! is inadmissible) or singles out a pair of qubits on which the generator
//! acts as `E0⊗E1 ± E1⊗E0` with the remaining qubits in `v(e1)`.

mod coefficients;
mod projectors;
mod signature;

pub use coefficients::{
    coefficient_constraints, extract_coefficients, CoefficientTable, ConstraintChain, ConstraintEvidence,
};
pub use projectors::{
    haar_crosscheck, haar_project, haar_project_e, project_e, project_i, random_factor_matrix, HaarCheckEntry,
    HaarCrosscheckReport, HaarEstimate, HaarSubgroup,
};
pub use signature::{local_align, support_signature, Alignment, SignatureOutcome, SupportSignature};

use crate::algebra::factor::{e0, e1, kron_factors};
use crate::algebra::modes::{apply_factorwise, factor_map_matrix};
use crate::algebra::{
    adjoint_transform, conjugate, exp_generator, partial_transpose_map, permute_qubits, GeneratorMatrix,
};
use crate::constraints::{
    first_order_check, local_membership, second_order_check, second_order_unchecked, ConstraintReport,
};
use crate::tensor::pauli::pauli_string;
use crate::tensor::BlochVector3;
use crate::{Error, RMatrix, Result, C64};
use nalgebra::{DVector, Vector4};
use rayon::prelude::*;
use serde::Serialize;

/// Largest register `classify_generator` accepts.
pub const MAX_CLASSIFY_QUBITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Local,
    QuantumEntanglerPlus,
    PartialTransposeEntanglerMinus,
    Inadmissible,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Local => "local",
            Verdict::QuantumEntanglerPlus => "quantum_entangler_plus",
            Verdict::PartialTransposeEntanglerMinus => "partial_transpose_entangler_minus",
            Verdict::Inadmissible => "inadmissible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyOptions {
    /// Relative tolerance, scaled by `‖X‖` or `‖X‖²` as appropriate.
    pub tol: f64,
    pub seed: u64,
    /// Random first- and second-order samples in the screen.
    pub samples: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            tol: 1e-9,
            seed: 0,
            samples: 1000,
        }
    }
}

/// Second-order values with `b = a`, over every signed-axis product state
/// and every constrained qubit.
#[derive(Debug, Clone, Serialize)]
pub struct AxisScreen {
    pub evaluations: u64,
    pub max_violation: f64,
    pub witness_a: Option<Vec<[f64; 3]>>,
    pub witness_qubit: Option<usize>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Screen {
    pub subspace_residual: f64,
    pub first_order: ConstraintReport,
    pub second_order_axes: AxisScreen,
    pub second_order_random: ConstraintReport,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InducedGenerator {
    /// Original qubit indices `(p, q)`; the first factor acts on `p`.
    pub qubits: [usize; 2],
    /// 16x16 rows of `Y / c_p` restricted to `r_pq ⊗ v(e1)^⊗(n-2)`.
    pub matrix: Vec<Vec<f64>>,
    /// `max |Z - (E0⊗E1 ± E1⊗E0)|`.
    pub deviation: f64,
    pub unitary: String,
    /// `max |exp(tZ) - unitary form|` at `t = 0.7`.
    pub unitary_check_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationResult {
    pub verdict: Verdict,
    pub n: usize,
    pub options: ClassifyOptions,
    pub screen: Screen,
    /// Local terms when the verdict is `local`.
    pub local_terms: Vec<(String, f64)>,
    pub nonlocal_norm: f64,
    pub signature: Option<SupportSignature>,
    pub alignment: Option<Alignment>,
    /// New position `p` holds old qubit `permutation[p]`.
    pub permutation: Vec<usize>,
    /// Entangled pair in original qubit indices.
    pub pair: Option<[usize; 2]>,
    pub pair_after_reordering: Option<[usize; 2]>,
    pub sign: Option<i8>,
    pub coefficients: Option<CoefficientTable>,
    pub constraint_evidence: Vec<ConstraintEvidence>,
    /// Norm of the aligned, reordered generator outside `E^⊗m ⊗ I^⊗n_I`.
    pub remainder_norm: Option<f64>,
    pub induced_generator_ref: Option<String>,
    pub induced_generator: Option<InducedGenerator>,
    /// Ids of violated constraints.
    pub violations: Vec<String>,
}

fn axis_screen(x: &GeneratorMatrix, tol: f64) -> AxisScreen {
    let n = x.n();
    let x2 = x.matrix() * x.matrix();
    let axes = [0usize, 1, 2]
        .iter()
        .flat_map(|&i| [BlochVector3::axis(i), BlochVector3(-BlochVector3::axis(i).0)]);
    let axes: Vec<BlochVector3> = axes.collect();
    let states = 6usize.pow(n as u32);
    let total = states * n;
    let violations: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let (s, k) = (idx / n, idx % n);
            let a = state_from_digits(&axes, s, n);
            let (off, diag) = second_order_unchecked(&x2, &a, &a, k);
            (-off).max(diag).max(0.0)
        })
        .collect();
    let max_violation = violations.iter().copied().fold(0.0, f64::max);
    let passed = max_violation <= tol;
    let worst = (!passed).then(|| violations.iter().position(|&v| v >= max_violation - 1e-12).unwrap_or(0));
    AxisScreen {
        evaluations: total as u64,
        max_violation,
        witness_a: worst.map(|idx| {
            state_from_digits(&axes, idx / n, n)
                .iter()
                .map(|v| [v.0.x, v.0.y, v.0.z])
                .collect()
        }),
        witness_qubit: worst.map(|idx| idx % n),
        passed,
    }
}

fn state_from_digits(axes: &[BlochVector3], mut s: usize, n: usize) -> Vec<BlochVector3> {
    let mut a = vec![axes[0]; n];
    for slot in a.iter_mut().rev() {
        *slot = axes[s % 6];
        s /= 6;
    }
    a
}

fn screen(x: &GeneratorMatrix, opts: &ClassifyOptions) -> Screen {
    let norm = x.frobenius_norm().max(1.0);
    let subspace_residual = crate::constraints::subspace_decompose(x).residual();
    let first_order = first_order_check(x, opts.samples, opts.seed, opts.tol * norm);
    let second_order_axes = axis_screen(x, opts.tol * norm * norm);
    let second_order_random = second_order_check(x, opts.samples, opts.seed, opts.tol * norm * norm);
    let passed = subspace_residual <= opts.tol * norm
        && first_order.passed
        && second_order_axes.passed
        && second_order_random.passed;
    Screen {
        subspace_residual,
        first_order,
        second_order_axes,
        second_order_random,
        passed,
    }
}

fn kron_vectors(vs: &[Vector4<f64>]) -> DVector<f64> {
    let mut out = DVector::from_element(1, 1.0);
    for v in vs {
        out = out.kronecker(v);
    }
    out
}

/// `Z[β][α] = ⟨e_β ⊗ σ, Y (e_α ⊗ σ)⟩ / (2^(n-2) c_p)` with the pair `(p, q)`
/// carrying `e_α`, `e_β` and every other qubit `σ = v(e1)`.
fn induced_two_qubit(y: &GeneratorMatrix, p: usize, q: usize, c_p: f64) -> RMatrix {
    let n = y.n();
    let sigma = Vector4::new(1.0, 1.0, 0.0, 0.0);
    let embed = |alpha: usize| {
        let factors: Vec<Vector4<f64>> = (0..n)
            .map(|k| {
                if k == p {
                    Vector4::ith(alpha / 4, 1.0)
                } else if k == q {
                    Vector4::ith(alpha % 4, 1.0)
                } else {
                    sigma
                }
            })
            .collect();
        kron_vectors(&factors)
    };
    let norm = (1u64 << (n - 2)) as f64;
    let basis: Vec<DVector<f64>> = (0..16).map(embed).collect();
    RMatrix::from_fn(16, 16, |beta, alpha| {
        basis[beta].dot(&(y.matrix() * &basis[alpha])) / (norm * c_p)
    })
}

fn expected_pair_generator(sign: i8) -> RMatrix {
    kron_factors(&[e0(), e1()]) + kron_factors(&[e1(), e0()]) * sign as f64
}

/// `max |exp(tZ) - ad_U|` (plus) or `max |exp(tZ) - T1 ad_U T1|` (minus) at
/// `t = 0.7`, with `U = exp(±i t/2 σ1⊗σ1)`.
fn unitary_check(z: &RMatrix, sign: i8) -> Result<f64> {
    let t: f64 = 0.7;
    let s = if sign > 0 { t / 2.0 } else { -t / 2.0 };
    let p = pauli_string(&[1, 1]);
    let u = crate::CMatrix::identity(4, 4) * C64::new(s.cos(), 0.0) + p * C64::new(0.0, s.sin());
    let mut target = adjoint_transform(&u)?;
    if sign < 0 {
        let tp = partial_transpose_map(0, 2)?;
        target = tp.compose(&target)?.compose(&tp)?;
    }
    let lhs = exp_generator(&GeneratorMatrix::new(z.clone())?, t);
    Ok((lhs.matrix() - target.matrix()).abs().max())
}

fn unitary_text(sign: i8, p: usize, q: usize) -> String {
    if sign > 0 {
        format!("exp(tZ) = ad_U, U = exp(i (t/2) σ1⊗σ1) on qubits ({p}, {q})")
    } else {
        format!("exp(tZ) = T_{p} ∘ ad_U ∘ T_{p}, U = exp(-i (t/2) σ1⊗σ1) on qubits ({p}, {q})")
    }
}

/// Runs the full pipeline with default options.
pub fn classify_generator(x: &GeneratorMatrix) -> Result<ClassificationResult> {
    classify_generator_with(x, &ClassifyOptions::default())
}

pub fn classify_generator_with(x: &GeneratorMatrix, opts: &ClassifyOptions) -> Result<ClassificationResult> {
    let n = x.n();
    if n > MAX_CLASSIFY_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "classification supports up to {MAX_CLASSIFY_QUBITS} qubits, got {n}"
        )));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let norm = x.frobenius_norm().max(1.0);
    let screen = screen(x, opts);
    let membership = local_membership(x, opts.tol * norm);
    let mut result = ClassificationResult {
        verdict: Verdict::Inadmissible,
        n,
        options: *opts,
        screen: screen.clone(),
        local_terms: membership.local_terms.clone(),
        nonlocal_norm: membership.nonlocal_norm,
        signature: None,
        alignment: None,
        permutation: (0..n).collect(),
        pair: None,
        pair_after_reordering: None,
        sign: None,
        coefficients: None,
        constraint_evidence: Vec::new(),
        remainder_norm: None,
        induced_generator_ref: None,
        induced_generator: None,
        violations: Vec::new(),
    };
    let screen_items = [
        (
            "screen.subspace",
            screen.subspace_residual,
            screen.subspace_residual <= opts.tol * norm,
        ),
        (
            "screen.first_order",
            screen.first_order.max_violation,
            screen.first_order.passed,
        ),
        (
            "screen.second_order_axes",
            screen.second_order_axes.max_violation,
            screen.second_order_axes.passed,
        ),
        (
            "screen.second_order_random",
            screen.second_order_random.max_violation,
            screen.second_order_random.passed,
        ),
    ];
    for (id, value, satisfied) in screen_items {
        result.constraint_evidence.push(ConstraintEvidence {
            id: id.into(),
            value,
            satisfied,
        });
    }
    if !screen.passed {
        return Ok(finish(result));
    }
    if membership.is_local {
        result.verdict = Verdict::Local;
        return Ok(finish(result));
    }

    let signature = match support_signature(x, opts.tol)? {
        SignatureOutcome::Nonlocal(s) => s,
        SignatureOutcome::Local => {
            result.verdict = Verdict::Local;
            return Ok(finish(result));
        }
    };
    let alignment = local_align(x, &signature)?;
    let aligned = conjugate(&alignment.transform, x)?;
    let reordered = permute_qubits(&aligned, &signature.permutation)?;
    let (m, n_i) = (signature.m, signature.n_i);
    let pe = factor_map_matrix(project_e);
    let pi = factor_map_matrix(project_i);
    let maps: Vec<RMatrix> = (0..n).map(|k| if k < m { pe.clone() } else { pi.clone() }).collect();
    let y = GeneratorMatrix::new(apply_factorwise(reordered.matrix(), n, &maps))?;
    result.remainder_norm = Some((reordered.matrix() - y.matrix()).norm());
    result.permutation = signature.permutation.clone();
    let table = extract_coefficients(&y, m, opts.tol)?;
    debug_assert_eq!(table.n_i(), n_i);
    let chain = coefficient_constraints(&table, opts.tol)?;
    result.constraint_evidence.extend(chain.evidence.iter().cloned());
    result.coefficients = Some(table);
    result.signature = Some(signature.clone());
    result.alignment = Some(alignment);

    if let (true, Some((p, q)), Some(sign), Some(c_p)) = (chain.consistent, chain.pair, chain.sign, chain.c_p) {
        let original = [signature.permutation[p], signature.permutation[q]];
        let z = induced_two_qubit(&y, p, q, c_p);
        let deviation = (&z - expected_pair_generator(sign)).abs().max();
        let unitary_check_error = unitary_check(&z, sign)?;
        result.verdict = if sign > 0 {
            Verdict::QuantumEntanglerPlus
        } else {
            Verdict::PartialTransposeEntanglerMinus
        };
        result.pair = Some(original);
        result.pair_after_reordering = Some([p, q]);
        result.sign = Some(sign);
        result.induced_generator_ref = Some(format!(
            "A1⊗B1 {} B1⊗A1 on qubits ({}, {}), others in v(e1)",
            if sign > 0 { "+" } else { "-" },
            original[0],
            original[1]
        ));
        result.induced_generator = Some(InducedGenerator {
            qubits: original,
            matrix: z.row_iter().map(|r| r.iter().copied().collect()).collect(),
            deviation,
            unitary: unitary_text(sign, original[0], original[1]),
            unitary_check_error,
        });
    }
    Ok(finish(result))
}

fn finish(mut result: ClassificationResult) -> ClassificationResult {
    result.violations = result
        .constraint_evidence
        .iter()
        .filter(|e| !e.satisfied)
        .map(|e| e.id.clone())
        .collect();
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::factor::{a_matrix, b_matrix};
    use crate::algebra::{local_transform, quantum_generator};
    use crate::rng::{haar_rotation, sample_rng, Domain};
    use nalgebra::{Matrix3, Matrix4};

    fn minus_seed(n: usize) -> GeneratorMatrix {
        let mut gammas = vec![0u8; n];
        gammas[0] = 1;
        gammas[1] = 1;
        let q = quantum_generator(&gammas).unwrap();
        let t = partial_transpose_map(0, n).unwrap();
        GeneratorMatrix::new(t.matrix() * q.matrix() * t.matrix()).unwrap()
    }

    fn random_conjugate(x: &GeneratorMatrix, seed: u64, i: u64) -> GeneratorMatrix {
        let mut rng = sample_rng(seed, Domain::Matrices, i);
        let rs: Vec<Matrix3<f64>> = (0..x.n()).map(|_| haar_rotation(&mut rng)).collect();
        conjugate(&local_transform(&rs).unwrap(), x).unwrap()
    }

    #[test]
    fn quantum_generator_is_plus() {
        let r = classify_generator(&quantum_generator(&[1, 1]).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::QuantumEntanglerPlus, "{:?}", r.violations);
        assert_eq!(r.pair, Some([0, 1]));
        assert_eq!(r.sign, Some(1));
        let ig = r.induced_generator.unwrap();
        assert!(ig.deviation < 1e-12);
        assert!(ig.unitary_check_error < 1e-10);
    }

    #[test]
    fn minus_seed_matches_the_transposed_form() {
        let r = classify_generator(&minus_seed(2)).unwrap();
        assert_eq!(r.verdict, Verdict::PartialTransposeEntanglerMinus, "{:?}", r.violations);
        let ig = r.induced_generator.unwrap();
        let z = RMatrix::from_fn(16, 16, |i, j| ig.matrix[i][j]);
        let t1 = partial_transpose_map(0, 2).unwrap();
        let q = quantum_generator(&[1, 1]).unwrap().scale(0.5);
        let expected = -(t1.matrix() * q.matrix() * t1.matrix());
        assert!((z - expected).abs().max() < 1e-12);
        assert!(ig.unitary_check_error < 1e-10);
    }

    #[test]
    fn local_examples() {
        let x = GeneratorMatrix::from_factors(&[a_matrix(&BlochVector3::e3()), Matrix4::identity()])
            .unwrap()
            .add(&GeneratorMatrix::from_factors(&[Matrix4::identity(), a_matrix(&BlochVector3::e2())]).unwrap())
            .unwrap()
            .scale(2.0);
        let r = classify_generator(&x).unwrap();
        assert_eq!(r.verdict, Verdict::Local);
        assert_eq!(r.local_terms.len(), 2);
    }

    #[test]
    fn b_b_is_inadmissible_with_a_witness() {
        let b = b_matrix(&BlochVector3::e1());
        let x = GeneratorMatrix::from_factors(&[b, b]).unwrap();
        let r = classify_generator(&x).unwrap();
        assert_eq!(r.verdict, Verdict::Inadmissible);
        assert!(!r.violations.is_empty());
        assert!(r.screen.second_order_axes.witness_a.is_some());
    }

    #[test]
    fn idle_qubit_and_permutation() {
        let x = quantum_generator(&[0, 1, 1]).unwrap();
        let r = classify_generator(&x).unwrap();
        assert_eq!(r.verdict, Verdict::QuantumEntanglerPlus);
        let mut pair = r.pair.unwrap();
        pair.sort();
        assert_eq!(pair, [1, 2]);
        let m = permute_qubits(&minus_seed(3), &[2, 0, 1]).unwrap();
        let r = classify_generator(&m).unwrap();
        assert_eq!(r.verdict, Verdict::PartialTransposeEntanglerMinus);
        let mut pair = r.pair.unwrap();
        pair.sort();
        assert_eq!(pair, [1, 2]);
    }

    #[test]
    fn verdict_survives_random_local_conjugation() {
        for i in 0..10 {
            let plus = random_conjugate(&quantum_generator(&[1, 1]).unwrap(), 3, i);
            assert_eq!(
                classify_generator(&plus).unwrap().verdict,
                Verdict::QuantumEntanglerPlus,
                "plus {i}"
            );
            let minus = random_conjugate(&minus_seed(3), 4, i);
            let r = classify_generator(&minus).unwrap();
            assert_eq!(
                r.verdict,
                Verdict::PartialTransposeEntanglerMinus,
                "minus {i}: {:?}",
                r.violations
            );
            assert!(r.induced_generator.unwrap().deviation < 1e-9);
        }
    }

    #[test]
    fn result_serializes() {
        let r = classify_generator(&quantum_generator(&[1, 1]).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "quantum_entangler_plus");
        assert_eq!(v["coefficients"]["01"], 2.0);
        assert!(v["constraint_evidence"].as_array().unwrap().len() > 4);
    }
}
