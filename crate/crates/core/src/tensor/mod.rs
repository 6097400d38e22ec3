//! Hermitian-operator and Bloch-tensor representations of multi-qubit
//! states, product states and effects, outcome probabilities, and the
//! no-signalling check.
//!
//! Operators are never required to be positive: witnesses of entanglement
//! are valid inputs everywhere in this module.

mod distribution;
pub mod pauli;

pub use distribution::{
    check_no_signalling, distribution_from_state, NoSignallingReport, NoSignallingWitness, OutcomeDistribution,
};

use crate::algebra::TransformMatrix;
use crate::{check_qubits, CMatrix, Error, Result, DEFAULT_TOLERANCE};
use nalgebra::{DVector, Vector3, Vector4};
use pauli::{pauli_combination, pauli_traces};
use std::ops::Neg;

/// A single-qubit Bloch vector (a state when `|a| <= 1`, pure when `|a| = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector3(pub Vector3<f64>);

impl BlochVector3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    /// Unit vector along axis `i` (0-based: `axis(0)` is `e1`).
    pub fn axis(i: usize) -> Self {
        let mut v = Vector3::zeros();
        v[i] = 1.0;
        Self(v)
    }

    pub fn e1() -> Self {
        Self::axis(0)
    }

    pub fn e2() -> Self {
        Self::axis(1)
    }

    pub fn e3() -> Self {
        Self::axis(2)
    }

    pub fn zero() -> Self {
        Self(Vector3::zeros())
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// The single-qubit factor `(1, a)` of a product vector.
    pub fn extended(&self) -> Vector4<f64> {
        Vector4::new(1.0, self.0.x, self.0.y, self.0.z)
    }
}

impl Neg for BlochVector3 {
    type Output = Self;

    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl From<[f64; 3]> for BlochVector3 {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

fn qubits_for_len(len: usize, radix_bits: u32) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() || !len.trailing_zeros().is_multiple_of(radix_bits) {
        return Err(Error::Shape(format!(
            "length {len} is not a positive power of {}",
            1u32 << radix_bits
        )));
    }
    Ok((len.trailing_zeros() / radix_bits) as usize)
}

/// Real coefficients `r[α1..αn]` over the Pauli product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochTensor {
    n: usize,
    coeffs: DVector<f64>,
}

impl BlochTensor {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let n = qubits_for_len(coeffs.len(), 2)?;
        Ok(Self {
            n,
            coeffs: DVector::from_vec(coeffs),
        })
    }

    pub fn from_vector(coeffs: DVector<f64>) -> Result<Self> {
        let n = qubits_for_len(coeffs.len(), 2)?;
        Ok(Self { n, coeffs })
    }

    /// `(1, 0, 0, 0)^⊗n`, the maximally mixed state.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let mut coeffs = DVector::zeros(1 << (2 * n));
        coeffs[0] = 1.0;
        Ok(Self { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.coeffs
    }

    pub fn get(&self, alphas: &[u8]) -> f64 {
        self.coeffs[pauli::flat_index(alphas, 4)]
    }

    /// `r[0..0]`, which equals the trace of the operator.
    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.leading() - 1.0).abs() <= tol
    }
}

/// A `2^n x 2^n` Hermitian matrix; positivity is not required.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    n: usize,
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(matrix: CMatrix, tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Shape(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n = qubits_for_len(matrix.nrows(), 1)?;
        let defect = hermiticity_defect(&matrix);
        if defect > tol {
            return Err(Error::Representation(format!(
                "matrix is not Hermitian (max |M - M†| = {defect:e}, tolerance {tol:e})"
            )));
        }
        Ok(Self { n, matrix })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

pub(crate) fn hermiticity_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `r[α] = tr((σα1 ⊗ .. ⊗ σαn) ρ)`.
pub fn bloch_from_hermitian(op: &HermitianOperator) -> BlochTensor {
    let coeffs: Vec<f64> = pauli_traces(&op.matrix, op.n).iter().map(|z| z.re).collect();
    BlochTensor {
        n: op.n,
        coeffs: DVector::from_vec(coeffs),
    }
}

/// Validating entry point for raw matrices.
pub fn bloch_from_matrix(matrix: &CMatrix, tol: f64) -> Result<BlochTensor> {
    Ok(bloch_from_hermitian(&HermitianOperator::with_tolerance(
        matrix.clone(),
        tol,
    )?))
}

/// `ρ = 2^-n Σα r[α] σα1 ⊗ .. ⊗ σαn`.
pub fn hermitian_from_bloch(r: &BlochTensor) -> HermitianOperator {
    let scale = 1.0 / (1u64 << r.n) as f64;
    let scaled: Vec<f64> = r.coeffs.iter().map(|c| c * scale).collect();
    let mut matrix = pauli_combination(&scaled, r.n);
    // symmetrise away rounding so the result is Hermitian bit-for-bit
    let adj = matrix.adjoint();
    matrix = (matrix + adj).scale(0.5);
    HermitianOperator { n: r.n, matrix }
}

/// `⊗k (1, ak)` without norm checks.
pub(crate) fn product_coeffs(vectors: &[Vector3<f64>]) -> DVector<f64> {
    let mut out = DVector::from_element(1, 1.0);
    for a in vectors {
        let f = DVector::from_column_slice(&[1.0, a.x, a.y, a.z]);
        out = out.kronecker(&f);
    }
    out
}

fn check_ball(blochs: &[BlochVector3], tol: f64) -> Result<()> {
    for b in blochs {
        if b.norm() > 1.0 + tol {
            return Err(Error::BlochNorm {
                norm: b.norm(),
                expected: "<= 1",
            });
        }
    }
    Ok(())
}

pub(crate) fn check_unit(blochs: &[BlochVector3], tol: f64) -> Result<()> {
    for b in blochs {
        if !b.is_pure(tol) {
            return Err(Error::BlochNorm {
                norm: b.norm(),
                expected: "= 1",
            });
        }
    }
    Ok(())
}

/// Which Bloch vectors a product constructor accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormPolicy {
    /// `|a| <= 1`: any single-qubit state.
    #[default]
    Ball,
    /// `|a| = 1`: pure states only, as the constraint vectors require.
    Unit,
}

/// `v(a1, .., an) = (1, a1) ⊗ .. ⊗ (1, an)`.
pub fn product_vector(blochs: &[BlochVector3]) -> Result<BlochTensor> {
    product_vector_with(blochs, NormPolicy::Ball)
}

pub fn product_vector_with(blochs: &[BlochVector3], policy: NormPolicy) -> Result<BlochTensor> {
    check_qubits(blochs.len())?;
    match policy {
        NormPolicy::Ball => check_ball(blochs, DEFAULT_TOLERANCE)?,
        NormPolicy::Unit => check_unit(blochs, DEFAULT_TOLERANCE)?,
    }
    let vs: Vec<Vector3<f64>> = blochs.iter().map(|b| b.0).collect();
    Ok(BlochTensor {
        n: blochs.len(),
        coeffs: product_coeffs(&vs),
    })
}

/// A measurement effect `p`; the outcome probability on state `r` is `pᵀ r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    n: usize,
    coeffs: DVector<f64>,
}

impl Effect {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let n = qubits_for_len(coeffs.len(), 2)?;
        Ok(Self {
            n,
            coeffs: DVector::from_vec(coeffs),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }
}

/// `2^-n v(b1, .., bn)`.
pub fn product_effect(blochs: &[BlochVector3]) -> Result<Effect> {
    let v = product_vector(blochs)?;
    let scale = 1.0 / (1u64 << v.n) as f64;
    Ok(Effect {
        n: v.n,
        coeffs: v.coeffs * scale,
    })
}

/// `pᵀ H r`, with `H` the identity when absent. Values are not clamped.
pub fn outcome_probability(p: &Effect, h: Option<&TransformMatrix>, r: &BlochTensor) -> Result<f64> {
    if p.n != r.n {
        return Err(Error::DimensionMismatch {
            expected: p.coeffs.len(),
            found: r.coeffs.len(),
        });
    }
    match h {
        None => Ok(p.coeffs.dot(&r.coeffs)),
        Some(h) => {
            if h.n() != r.n {
                return Err(Error::DimensionMismatch {
                    expected: r.coeffs.len(),
                    found: h.matrix().nrows(),
                });
            }
            Ok(p.coeffs.dot(&(h.matrix() * &r.coeffs)))
        }
    }
}
