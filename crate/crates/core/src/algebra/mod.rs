//! Generators and transformations in the Bloch representation.

pub mod factor;
pub mod local;
pub(crate) mod modes;
pub mod rotation;
pub mod superop;

pub use factor::{a_matrix, b_matrix, basis_matrix, e0, e1, FactorKind, FactorLabel};
pub use local::{conjugate, local_transform, permute_qubits, qubit_permutation};
pub use rotation::local_unitary_transpose_twin;
pub use superop::{
    adjoint_transform, bloch_superoperator, exp_generator, partial_transpose_map, partial_transpose_operator,
    quantum_generator,
};

use crate::tensor::BlochTensor;
use crate::{Error, RMatrix, Result};
use nalgebra::Matrix4;

fn qubits_of_dim(dim: usize) -> Result<usize> {
    let mut n = 0;
    while (1usize << (2 * n)) < dim {
        n += 1;
    }
    if n == 0 || 1usize << (2 * n) != dim {
        return Err(Error::Shape(format!("matrix dimension {dim} is not 4^n with n >= 1")));
    }
    Ok(n)
}

fn check_square(m: &RMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Representation("matrix has non-finite entries".into()));
    }
    qubits_of_dim(m.nrows())
}

/// A Lie-algebra element `X` acting on `4^n`-dimensional Bloch tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    n: usize,
    matrix: RMatrix,
}

impl GeneratorMatrix {
    pub fn new(matrix: RMatrix) -> Result<Self> {
        let n = check_square(&matrix)?;
        Ok(Self { n, matrix })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        crate::check_qubits(n)?;
        let dim = 1 << (2 * n);
        Ok(Self {
            n,
            matrix: RMatrix::zeros(dim, dim),
        })
    }

    /// `F1 ⊗ .. ⊗ Fn`.
    pub fn from_factors(factors: &[Matrix4<f64>]) -> Result<Self> {
        crate::check_qubits(factors.len())?;
        Ok(Self {
            n: factors.len(),
            matrix: factor::kron_factors(factors),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RMatrix {
        self.matrix
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            matrix: &self.matrix * s,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        Ok(Self {
            n: self.n,
            matrix: &self.matrix + &other.matrix,
        })
    }

    /// `[X, Y] = XY - YX`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        Ok(Self {
            n: self.n,
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    fn same_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

/// A group element `H` acting on Bloch tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    n: usize,
    matrix: RMatrix,
}

impl TransformMatrix {
    /// Checks shape only; invertibility is checked where it matters.
    pub fn new(matrix: RMatrix) -> Result<Self> {
        let n = check_square(&matrix)?;
        Ok(Self { n, matrix })
    }

    pub fn identity(n: usize) -> Result<Self> {
        crate::check_qubits(n)?;
        let dim = 1 << (2 * n);
        Ok(Self {
            n,
            matrix: RMatrix::identity(dim, dim),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RMatrix {
        self.matrix
    }

    pub fn apply(&self, r: &BlochTensor) -> Result<BlochTensor> {
        if r.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: r.n(),
            });
        }
        BlochTensor::from_vector(&self.matrix * r.coeffs())
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(Self {
            n: self.n,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = self.matrix.clone().lu();
        let inv = lu.try_inverse().ok_or(Error::Singular)?;
        if inv.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular);
        }
        Ok(Self { n: self.n, matrix: inv })
    }

    /// First row equals the first unit row, so `r[0..0]` is preserved.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.matrix
            .row(0)
            .iter()
            .enumerate()
            .all(|(j, &v)| (v - if j == 0 { 1.0 } else { 0.0 }).abs() <= tol)
    }
}
