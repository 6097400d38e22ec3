//! The single-qubit factor space `A ⊕ B ⊕ I`.
//!
//! `A_a` is the rotation generator about `a` restricted to the Bloch block,
//! `B_a` couples the identity component with the Bloch vector. Together with
//! the 4x4 identity the seven matrices `A_e1..3, B_e1..3, I` are mutually
//! orthogonal under `<M, N> = tr(Mᵀ N)`.

use crate::tensor::BlochVector3;
use crate::RMatrix;
use nalgebra::Matrix4;
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FactorKind {
    A,
    B,
    I,
}

pub fn a_matrix(a: &BlochVector3) -> Matrix4<f64> {
    let (a1, a2, a3) = (a.0.x, a.0.y, a.0.z);
    #[rustfmt::skip]
    let m = Matrix4::new(
        0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, a3, -a2,
        0.0, -a3, 0.0, a1,
        0.0, a2, -a1, 0.0,
    );
    m
}

pub fn b_matrix(a: &BlochVector3) -> Matrix4<f64> {
    let (a1, a2, a3) = (a.0.x, a.0.y, a.0.z);
    #[rustfmt::skip]
    let m = Matrix4::new(
        0.0, a1, a2, a3,
        a1, 0.0, 0.0, 0.0,
        a2, 0.0, 0.0, 0.0,
        a3, 0.0, 0.0, 0.0,
    );
    m
}

/// `A_a`, `B_a`, or the identity (which ignores `a`).
pub fn basis_matrix(kind: FactorKind, a: &BlochVector3) -> Matrix4<f64> {
    match kind {
        FactorKind::A => a_matrix(a),
        FactorKind::B => b_matrix(a),
        FactorKind::I => Matrix4::identity(),
    }
}

/// `E0 = A_e1`.
pub fn e0() -> Matrix4<f64> {
    a_matrix(&BlochVector3::e1())
}

/// `E1 = B_e1`.
pub fn e1() -> Matrix4<f64> {
    b_matrix(&BlochVector3::e1())
}

/// `E0` for bit 0, `E1` for bit 1.
pub fn e_matrix(bit: u8) -> Matrix4<f64> {
    if bit == 0 {
        e0()
    } else {
        e1()
    }
}

pub fn frobenius_inner(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    a.component_mul(b).sum()
}

/// One of the seven orthogonal basis matrices of `A ⊕ B ⊕ I`. Axes are
/// 0-based. The derived order (`A1 < A2 < A3 < B1 < .. < I`) is the
/// tie-break order used by the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorLabel {
    A(u8),
    B(u8),
    I,
}

impl FactorLabel {
    pub const ALL: [FactorLabel; 7] = [
        FactorLabel::A(0),
        FactorLabel::A(1),
        FactorLabel::A(2),
        FactorLabel::B(0),
        FactorLabel::B(1),
        FactorLabel::B(2),
        FactorLabel::I,
    ];

    pub fn index(self) -> usize {
        match self {
            FactorLabel::A(i) => i as usize,
            FactorLabel::B(i) => 3 + i as usize,
            FactorLabel::I => 6,
        }
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    pub fn kind(self) -> FactorKind {
        match self {
            FactorLabel::A(_) => FactorKind::A,
            FactorLabel::B(_) => FactorKind::B,
            FactorLabel::I => FactorKind::I,
        }
    }

    pub fn axis(self) -> Option<usize> {
        match self {
            FactorLabel::A(i) | FactorLabel::B(i) => Some(i as usize),
            FactorLabel::I => None,
        }
    }

    pub fn with_axis(kind: FactorKind, axis: usize) -> Self {
        match kind {
            FactorKind::A => FactorLabel::A(axis as u8),
            FactorKind::B => FactorLabel::B(axis as u8),
            FactorKind::I => FactorLabel::I,
        }
    }

    pub fn matrix(self) -> Matrix4<f64> {
        match self {
            FactorLabel::A(i) => a_matrix(&BlochVector3::axis(i as usize)),
            FactorLabel::B(i) => b_matrix(&BlochVector3::axis(i as usize)),
            FactorLabel::I => Matrix4::identity(),
        }
    }

    pub fn norm_sq(self) -> f64 {
        match self {
            FactorLabel::I => 4.0,
            _ => 2.0,
        }
    }
}

impl fmt::Display for FactorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorLabel::A(i) => write!(f, "A{}", i + 1),
            FactorLabel::B(i) => write!(f, "B{}", i + 1),
            FactorLabel::I => write!(f, "I"),
        }
    }
}

/// `F1 ⊗ .. ⊗ Fn` as a `4^n x 4^n` matrix.
pub fn kron_factors(factors: &[Matrix4<f64>]) -> RMatrix {
    factors.iter().fold(RMatrix::from_element(1, 1, 1.0), |acc, f| {
        acc.kronecker(&RMatrix::from_column_slice(4, 4, f.as_slice()))
    })
}
