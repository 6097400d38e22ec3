//! Pauli strings and multi-index bookkeeping.

use crate::{CMatrix, C64};
use nalgebra::Matrix2;

/// Single-qubit Pauli matrix `σα`, `α ∈ {0,1,2,3}`.
pub fn pauli(alpha: u8) -> Matrix2<C64> {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match alpha {
        0 => Matrix2::new(l, o, o, l),
        1 => Matrix2::new(o, l, l, o),
        2 => Matrix2::new(o, -i, i, o),
        3 => Matrix2::new(l, o, o, -l),
        _ => panic!("Pauli index must be 0..=3, got {alpha}"),
    }
}

/// Matrix element `<row|σα|col>` for single bits.
#[inline]
fn element(alpha: u8, row: usize, col: usize) -> C64 {
    let (re, im) = match (alpha, row, col) {
        (0, 0, 0) | (0, 1, 1) => (1.0, 0.0),
        (1, 0, 1) | (1, 1, 0) => (1.0, 0.0),
        (2, 0, 1) => (0.0, -1.0),
        (2, 1, 0) => (0.0, 1.0),
        (3, 0, 0) => (1.0, 0.0),
        (3, 1, 1) => (-1.0, 0.0),
        _ => (0.0, 0.0),
    };
    C64::new(re, im)
}

/// Digits of a row-major multi-index with qubit 0 slowest.
pub fn multi_index(flat: usize, n: usize, radix: usize) -> Vec<u8> {
    let mut digits = vec![0u8; n];
    let mut rest = flat;
    for k in (0..n).rev() {
        digits[k] = (rest % radix) as u8;
        rest /= radix;
    }
    digits
}

pub fn flat_index(digits: &[u8], radix: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * radix + d as usize)
}

/// A Pauli string `σα1 ⊗ .. ⊗ σαn` in sparse form: it maps `|col>` to
/// `phase(row) |row>` with `col = row ^ flip`.
#[derive(Debug, Clone)]
pub(crate) struct PauliString {
    alphas: Vec<u8>,
    flip: usize,
}

impl PauliString {
    pub(crate) fn new(alphas: &[u8]) -> Self {
        let n = alphas.len();
        let flip = alphas
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == 1 || a == 2)
            .fold(0usize, |acc, (k, _)| acc | 1 << (n - 1 - k));
        Self {
            alphas: alphas.to_vec(),
            flip,
        }
    }

    pub(crate) fn from_flat(flat: usize, n: usize) -> Self {
        Self::new(&multi_index(flat, n, 4))
    }

    /// Column holding the single non-zero entry of `row`, and that entry.
    #[inline]
    pub(crate) fn row_entry(&self, row: usize) -> (usize, C64) {
        let n = self.alphas.len();
        let col = row ^ self.flip;
        let mut value = C64::new(1.0, 0.0);
        for (k, &a) in self.alphas.iter().enumerate() {
            let shift = n - 1 - k;
            value *= element(a, (row >> shift) & 1, (col >> shift) & 1);
        }
        (col, value)
    }

    pub(crate) fn dense(&self) -> CMatrix {
        let dim = 1usize << self.alphas.len();
        let mut m = CMatrix::zeros(dim, dim);
        for row in 0..dim {
            let (col, v) = self.row_entry(row);
            m[(row, col)] = v;
        }
        m
    }
}

/// Dense `σα1 ⊗ .. ⊗ σαn`.
pub fn pauli_string(alphas: &[u8]) -> CMatrix {
    PauliString::new(alphas).dense()
}

/// `tr(Pα M)` for every Pauli string `Pα`, in multi-index order.
pub(crate) fn pauli_traces(m: &CMatrix, n: usize) -> Vec<C64> {
    let dim = 1usize << n;
    debug_assert_eq!(m.nrows(), dim);
    (0..1usize << (2 * n))
        .map(|flat| {
            let p = PauliString::from_flat(flat, n);
            // tr(P M) = Σ_row P[row, col] M[col, row]
            (0..dim)
                .map(|row| {
                    let (col, v) = p.row_entry(row);
                    v * m[(col, row)]
                })
                .sum()
        })
        .collect()
}

/// `Σα cα Pα` for real coefficients in multi-index order.
pub(crate) fn pauli_combination(coeffs: &[f64], n: usize) -> CMatrix {
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for (flat, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let p = PauliString::from_flat(flat, n);
        for row in 0..dim {
            let (col, v) = p.row_entry(row);
            m[(row, col)] += v * c;
        }
    }
    m
}
