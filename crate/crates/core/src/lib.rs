//! Numerical laboratory for "locally quantum" theories of `n` qubits.
//!
//! States, effects and transformations are handled in the multi-qubit Bloch
//! representation: a state is the real tensor `r[α1..αn] = tr((σα1 ⊗ .. ⊗ σαn) ρ)`
//! and a transformation is a real `4^n x 4^n` matrix acting on it. On top of
//! that the crate checks candidate interaction generators against the
//! admissibility constraints that product states and product effects impose,
//! classifies admissible entangling generators into the quantum branch
//! (`ad_U`) and the partial-transpose branch (`T ∘ ad_U ∘ T`), and certifies
//! that the latter produces negative probabilities.
//!
//! Conventions used everywhere:
//!
//! * Pauli matrices `σ0 = I`, `σ1 = X`, `σ2 = Y` (entries `∓i`), `σ3 = Z`.
//! * Multi-indices are row-major with qubit 0 slowest, both for Bloch
//!   tensors (`α = Σ αk 4^(n-1-k)`) and for computational basis states
//!   (qubit 0 is the most significant bit).
//! * Qubits are numbered from 0 in the API.
//! * Measurement outcomes are labelled `+1` / `-1`.

pub mod algebra;
pub mod classify;
pub mod cli;
pub mod constraints;
pub mod demos;
pub mod error;
pub mod io;
pub mod rng;
pub mod tensor;

pub use error::{Error, Result};

use nalgebra::{Complex, DMatrix};

pub type C64 = Complex<f64>;
/// Dense complex matrix (operators on `2^n`-dimensional Hilbert space).
pub type CMatrix = DMatrix<C64>;
/// Dense real matrix (generators and transforms on Bloch tensors).
pub type RMatrix = DMatrix<f64>;

/// Default tolerance for hermiticity, unitarity and round-trip checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Largest qubit count the dense representation is meant for.
pub const MAX_QUBITS: usize = 6;

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "qubit count must be in 1..={MAX_QUBITS}, got {n}"
        )));
    }
    Ok(())
}
