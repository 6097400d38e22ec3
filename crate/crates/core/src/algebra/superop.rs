//! Bloch matrices of linear maps on operators.

use super::{GeneratorMatrix, TransformMatrix};
use crate::tensor::pauli::{pauli_traces, PauliString};
use crate::{check_qubits, CMatrix, Error, RMatrix, Result, C64, DEFAULT_TOLERANCE};

/// `H[β][α] = 2^-n Re tr(Pβ f(Pα))` for a linear map `f` on `2^n x 2^n`
/// operators. Imaginary parts are dropped; `f` should preserve hermiticity.
pub fn bloch_superoperator(n: usize, f: impl Fn(&CMatrix) -> CMatrix) -> RMatrix {
    let dim = 1usize << (2 * n);
    let scale = 1.0 / (1u64 << n) as f64;
    let mut out = RMatrix::zeros(dim, dim);
    for alpha in 0..dim {
        let image = f(&PauliString::from_flat(alpha, n).dense());
        for (beta, t) in pauli_traces(&image, n).into_iter().enumerate() {
            out[(beta, alpha)] = t.re * scale;
        }
    }
    out
}

/// Bloch matrix of `ρ ↦ [i (σγ1 ⊗ .. ⊗ σγn), ρ]`.
///
/// With this sign, `exp(t X)` equals `adjoint_transform(exp(i t P))` for
/// `P = σγ1 ⊗ .. ⊗ σγn`.
pub fn quantum_generator(gammas: &[u8]) -> Result<GeneratorMatrix> {
    let n = gammas.len();
    check_qubits(n)?;
    if let Some(g) = gammas.iter().find(|&&g| g > 3) {
        return Err(Error::InvalidArgument(format!("Pauli index must be 0..=3, got {g}")));
    }
    if gammas.iter().all(|&g| g == 0) {
        return Err(Error::InvalidArgument(
            "all-identity Pauli string generates nothing".into(),
        ));
    }
    let ip = PauliString::new(gammas).dense() * C64::new(0.0, 1.0);
    let matrix = bloch_superoperator(n, |rho| &ip * rho - rho * &ip);
    GeneratorMatrix::new(matrix)
}

pub(crate) fn unitary_defect(u: &CMatrix) -> f64 {
    let dim = u.nrows();
    (u.adjoint() * u - CMatrix::identity(dim, dim))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// `ρ ↦ U ρ U†` in the Bloch representation.
pub fn adjoint_transform(u: &CMatrix) -> Result<TransformMatrix> {
    if u.nrows() != u.ncols() || !u.nrows().is_power_of_two() || u.nrows() < 2 {
        return Err(Error::Shape(format!(
            "unitary is {}x{}, expected 2^n x 2^n",
            u.nrows(),
            u.ncols()
        )));
    }
    let n = u.nrows().trailing_zeros() as usize;
    check_qubits(n)?;
    let defect = unitary_defect(u);
    if defect > DEFAULT_TOLERANCE {
        return Err(Error::NotUnitary { defect });
    }
    let ud = u.adjoint();
    TransformMatrix::new(bloch_superoperator(n, |rho| u * rho * &ud))
}

/// `exp(t X)`.
pub fn exp_generator(x: &GeneratorMatrix, t: f64) -> TransformMatrix {
    let matrix = if t == 0.0 {
        RMatrix::identity(x.matrix().nrows(), x.matrix().ncols())
    } else {
        (x.matrix() * t).exp()
    };
    TransformMatrix::new(matrix).expect("exponential keeps the shape")
}

/// `T_k` on Bloch tensors: negates every coefficient whose `k`-th index is 2.
/// Qubits are 0-based.
pub fn partial_transpose_map(k: usize, n: usize) -> Result<TransformMatrix> {
    check_qubits(n)?;
    if k >= n {
        return Err(Error::InvalidArgument(format!("qubit {k} out of range for n = {n}")));
    }
    let dim = 1usize << (2 * n);
    let shift = 2 * (n - 1 - k);
    let diag = nalgebra::DVector::from_fn(dim, |alpha, _| if (alpha >> shift) & 3 == 2 { -1.0 } else { 1.0 });
    TransformMatrix::new(RMatrix::from_diagonal(&diag))
}

/// Partial transpose of a `2^n x 2^n` operator on qubit `k` (0-based).
pub fn partial_transpose_operator(m: &CMatrix, k: usize, n: usize) -> Result<CMatrix> {
    let dim = 1usize << n;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.nrows(),
        });
    }
    if k >= n {
        return Err(Error::InvalidArgument(format!("qubit {k} out of range for n = {n}")));
    }
    let bit = 1usize << (n - 1 - k);
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        let (rk, ck) = (r & bit, c & bit);
        m[((r & !bit) | ck, (c & !bit) | rk)]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::factor::{a_matrix, b_matrix, kron_factors};
    use crate::algebra::rotation::{axis_angle, rotation_of_unitary};
    use crate::rng::{sample_rng, Domain};
    use crate::tensor::pauli::pauli_string;
    use crate::tensor::{bloch_from_matrix, hermitian_from_bloch, product_vector, BlochTensor, BlochVector3};
    use nalgebra::{Matrix4, Vector3};
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// `exp(i t P)` for a Pauli string `P` (`P² = 1`).
    fn exp_i_pauli(gammas: &[u8], t: f64) -> CMatrix {
        let p = pauli_string(gammas);
        let dim = p.nrows();
        CMatrix::identity(dim, dim) * c(t.cos()) + p * C64::new(0.0, t.sin())
    }

    fn random_unitary(seed: u64, n: usize) -> CMatrix {
        let mut rng = sample_rng(seed, Domain::Matrices, 0);
        let dim = 1 << n;
        let g = CMatrix::from_fn(dim, dim, |_, _| {
            C64::new(crate::rng::normal(&mut rng), crate::rng::normal(&mut rng))
        });
        g.qr().q()
    }

    fn ax(i: usize) -> BlochVector3 {
        BlochVector3::axis(i)
    }

    #[test]
    fn quantum_generator_matches_w_ij_formula() {
        for i in 1..=3u8 {
            for j in 1..=3u8 {
                let x = quantum_generator(&[i, j]).unwrap();
                let a = |k: u8| a_matrix(&ax(k as usize - 1));
                let b = |k: u8| b_matrix(&ax(k as usize - 1));
                let expected = kron_factors(&[a(i), b(j)]) * 2.0 + kron_factors(&[b(i), a(j)]) * 2.0;
                assert!((x.matrix() - expected).abs().max() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn single_factor_generator_is_local_rotation() {
        for i in 1..=3u8 {
            let x = quantum_generator(&[i, 0]).unwrap();
            let expected = kron_factors(&[a_matrix(&ax(i as usize - 1)), Matrix4::identity()]) * 2.0;
            assert!((x.matrix() - expected).abs().max() < 1e-14);
        }
        let x = quantum_generator(&[1]).unwrap();
        assert_eq!(x.matrix()[(2, 3)], 2.0);
        assert_eq!(x.matrix()[(3, 2)], -2.0);
    }

    #[test]
    fn rejects_identity_and_bad_indices() {
        assert!(quantum_generator(&[0, 0]).is_err());
        assert!(quantum_generator(&[4, 0]).is_err());
        assert!(quantum_generator(&[]).is_err());
    }

    #[test]
    fn exponentiated_single_qubit_generator_is_rotation() {
        let h = exp_generator(&quantum_generator(&[1]).unwrap(), 0.37);
        let m = h.matrix();
        assert_eq!(m[(0, 0)], 1.0);
        let block = m.view((1, 1), (3, 3)).into_owned();
        let r = nalgebra::Matrix3::from_fn(|i, j| block[(i, j)]);
        let (defect, det) = crate::algebra::rotation::special_orthogonal_defect(&r);
        assert!(defect < 1e-14 && (det - 1.0).abs() < 1e-14);
    }

    #[test]
    fn generator_and_unitary_paths_agree() {
        for gammas in [[1u8, 1], [2, 3], [3, 0], [0, 2]] {
            for t in [PI / 4.0, 0.3, -1.2] {
                let via_exp = exp_generator(&quantum_generator(&gammas).unwrap(), t);
                let via_u = adjoint_transform(&exp_i_pauli(&gammas, t)).unwrap();
                assert!(
                    (via_exp.matrix() - via_u.matrix()).abs().max() < 1e-10,
                    "{gammas:?} {t}"
                );
            }
        }
    }

    #[test]
    fn b_b_eigenvector_grows_exponentially() {
        let x = GeneratorMatrix::from_factors(&[b_matrix(&ax(0)), b_matrix(&ax(0))])
            .unwrap()
            .scale(2.0);
        let v = product_vector(&[ax(0), ax(0)]).unwrap();
        for t in [0.1, 0.5, 1.0] {
            let out = exp_generator(&x, t).apply(&v).unwrap();
            let expected = v.coeffs() * (2.0 * t).exp();
            assert!((out.coeffs() - expected).abs().max() < 1e-12);
        }
    }

    #[test]
    fn semigroup_property() {
        for n in 1..=4 {
            let mut rng = sample_rng(3, Domain::Matrices, n as u64);
            let dim = 1 << (2 * n);
            let m = RMatrix::from_fn(dim, dim, |_, _| crate::rng::normal(&mut rng)) / (dim as f64).sqrt();
            let x = GeneratorMatrix::new(m).unwrap();
            let (s, t) = (0.4, 0.9);
            let lhs = exp_generator(&x, s + t);
            let rhs = exp_generator(&x, s).compose(&exp_generator(&x, t)).unwrap();
            let scale = lhs.matrix().abs().max().max(1.0);
            assert!((lhs.matrix() - rhs.matrix()).abs().max() / scale < 1e-10, "n={n}");
        }
        let x = quantum_generator(&[1, 2]).unwrap();
        assert_eq!(exp_generator(&x, 0.0).matrix(), &RMatrix::identity(16, 16));
    }

    #[test]
    fn adjoint_identity_and_z_rotation() {
        let h = adjoint_transform(&CMatrix::identity(4, 4)).unwrap();
        assert!((h.matrix() - RMatrix::identity(16, 16)).abs().max() < 1e-15);
        let theta = 0.8;
        let u = CMatrix::from_fn(2, 2, |i, j| {
            if i != j {
                c(0.0)
            } else if i == 0 {
                C64::new(0.0, -theta / 2.0).exp()
            } else {
                C64::new(0.0, theta / 2.0).exp()
            }
        });
        let h = adjoint_transform(&u).unwrap();
        let r = axis_angle(&Vector3::z(), theta);
        for i in 0..4 {
            for j in 0..4 {
                let expected = match (i, j) {
                    (0, 0) => 1.0,
                    (0, _) | (_, 0) => 0.0,
                    _ => r[(i - 1, j - 1)],
                };
                assert!((h.matrix()[(i, j)] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn entangling_unitary_produces_bell_tensor() {
        let h = 0.5f64.sqrt();
        // U|00> = (|00> + |11>)/√2, completed to a unitary
        let mut u = CMatrix::zeros(4, 4);
        u[(0, 0)] = c(h);
        u[(3, 0)] = c(h);
        u[(0, 3)] = c(-h);
        u[(3, 3)] = c(h);
        u[(1, 1)] = c(1.0);
        u[(2, 2)] = c(1.0);
        let ht = adjoint_transform(&u).unwrap();
        let r00 = product_vector(&[ax(2), ax(2)]).unwrap();
        let out = ht.apply(&r00).unwrap();
        // oracle: conjugate the 4x4 density matrix directly
        let rho = hermitian_from_bloch(&r00);
        let direct = bloch_from_matrix(&(&u * rho.matrix() * u.adjoint()), 1e-12).unwrap();
        assert!((out.coeffs() - direct.coeffs()).abs().max() < 1e-14);
        let mut bell = vec![0.0; 16];
        bell[0] = 1.0;
        bell[5] = 1.0;
        bell[10] = -1.0;
        bell[15] = 1.0;
        assert!((out.coeffs() - BlochTensor::new(bell).unwrap().coeffs()).abs().max() < 1e-14);
    }

    #[test]
    fn adjoint_is_a_homomorphism() {
        for n in 1..=3 {
            let u = random_unitary(10 + n as u64, n);
            let v = random_unitary(20 + n as u64, n);
            let huv = adjoint_transform(&(&u * &v)).unwrap();
            let hu_hv = adjoint_transform(&u)
                .unwrap()
                .compose(&adjoint_transform(&v).unwrap())
                .unwrap();
            assert!((huv.matrix() - hu_hv.matrix()).abs().max() < 1e-10);
        }
    }

    #[test]
    fn adjoint_rejects_non_unitary() {
        let m = CMatrix::identity(2, 2) * c(1.1);
        assert!(matches!(adjoint_transform(&m), Err(Error::NotUnitary { .. })));
        assert!(matches!(
            adjoint_transform(&CMatrix::identity(3, 3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn generator_images_close_under_commutators() {
        // [iP, iQ] for Pauli strings P, Q: commutator of the images equals the image
        // of the operator commutator, evaluated via bloch_superoperator
        let strings: Vec<[u8; 2]> = vec![[1, 1], [2, 3], [3, 0], [0, 2], [1, 2], [3, 3]];
        for p in &strings {
            for q in &strings {
                let xp = quantum_generator(p).unwrap();
                let xq = quantum_generator(q).unwrap();
                let lhs = xp.commutator(&xq).unwrap();
                let ip = pauli_string(p) * C64::new(0.0, 1.0);
                let iq = pauli_string(q) * C64::new(0.0, 1.0);
                let k = &ip * &iq - &iq * &ip;
                let rhs = bloch_superoperator(2, |rho| &k * rho - rho * &k);
                assert!((lhs.matrix() - rhs).abs().max() < 1e-10, "{p:?} {q:?}");
            }
        }
    }

    #[test]
    fn quantum_evolution_preserves_trace() {
        let x = quantum_generator(&[2, 3, 1]).unwrap();
        let h = exp_generator(&x, 0.77);
        assert!(h.is_trace_preserving(1e-12));
        let r = product_vector(&[ax(0), -ax(1), ax(2)]).unwrap();
        assert!((h.apply(&r).unwrap().leading() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_map_basics() {
        let t = partial_transpose_map(0, 1).unwrap();
        assert_eq!(
            t.matrix(),
            &RMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&[1.0, 1.0, -1.0, 1.0]))
        );
        let t2 = partial_transpose_map(1, 2).unwrap();
        assert_eq!(t2.compose(&t2).unwrap().matrix(), &RMatrix::identity(16, 16));
        let mut bell = vec![0.0; 16];
        bell[0] = 1.0;
        bell[5] = 1.0;
        bell[10] = -1.0;
        bell[15] = 1.0;
        let out = t2.apply(&BlochTensor::new(bell).unwrap()).unwrap();
        assert_eq!((out.coeffs()[5], out.coeffs()[10], out.coeffs()[15]), (1.0, 1.0, 1.0));
        assert!(partial_transpose_map(2, 2).is_err());
    }

    #[test]
    fn partial_transpose_map_matches_operator_transpose() {
        let mut rng = sample_rng(4, Domain::Matrices, 9);
        let m = crate::rng::random_hermitian(&mut rng, 3);
        let r = bloch_from_matrix(&m, 1e-12).unwrap();
        for k in 0..3 {
            let via_op = bloch_from_matrix(&partial_transpose_operator(&m, k, 3).unwrap(), 1e-12).unwrap();
            let via_map = partial_transpose_map(k, 3).unwrap().apply(&r).unwrap();
            assert!((via_op.coeffs() - via_map.coeffs()).abs().max() < 1e-12);
        }
        // oracle for the operator transpose itself: σ2ᵀ = -σ2 on a product
        let prod = pauli_string(&[2, 1]);
        let pt = partial_transpose_operator(&prod, 0, 2).unwrap();
        assert!((pt + pauli_string(&[2, 1])).norm() < 1e-15);
        let _ = rotation_of_unitary;
    }
}
