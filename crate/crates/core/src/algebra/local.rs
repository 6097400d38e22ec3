//! The local group: products of single-qubit rotations, conjugation, and
//! qubit relabelling.

use super::rotation::check_special_orthogonal;
use super::{GeneratorMatrix, TransformMatrix};
use crate::{check_qubits, Error, RMatrix, Result, DEFAULT_TOLERANCE};
use nalgebra::{Matrix3, Matrix4};

/// `1 ⊕ R`.
pub fn rotation_block(r: &Matrix3<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(1, 1).copy_from(r);
    m
}

/// `(1 ⊕ R1) ⊗ .. ⊗ (1 ⊕ Rn)`.
pub fn local_transform(rotations: &[Matrix3<f64>]) -> Result<TransformMatrix> {
    check_qubits(rotations.len())?;
    for r in rotations {
        check_special_orthogonal(r, DEFAULT_TOLERANCE)?;
    }
    let blocks: Vec<Matrix4<f64>> = rotations.iter().map(rotation_block).collect();
    TransformMatrix::new(super::factor::kron_factors(&blocks))
}

/// `H X H⁻¹`.
pub fn conjugate(h: &TransformMatrix, x: &GeneratorMatrix) -> Result<GeneratorMatrix> {
    if h.n() != x.n() {
        return Err(Error::DimensionMismatch {
            expected: h.n(),
            found: x.n(),
        });
    }
    let inv = h.inverse()?;
    GeneratorMatrix::new(h.matrix() * x.matrix() * inv.matrix())
}

/// Relabelling that puts old qubit `perm[p]` at new position `p`.
pub fn qubit_permutation(perm: &[usize]) -> Result<TransformMatrix> {
    let n = perm.len();
    check_qubits(n)?;
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    let dim = 1usize << (2 * n);
    let mut m = RMatrix::zeros(dim, dim);
    for new in 0..dim {
        let mut old = 0usize;
        for (p, &src) in perm.iter().enumerate() {
            let digit = (new >> (2 * (n - 1 - p))) & 3;
            old |= digit << (2 * (n - 1 - src));
        }
        m[(new, old)] = 1.0;
    }
    TransformMatrix::new(m)
}

/// `P X Pᵀ` for the relabelling `perm` (see [`qubit_permutation`]).
pub fn permute_qubits(x: &GeneratorMatrix, perm: &[usize]) -> Result<GeneratorMatrix> {
    if perm.len() != x.n() {
        return Err(Error::DimensionMismatch {
            expected: x.n(),
            found: perm.len(),
        });
    }
    let p = qubit_permutation(perm)?;
    GeneratorMatrix::new(p.matrix() * x.matrix() * p.matrix().transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::factor::{a_matrix, b_matrix, e0, e1, kron_factors};
    use crate::algebra::rotation::{axis_angle, rotation_to_e1};
    use crate::algebra::superop::quantum_generator;
    use crate::rng::{haar_rotation, sample_rng, Domain};
    use crate::tensor::{product_vector, BlochVector3};
    use nalgebra::Vector3;

    #[test]
    fn identity_rotations_give_identity() {
        let h = local_transform(&[Matrix3::identity(), Matrix3::identity()]).unwrap();
        assert_eq!(h.matrix(), &RMatrix::identity(16, 16));
    }

    #[test]
    fn rejects_improper_rotation() {
        let reflection = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(matches!(
            local_transform(&[reflection]),
            Err(Error::NotSpecialOrthogonal { .. })
        ));
        assert!(local_transform(&[Matrix3::identity() * 1.01]).is_err());
    }

    #[test]
    fn conjugation_rotates_factor_vectors() {
        for i in 0..20 {
            let mut rng = sample_rng(12, Domain::Matrices, i);
            let r1 = haar_rotation(&mut rng);
            let r2 = haar_rotation(&mut rng);
            let a = BlochVector3::new(0.3, -0.5, 0.8);
            let h = local_transform(&[r1, r2]).unwrap();
            let x = GeneratorMatrix::from_factors(&[a_matrix(&a), Matrix4::identity()]).unwrap();
            let y = conjugate(&h, &x).unwrap();
            let expected = kron_factors(&[a_matrix(&BlochVector3(r1 * a.0)), Matrix4::identity()]);
            assert!((y.matrix() - expected).abs().max() < 1e-12);
            let xb = GeneratorMatrix::from_factors(&[b_matrix(&a), b_matrix(&a)]).unwrap();
            let yb = conjugate(&h, &xb).unwrap();
            let expected_b = kron_factors(&[b_matrix(&BlochVector3(r1 * a.0)), b_matrix(&BlochVector3(r2 * a.0))]);
            assert!((yb.matrix() - expected_b).abs().max() < 1e-12);
        }
    }

    #[test]
    fn local_transform_maps_product_vectors() {
        let mut rng = sample_rng(13, Domain::Matrices, 0);
        let r1 = haar_rotation(&mut rng);
        let r2 = haar_rotation(&mut rng);
        let a1 = BlochVector3::e1();
        let a2 = BlochVector3::new(0.0, 0.6, 0.8);
        let h = local_transform(&[r1, r2]).unwrap();
        let out = h.apply(&product_vector(&[a1, a2]).unwrap()).unwrap();
        let expected = product_vector(&[BlochVector3(r1 * a1.0), BlochVector3(r2 * a2.0)]).unwrap();
        assert!((out.coeffs() - expected.coeffs()).abs().max() < 1e-14);
    }

    #[test]
    fn e2_generator_rotates_onto_e1() {
        let r = rotation_to_e1(&Vector3::y());
        let h = local_transform(&[r, r]).unwrap();
        let x = quantum_generator(&[2, 2]).unwrap();
        let y = conjugate(&h, &x).unwrap();
        let expected = quantum_generator(&[1, 1]).unwrap();
        assert!((y.matrix() - expected.matrix()).abs().max() < 1e-12);
    }

    #[test]
    fn conjugation_preserves_spectrum() {
        let h = local_transform(&[axis_angle(&Vector3::x(), 0.4), axis_angle(&Vector3::z(), 1.3)]).unwrap();
        let x = GeneratorMatrix::from_factors(&[e1(), e1()]).unwrap();
        let y = conjugate(&h, &x).unwrap();
        let mut ex: Vec<f64> = x.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
        let mut ey: Vec<f64> = y.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
        ex.sort_by(f64::total_cmp);
        ey.sort_by(f64::total_cmp);
        for (a, b) in ex.iter().zip(&ey) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_swaps_factors() {
        let x = GeneratorMatrix::from_factors(&[e0(), e1(), Matrix4::identity()]).unwrap();
        let y = permute_qubits(&x, &[1, 2, 0]).unwrap();
        let expected = kron_factors(&[e1(), Matrix4::identity(), e0()]);
        assert_eq!(y.matrix(), &expected);
        assert!(qubit_permutation(&[0, 0]).is_err());
    }
}
