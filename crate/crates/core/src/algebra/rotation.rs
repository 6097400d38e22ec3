//! SO(3) / SU(2) helpers: quaternions, the spinor double cover, axis
//! alignment, and the transpose twin of a single-qubit unitary.

use crate::tensor::pauli::pauli;
use crate::{Error, Result, C64};
use nalgebra::{Matrix2, Matrix3, Vector3, Vector4};

/// `diag(1, -1, 1)`: transposition of a qubit flips the `σ2` component.
pub fn transpose_reflection() -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0))
}

/// Rotation matrix of the unit quaternion `(w, x, y, z)`.
pub fn rotation_from_quaternion(q: &Vector4<f64>) -> Matrix3<f64> {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

/// Inverse of [`rotation_from_quaternion`] up to the sign of `q`.
pub fn quaternion_from_rotation(r: &Matrix3<f64>) -> Vector4<f64> {
    let trace = r.trace();
    // pick the largest of 4w², 4x², 4y², 4z² to divide by
    let candidates = [
        1.0 + trace,
        1.0 + 2.0 * r[(0, 0)] - trace,
        1.0 + 2.0 * r[(1, 1)] - trace,
        1.0 + 2.0 * r[(2, 2)] - trace,
    ];
    let (best, _) = candidates.iter().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
    );
    let s = candidates[best].max(0.0).sqrt() * 2.0;
    let q = match best {
        0 => Vector4::new(
            0.25 * s,
            (r[(2, 1)] - r[(1, 2)]) / s,
            (r[(0, 2)] - r[(2, 0)]) / s,
            (r[(1, 0)] - r[(0, 1)]) / s,
        ),
        1 => Vector4::new(
            (r[(2, 1)] - r[(1, 2)]) / s,
            0.25 * s,
            (r[(0, 1)] + r[(1, 0)]) / s,
            (r[(0, 2)] + r[(2, 0)]) / s,
        ),
        2 => Vector4::new(
            (r[(0, 2)] - r[(2, 0)]) / s,
            (r[(0, 1)] + r[(1, 0)]) / s,
            0.25 * s,
            (r[(1, 2)] + r[(2, 1)]) / s,
        ),
        _ => Vector4::new(
            (r[(1, 0)] - r[(0, 1)]) / s,
            (r[(0, 2)] + r[(2, 0)]) / s,
            (r[(1, 2)] + r[(2, 1)]) / s,
            0.25 * s,
        ),
    };
    q.normalize()
}

/// `w I - i (x σ1 + y σ2 + z σ3)`, whose adjoint action is the rotation of `q`.
pub fn su2_from_quaternion(q: &Vector4<f64>) -> Matrix2<C64> {
    let minus_i = C64::new(0.0, -1.0);
    pauli(0) * C64::new(q[0], 0.0)
        + (pauli(1) * C64::new(q[1], 0.0) + pauli(2) * C64::new(q[2], 0.0) + pauli(3) * C64::new(q[3], 0.0)) * minus_i
}

/// Bloch rotation of a single-qubit unitary: `R_ij = ½ tr(σi U σj U†)`.
pub fn rotation_of_unitary(u: &Matrix2<C64>) -> Matrix3<f64> {
    let ud = u.adjoint();
    Matrix3::from_fn(|i, j| (pauli(i as u8 + 1) * u * pauli(j as u8 + 1) * ud).trace().re * 0.5)
}

pub fn su2_from_rotation(r: &Matrix3<f64>) -> Matrix2<C64> {
    su2_from_quaternion(&quaternion_from_rotation(r))
}

/// Right-handed rotation by `theta` about the unit vector `axis`.
pub fn axis_angle(axis: &Vector3<f64>, theta: f64) -> Matrix3<f64> {
    let k = axis.normalize();
    let half = theta / 2.0;
    let s = half.sin();
    rotation_from_quaternion(&Vector4::new(half.cos(), s * k.x, s * k.y, s * k.z))
}

/// A rotation `R` with `R u = e1` for unit `u`.
pub fn rotation_to_e1(u: &Vector3<f64>) -> Matrix3<f64> {
    let u = u.normalize();
    let e1 = Vector3::x();
    let cross = u.cross(&e1);
    let sin = cross.norm();
    let cos = u.dot(&e1);
    if sin < 1e-12 {
        if cos > 0.0 {
            return Matrix3::identity();
        }
        // antipodal: half turn about e3
        return axis_angle(&Vector3::z(), std::f64::consts::PI);
    }
    axis_angle(&(cross / sin), sin.atan2(cos))
}

/// `(max |RᵀR - I|, det R)`.
pub fn special_orthogonal_defect(r: &Matrix3<f64>) -> (f64, f64) {
    let defect = (r.transpose() * r - Matrix3::identity()).abs().max();
    (defect, r.determinant())
}

pub fn check_special_orthogonal(r: &Matrix3<f64>, tol: f64) -> Result<()> {
    let (defect, det) = special_orthogonal_defect(r);
    if defect > tol || (det - 1.0).abs() > tol {
        return Err(Error::NotSpecialOrthogonal { defect, det });
    }
    Ok(())
}

pub fn unitary_defect2(u: &Matrix2<C64>) -> f64 {
    (u.adjoint() * u - Matrix2::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// `V'` with `ad_V' = T ∘ ad_V ∘ T` for the single-qubit transpose `T`,
/// obtained by reflecting the Bloch rotation of `V` through the `e2` axis and
/// lifting back to SU(2). Either preimage of the double cover is returned.
pub fn local_unitary_transpose_twin(v: &Matrix2<C64>) -> Result<Matrix2<C64>> {
    let tol = 1e-10;
    let defect = unitary_defect2(v);
    let det = v.determinant();
    if defect > tol || (det - C64::new(1.0, 0.0)).norm() > tol {
        return Err(Error::InvalidArgument(format!(
            "expected an SU(2) matrix (unitarity defect {defect:e}, det {det})"
        )));
    }
    let d = transpose_reflection();
    let twin_rotation = d * rotation_of_unitary(v) * d;
    check_special_orthogonal(&twin_rotation, tol)?;
    let lifted = su2_from_rotation(&twin_rotation);
    let lift_error = (rotation_of_unitary(&lifted) - twin_rotation).abs().max();
    if lift_error > tol {
        return Err(Error::Numerical(format!(
            "SU(2) lift missed the rotation by {lift_error:e}"
        )));
    }
    Ok(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{sample_rng, unit_quaternion, unit_vector3, Domain};
    use std::f64::consts::PI;

    fn expm_i(theta: f64, alpha: u8) -> Matrix2<C64> {
        // exp(-i θ σα / 2)
        pauli(0) * C64::new((theta / 2.0).cos(), 0.0) - pauli(alpha) * C64::new(0.0, (theta / 2.0).sin())
    }

    #[test]
    fn z_rotation_convention() {
        let theta = 0.7;
        let r = rotation_of_unitary(&expm_i(theta, 3));
        let expected = Matrix3::new(
            theta.cos(),
            -theta.sin(),
            0.0,
            theta.sin(),
            theta.cos(),
            0.0,
            0.0,
            0.0,
            1.0,
        );
        assert!((r - expected).abs().max() < 1e-15);
        assert!((axis_angle(&Vector3::z(), theta) - expected).abs().max() < 1e-15);
    }

    #[test]
    fn quaternion_round_trips() {
        for i in 0..200 {
            let q = unit_quaternion(&mut sample_rng(5, Domain::Matrices, i));
            let r = rotation_from_quaternion(&q);
            let q2 = quaternion_from_rotation(&r);
            let err = (q - q2).norm().min((q + q2).norm());
            assert!(err < 1e-12, "{err:e}");
            let u = su2_from_quaternion(&q);
            assert!((rotation_of_unitary(&u) - r).abs().max() < 1e-12);
        }
    }

    #[test]
    fn rotation_to_e1_maps_onto_e1() {
        for i in 0..200 {
            let u = unit_vector3(&mut sample_rng(6, Domain::Matrices, i));
            let r = rotation_to_e1(&u);
            assert!((r * u - Vector3::x()).norm() < 1e-12);
            check_special_orthogonal(&r, 1e-12).unwrap();
        }
        let r = rotation_to_e1(&-Vector3::x());
        assert!((r * -Vector3::x() - Vector3::x()).norm() < 1e-12);
        assert_eq!(rotation_to_e1(&Vector3::x()), Matrix3::identity());
    }

    #[test]
    fn twin_of_identity_is_identity_up_to_sign() {
        let t = local_unitary_transpose_twin(&Matrix2::identity()).unwrap();
        assert!((rotation_of_unitary(&t) - Matrix3::identity()).abs().max() < 1e-15);
    }

    #[test]
    fn twin_equals_complex_conjugate_action() {
        // (V ρᵀ V†)ᵀ = V̄ ρ V̄†, so conj(V) is an independent oracle
        for i in 0..100 {
            let q = unit_quaternion(&mut sample_rng(8, Domain::Twin, i));
            let v = su2_from_quaternion(&q);
            let twin = local_unitary_transpose_twin(&v).unwrap();
            let oracle = rotation_of_unitary(&v.map(|z| z.conj()));
            assert!((rotation_of_unitary(&twin) - oracle).abs().max() < 1e-12);
        }
    }

    #[test]
    fn twin_reverses_e1_and_e3_rotations_and_keeps_e2() {
        let theta = 1.1;
        for (alpha, axis, sign) in [
            (1u8, Vector3::x(), -1.0),
            (2, Vector3::y(), 1.0),
            (3, Vector3::z(), -1.0),
        ] {
            let twin = local_unitary_transpose_twin(&expm_i(theta, alpha)).unwrap();
            let expected = axis_angle(&axis, sign * theta);
            assert!(
                (rotation_of_unitary(&twin) - expected).abs().max() < 1e-12,
                "axis {alpha}"
            );
        }
    }

    #[test]
    fn twin_rejects_non_su2() {
        let mut v = Matrix2::identity();
        v[(0, 0)] = C64::new(2.0, 0.0);
        assert!(local_unitary_transpose_twin(&v).is_err());
        // unitary with det -1
        let flip = pauli(3);
        assert!(local_unitary_transpose_twin(&flip).is_err());
        let _ = PI;
    }
}
