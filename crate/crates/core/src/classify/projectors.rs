//! Per-factor projectors onto `I = span{I}` and `E = span{E0, E1}`, exact and
//! by Monte-Carlo averaging over the local rotation group.

use crate::algebra::factor::{e0, e1, frobenius_inner, FactorLabel};
use crate::algebra::local::rotation_block;
use crate::algebra::rotation::axis_angle;
use crate::rng::{haar_rotation, normal, sample_rng, Domain};
use nalgebra::{Matrix4, Vector3};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `⟨I, M⟩/4 · I`.
pub fn project_i(m: &Matrix4<f64>) -> Matrix4<f64> {
    Matrix4::identity() * (m.trace() / 4.0)
}

/// `⟨E0, M⟩/2 · E0 + ⟨E1, M⟩/2 · E1`.
pub fn project_e(m: &Matrix4<f64>) -> Matrix4<f64> {
    let (a, b) = (e0(), e1());
    a * (frobenius_inner(&a, m) / 2.0) + b * (frobenius_inner(&b, m) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaarSubgroup {
    /// All of SO(3).
    Full,
    /// Rotations about `e1`.
    StabilizerE1,
}

/// Monte-Carlo mean of `H M H⁻¹` with the entrywise standard error of the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarEstimate {
    pub mean: Matrix4<f64>,
    pub standard_error: Matrix4<f64>,
    pub samples: u64,
}

impl HaarEstimate {
    /// `sqrt(Σ SE²)`, the expected Frobenius size of the Monte-Carlo error.
    pub fn error_scale(&self) -> f64 {
        self.standard_error.norm()
    }
}

fn subgroup_sample(subgroup: HaarSubgroup, seed: u64, i: u64) -> Matrix4<f64> {
    let r = match subgroup {
        HaarSubgroup::Full => haar_rotation(&mut sample_rng(seed, Domain::HaarFull, i)),
        HaarSubgroup::StabilizerE1 => {
            let theta = sample_rng(seed, Domain::HaarStabilizer, i).random_range(0.0..std::f64::consts::TAU);
            axis_angle(&Vector3::x(), theta)
        }
    };
    rotation_block(&r)
}

/// Average of `H M H⁻¹` over `samples` rotations `H = 1 ⊕ R` from `subgroup`.
/// Zero samples give a zero mean.
pub fn haar_project(m: &Matrix4<f64>, subgroup: HaarSubgroup, samples: u64, seed: u64) -> HaarEstimate {
    let conjugates: Vec<Matrix4<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let h = subgroup_sample(subgroup, seed, i);
            h * m * h.transpose()
        })
        .collect();
    let count = samples.max(1) as f64;
    let mean = conjugates.iter().fold(Matrix4::zeros(), |acc, c| acc + c) / count;
    let var = conjugates.iter().fold(Matrix4::zeros(), |acc, c| {
        let d = c - mean;
        acc + d.component_mul(&d)
    });
    let standard_error = if samples > 1 {
        (var / ((count - 1.0) * count)).map(f64::sqrt)
    } else {
        Matrix4::zeros()
    };
    HaarEstimate {
        mean,
        standard_error,
        samples,
    }
}

/// Stabilizer average minus full average, which estimates `project_e` on
/// `A ⊕ B ⊕ I`. The two averages use independent streams, so their errors
/// add in quadrature.
pub fn haar_project_e(m: &Matrix4<f64>, samples: u64, seed: u64) -> HaarEstimate {
    let stab = haar_project(m, HaarSubgroup::StabilizerE1, samples, seed);
    let full = haar_project(m, HaarSubgroup::Full, samples, seed);
    HaarEstimate {
        mean: stab.mean - full.mean,
        standard_error: stab
            .standard_error
            .zip_map(&full.standard_error, |a, b| (a * a + b * b).sqrt()),
        samples,
    }
}

/// Random unit-Frobenius-norm matrix in `A ⊕ B ⊕ I` (Gaussian coefficients
/// on the seven basis matrices).
pub fn random_factor_matrix<R: Rng + ?Sized>(rng: &mut R) -> Matrix4<f64> {
    let m = FactorLabel::ALL
        .iter()
        .fold(Matrix4::zeros(), |acc, l| acc + l.matrix() * normal(rng));
    m / m.norm()
}

#[derive(Debug, Clone, Serialize)]
pub struct HaarCheckEntry {
    pub index: u64,
    /// `‖mean - Φ_I[M]‖_F` and `sqrt(Σ SE²)` for the full-group average.
    pub i_distance: f64,
    pub i_error_scale: f64,
    /// The same for stabilizer minus full against `Φ_E[M]`.
    pub e_distance: f64,
    pub e_error_scale: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HaarCrosscheckReport {
    pub matrices: u64,
    pub samples: u64,
    pub seed: u64,
    /// Distances are accepted up to this many error scales.
    pub sigma_limit: f64,
    /// Largest distance over error scale.
    pub max_ratio: f64,
    pub passed: bool,
    pub entries: Vec<HaarCheckEntry>,
}

/// Compares Monte-Carlo projections with `project_i` / `project_e` on
/// `matrices` random unit-norm matrices in `A ⊕ B ⊕ I`.
pub fn haar_crosscheck(matrices: u64, samples: u64, seed: u64) -> HaarCrosscheckReport {
    let sigma_limit = 5.0;
    let entries: Vec<HaarCheckEntry> = (0..matrices)
        .map(|j| {
            let m = random_factor_matrix(&mut sample_rng(seed, Domain::Matrices, j));
            let stream = seed.wrapping_add(j);
            let full = haar_project(&m, HaarSubgroup::Full, samples, stream);
            let e = haar_project_e(&m, samples, stream);
            let i_distance = (full.mean - project_i(&m)).norm();
            let e_distance = (e.mean - project_e(&m)).norm();
            let (i_error_scale, e_error_scale) = (full.error_scale(), e.error_scale());
            HaarCheckEntry {
                index: j,
                i_distance,
                i_error_scale,
                e_distance,
                e_error_scale,
                passed: i_distance <= sigma_limit * i_error_scale && e_distance <= sigma_limit * e_error_scale,
            }
        })
        .collect();
    let ratio = |d: f64, s: f64| {
        if s > 0.0 {
            d / s
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    let max_ratio = entries
        .iter()
        .map(|e| ratio(e.i_distance, e.i_error_scale).max(ratio(e.e_distance, e.e_error_scale)))
        .fold(0.0, f64::max);
    HaarCrosscheckReport {
        matrices,
        samples,
        seed,
        sigma_limit,
        max_ratio,
        passed: entries.iter().all(|e| e.passed),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::factor::{a_matrix, b_matrix};
    use crate::tensor::BlochVector3;

    fn ax(i: usize) -> BlochVector3 {
        BlochVector3::axis(i)
    }

    #[test]
    fn exact_projector_examples() {
        let id = Matrix4::identity();
        assert_eq!(project_i(&id), id);
        assert_eq!(project_i(&a_matrix(&ax(0))), Matrix4::zeros());
        assert_eq!(project_i(&(id + b_matrix(&ax(1)) * 3.0)), id);
        assert_eq!(project_e(&e0()), e0());
        assert_eq!(project_e(&e1()), e1());
        assert_eq!(project_e(&a_matrix(&ax(1))), Matrix4::zeros());
        assert_eq!(project_e(&(e0() * 2.0 + id * 5.0)), e0() * 2.0);
    }

    #[test]
    fn projectors_are_orthogonal_idempotents() {
        let m = Matrix4::from_fn(|i, j| ((3 * i + 5 * j) % 7) as f64 - 2.5);
        let n = Matrix4::from_fn(|i, j| (i as f64 - j as f64).sin());
        for p in [project_i, project_e] {
            assert!((p(&p(&m)) - p(&m)).abs().max() < 1e-15);
            assert!((frobenius_inner(&p(&m), &n) - frobenius_inner(&m, &p(&n))).abs() < 1e-13);
        }
        assert_eq!(project_i(&project_e(&m)), Matrix4::zeros());
        assert!(project_e(&project_i(&m)).abs().max() < 1e-15);
    }

    #[test]
    fn haar_trivial_cases() {
        for g in [HaarSubgroup::Full, HaarSubgroup::StabilizerE1] {
            let est = haar_project(&Matrix4::identity(), g, 50, 1);
            assert!((est.mean - Matrix4::identity()).abs().max() < 1e-14);
        }
        let a = a_matrix(&ax(0));
        let stab = haar_project(&a, HaarSubgroup::StabilizerE1, 50, 1);
        assert!((stab.mean - a).abs().max() < 1e-14);
    }

    #[test]
    fn haar_averages_approach_exact_projectors() {
        let m = (a_matrix(&BlochVector3::new(0.6, 0.0, 0.8)) + b_matrix(&ax(0)) * 0.5 + Matrix4::identity() * 0.3)
            .normalize();
        let full = haar_project(&m, HaarSubgroup::Full, 10_000, 5);
        assert!((full.mean - project_i(&m)).norm() < 0.05);
        assert!((full.mean - project_i(&m)).norm() <= 5.0 * full.error_scale());
        let e = haar_project_e(&m, 10_000, 5);
        assert!((e.mean - project_e(&m)).norm() < 0.05);
        assert!((e.mean - project_e(&m)).norm() <= 5.0 * e.error_scale());
    }

    #[test]
    fn crosscheck_passes_on_a_few_matrices() {
        let r = haar_crosscheck(3, 4000, 2);
        assert!(r.passed, "{r:?}");
        assert!(r.entries.iter().all(|e| e.i_distance < 0.1 && e.e_distance < 0.1));
    }

    #[test]
    fn error_shrinks_like_inverse_root_samples() {
        let m = b_matrix(&BlochVector3::new(0.0, 0.6, 0.8));
        let small = haar_project(&m, HaarSubgroup::Full, 2_000, 9).error_scale();
        let large = haar_project(&m, HaarSubgroup::Full, 8_000, 9).error_scale();
        let ratio = small / large;
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }
}
