use super::sampling::{earliest_worst, product_sample};
use super::{to_arrays, ConstraintKind, ConstraintReport, Witness};
use crate::algebra::TransformMatrix;
use crate::rng::Domain;
use crate::tensor::product_coeffs;
use rayon::prelude::*;

/// Samples `2^-n v(b)ᵀ H v(a)` over unit product states and effects and
/// reports values outside `[-tol, 1 + tol]`.
pub fn range_check(h: &TransformMatrix, samples: u64, seed: u64, tol: f64) -> ConstraintReport {
    let n = h.n();
    let scale = 1.0 / (1u64 << n) as f64;
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (a, b) = product_sample(n, seed, Domain::RangeGrid, i);
            let va = product_coeffs(&a.iter().map(|v| v.0).collect::<Vec<_>>());
            let vb = product_coeffs(&b.iter().map(|v| v.0).collect::<Vec<_>>());
            vb.dot(&(h.matrix() * va)) * scale
        })
        .collect();
    let violation = |p: f64| (-p).max(p - 1.0).max(0.0);
    let max_violation = values.iter().map(|&p| violation(p)).fold(0.0, f64::max);
    let (min_value, max_value) = if values.is_empty() {
        (0.0, 0.0)
    } else {
        values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        })
    };
    let passed = max_violation <= tol;
    let witness = (!passed).then(|| {
        let i = earliest_worst(values.iter().map(|&p| violation(p)), max_violation);
        let (a, b) = product_sample(n, seed, Domain::RangeGrid, i);
        Witness {
            sample: i,
            qubit: None,
            a: to_arrays(&a),
            b: to_arrays(&b),
            value: values[i as usize],
        }
    });
    ConstraintReport {
        kind: ConstraintKind::Range,
        n,
        max_violation,
        witness,
        min_value,
        max_value,
        samples,
        seed,
        tolerance: tol,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::factor::b_matrix;
    use crate::algebra::{exp_generator, quantum_generator, GeneratorMatrix};
    use crate::tensor::BlochVector3;
    use std::f64::consts::PI;

    #[test]
    fn identity_spans_zero_to_one() {
        let r = range_check(&TransformMatrix::identity(2).unwrap(), 2000, 1, 1e-12);
        assert!(r.passed);
        assert_eq!(r.min_value, 0.0);
        assert_eq!(r.max_value, 1.0);
    }

    #[test]
    fn quantum_evolution_stays_in_range() {
        let x = quantum_generator(&[1, 1]).unwrap();
        for t in [0.1, 1.0, PI] {
            let r = range_check(&exp_generator(&x, t), 10_000, 7, 1e-9);
            assert!(r.passed, "t = {t}: {r:?}");
        }
    }

    #[test]
    fn b_b_growth_is_caught_on_the_e1_axis() {
        let b = b_matrix(&BlochVector3::e1());
        let x = GeneratorMatrix::from_factors(&[b, b]).unwrap().scale(2.0);
        let r = range_check(&exp_generator(&x, 0.1), 1000, 3, 1e-9);
        assert!(!r.passed);
        let w = r.witness.unwrap();
        assert_eq!(w.sample, 0);
        assert_eq!(w.a, vec![[1.0, 0.0, 0.0]; 2]);
        assert_eq!(w.b, vec![[1.0, 0.0, 0.0]; 2]);
        assert!((w.value - 0.2f64.exp()).abs() < 1e-12);
    }
}
