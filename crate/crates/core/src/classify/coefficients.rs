//! Coefficient table of a generator in `E^⊗m ⊗ I^⊗n_I` and the chain of
//! second-order constraints it must satisfy.

use crate::algebra::factor::{e_matrix, kron_factors};
use crate::algebra::modes::{mode_apply, to_modes, vec4};
use crate::algebra::GeneratorMatrix;
use crate::constraints::constraint_vectors;
use crate::tensor::BlochVector3;
use crate::{Error, RMatrix, Result};
use nalgebra::Matrix4;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

/// `c_s` for `s ∈ {0,1}^m`, index `s1 s2 .. sm` read as binary (`s1` most
/// significant).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    m: usize,
    n_i: usize,
    values: Vec<f64>,
}

impl CoefficientTable {
    pub fn new(m: usize, n_i: usize, values: Vec<f64>) -> Result<Self> {
        crate::check_qubits((m + n_i).max(1))?;
        if values.len() != 1 << m {
            return Err(Error::DimensionMismatch {
                expected: 1 << m,
                found: values.len(),
            });
        }
        Ok(CoefficientTable { m, n_i, values })
    }

    /// Table from `(bit string, value)` pairs, e.g. `("01", 2.0)`; unlisted
    /// entries are zero.
    pub fn from_entries(m: usize, n_i: usize, entries: &[(&str, f64)]) -> Result<Self> {
        let mut values = vec![0.0; 1 << m];
        for (s, c) in entries {
            if s.len() != m || !s.chars().all(|ch| ch == '0' || ch == '1') {
                return Err(Error::InvalidArgument(format!("bad index {s:?} for m = {m}")));
            }
            values[usize::from_str_radix(s, 2).unwrap_or(0)] = *c;
        }
        Self::new(m, n_i, values)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_i(&self) -> usize {
        self.n_i
    }

    pub fn n(&self) -> usize {
        self.m + self.n_i
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, bits: &[u8]) -> f64 {
        self.values[bits.iter().fold(0, |acc, &b| 2 * acc + b as usize)]
    }

    pub fn bits(&self, index: usize) -> Vec<u8> {
        (0..self.m).map(|j| ((index >> (self.m - 1 - j)) & 1) as u8).collect()
    }

    pub fn label(&self, index: usize) -> String {
        self.bits(index).iter().map(|b| char::from(b'0' + b)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    /// `Σ c_s E_s1 ⊗ .. ⊗ E_sm ⊗ I^⊗n_I`.
    pub fn reconstruct(&self) -> Result<GeneratorMatrix> {
        let mut out = GeneratorMatrix::zeros(self.n())?.into_matrix();
        for (i, &c) in self.values.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut factors: Vec<Matrix4<f64>> = self.bits(i).into_iter().map(e_matrix).collect();
            factors.extend(std::iter::repeat_n(Matrix4::identity(), self.n_i));
            out += kron_factors(&factors) * c;
        }
        GeneratorMatrix::new(out)
    }
}

impl Serialize for CoefficientTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.values.len()))?;
        for (i, c) in self.values.iter().enumerate() {
            map.serialize_entry(&self.label(i), c)?;
        }
        map.end()
    }
}

/// `c_s = ⟨E_s ⊗ I, Y⟩ / (2^m 4^n_I)`. Fails with `SupportLeakage` when the
/// reconstruction misses `Y` by more than `tol · max(1, ‖Y‖)`.
pub fn extract_coefficients(y: &GeneratorMatrix, m: usize, tol: f64) -> Result<CoefficientTable> {
    let n = y.n();
    if m > n {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds n = {n}")));
    }
    let mut e_map = RMatrix::zeros(2, 16);
    for bit in 0..2u8 {
        for (j, v) in vec4(&e_matrix(bit)).iter().enumerate() {
            e_map[(bit as usize, j)] = v / 2.0;
        }
    }
    let i_map = RMatrix::from_row_slice(1, 16, &vec4(&Matrix4::identity()).map(|v| v / 4.0));
    let mut t = to_modes(y.matrix(), n);
    let mut dims = vec![16; n];
    for k in 0..n {
        let map = if k < m { &e_map } else { &i_map };
        t = mode_apply(&t, &dims, k, map);
        dims[k] = map.nrows();
    }
    let table = CoefficientTable::new(m, n - m, t)?;
    let residual = (table.reconstruct()?.matrix() - y.matrix()).norm();
    if residual > tol * y.frobenius_norm().max(1.0) {
        return Err(Error::SupportLeakage(residual));
    }
    Ok(table)
}

/// One evaluated constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintEvidence {
    pub id: String,
    pub value: f64,
    pub satisfied: bool,
}

/// Outcome of [`coefficient_constraints`].
#[derive(Debug, Clone, Serialize)]
pub struct ConstraintChain {
    pub evidence: Vec<ConstraintEvidence>,
    pub consistent: bool,
    /// `(p, q)` in table positions: `p` carries the single zero reached by
    /// the induction, `q` is its partner.
    pub pair: Option<(usize, usize)>,
    /// Sign of `c_q / c_p`.
    pub sign: Option<i8>,
    pub c_p: Option<f64>,
    pub c_q: Option<f64>,
}

fn qubit_list(z: &[usize]) -> String {
    z.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
}

/// Evaluates the admissibility chain on the reconstructed `Y`, with idle
/// qubits and positions outside the tested set in `e1`:
///
/// * `diag`: `v(e1..)ᵀ Y² v(e1..) = c_{1..1}² 2^n ≤ 0`;
/// * `i1[p,q]`, `i2[p,q]` and their sum for every pair of table positions;
/// * induction from the non-zero coefficient with the most zeros `Z`: the
///   `+` inequality equals `-c² 2^{n-l}` unless a coefficient with a smaller
///   zero set inside `Z` is present, and the chain moves to the largest one;
/// * at a single zero `p`, the partner `q` with the largest `|c|` must have
///   `|c_q| = |c_p|`.
///
/// `tol` is relative: `tol · max(1, c_max)` for coefficients and
/// `tol · max(1, c_max² 2^n)` for constraint values.
pub fn coefficient_constraints(table: &CoefficientTable, tol: f64) -> Result<ConstraintChain> {
    let n = table.n();
    let m = table.m();
    let y = table.reconstruct()?;
    let c_max = table.max_abs();
    let tol_c = tol * c_max.max(1.0);
    let tol_v = tol * (c_max * c_max * (1u64 << n) as f64).max(1.0);
    let e = |i: usize, sign: f64| BlochVector3(BlochVector3::axis(i).0 * sign);
    let value = |a: &[BlochVector3], b: &[BlochVector3], k: usize| {
        let (left, right) = constraint_vectors(a, b, k);
        let yl = y.matrix().tr_mul(&left);
        let yr = y.matrix() * right;
        yl.dot(&yr)
    };
    let mut evidence = Vec::new();
    let mut push = |id: String, value: f64, satisfied: bool| {
        evidence.push(ConstraintEvidence { id, value, satisfied });
        satisfied
    };

    let ones = vec![e(0, 1.0); n];
    let (_, right) = constraint_vectors(&ones, &ones, 0);
    let diag = right.dot(&(y.matrix() * (y.matrix() * &right)));
    let mut ok = push("diag".into(), diag, diag <= tol_v);

    for p in 0..m {
        for q in p + 1..m {
            let mut a = ones.clone();
            a[p] = e(1, 1.0);
            a[q] = e(1, 1.0);
            let i1 = value(&a, &a, p);
            let i2 = value(&a, &a, q);
            ok &= push(format!("i1[{p},{q}]"), i1, i1 >= -tol_v);
            ok &= push(format!("i2[{p},{q}]"), i2, i2 >= -tol_v);
            ok &= push(format!("i1+i2[{p},{q}]"), i1 + i2, i1 + i2 >= -tol_v);
        }
    }

    let zeros = |i: usize| -> Vec<usize> { (0..m).filter(|&j| (i >> (m - 1 - j)) & 1 == 0).collect() };
    let start = (0..table.values.len())
        .filter(|&i| table.values[i].abs() > tol_c)
        .max_by(|&i, &j| {
            zeros(i)
                .len()
                .cmp(&zeros(j).len())
                .then(table.values[i].abs().total_cmp(&table.values[j].abs()))
                .then(j.cmp(&i))
        });
    let mut result = ConstraintChain {
        evidence: Vec::new(),
        consistent: false,
        pair: None,
        sign: None,
        c_p: None,
        c_q: None,
    };
    let Some(start) = start else {
        push("nonzero".into(), c_max, false);
        result.evidence = evidence;
        return Ok(result);
    };
    let mut z = zeros(start);
    while ok && z.len() >= 2 {
        let l = z.len();
        let mut a = ones.clone();
        for &j in &z {
            a[j] = e(1, 1.0);
        }
        let mut b_plus = ones.clone();
        let mut b_minus = ones.clone();
        for &j in &z[1..] {
            b_plus[j] = e(1, -1.0);
            b_minus[j] = e(1, -1.0);
        }
        b_plus[z[0]] = e(1, 1.0);
        let plus = value(&a, &b_plus, z[1]);
        let minus = value(&a, &b_minus, z[0]);
        let tag = qubit_list(&z);
        ok &= push(format!("induction+[{tag}]"), plus, plus >= -tol_v);
        ok &= push(format!("induction-[{tag}]"), minus, minus >= -tol_v);
        if !ok {
            break;
        }
        // next: largest coefficient with ones outside Z and a smaller,
        // non-empty zero set inside Z
        let next = (0..table.values.len())
            .filter(|&i| {
                let zi = zeros(i);
                !zi.is_empty() && zi.len() < l && zi.iter().all(|j| z.contains(j)) && table.values[i].abs() > tol_c
            })
            .max_by(|&i, &j| table.values[i].abs().total_cmp(&table.values[j].abs()).then(j.cmp(&i)));
        match next {
            Some(i) => z = zeros(i),
            None => {
                ok &= push(format!("induction-support[{tag}]"), 0.0, false);
            }
        }
    }
    if ok && z.len() == 1 && m >= 2 {
        let p = z[0];
        let single = |q: usize| table.values[((1usize << m) - 1) ^ (1 << (m - 1 - q))];
        let c_p = single(p);
        let q = (0..m)
            .filter(|&q| q != p)
            .max_by(|&i, &j| single(i).abs().total_cmp(&single(j).abs()).then(j.cmp(&i)))
            .unwrap_or(p);
        let c_q = single(q);
        let gap = c_q.abs() - c_p.abs();
        ok &= push(format!("pair[{p},{q}]"), gap, gap.abs() <= tol_c);
        result.pair = Some((p, q));
        result.c_p = Some(c_p);
        result.c_q = Some(c_q);
        result.sign = (c_q.abs() > tol_c).then_some(if c_q * c_p > 0.0 { 1 } else { -1 });
    } else if ok {
        ok &= push("pair".into(), 0.0, false);
    }
    result.consistent = ok && evidence.iter().all(|e| e.satisfied);
    result.evidence = evidence;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::factor::{e0, e1};
    use crate::algebra::quantum_generator;
    use crate::constraints::second_order_values;

    #[test]
    fn extraction_examples() {
        let y = GeneratorMatrix::from_factors(&[e0(), e1()])
            .unwrap()
            .add(&GeneratorMatrix::from_factors(&[e1(), e0()]).unwrap())
            .unwrap()
            .scale(3.0);
        let t = extract_coefficients(&y, 2, 1e-12).unwrap();
        assert_eq!(t.values(), &[0.0, 3.0, 3.0, 0.0]);
        let q = quantum_generator(&[1, 1]).unwrap();
        let t = extract_coefficients(&q, 2, 1e-12).unwrap();
        assert_eq!(t.get(&[0, 1]), 2.0);
        assert_eq!(t.get(&[1, 0]), 2.0);
        let t = extract_coefficients(&GeneratorMatrix::from_factors(&[e1(), e1()]).unwrap(), 2, 1e-12).unwrap();
        assert_eq!(t.get(&[1, 1]), 1.0);
    }

    #[test]
    fn idle_qubits_and_leakage() {
        let q = quantum_generator(&[1, 1, 0]).unwrap();
        let t = extract_coefficients(&q, 2, 1e-12).unwrap();
        assert_eq!((t.m(), t.n_i()), (2, 1));
        assert_eq!(t.get(&[0, 1]), 2.0);
        assert!((t.reconstruct().unwrap().matrix() - q.matrix()).abs().max() < 1e-12);
        let leaky = GeneratorMatrix::from_factors(&[e0(), e1(), e0()]).unwrap();
        assert!(matches!(
            extract_coefficients(&leaky, 2, 1e-12),
            Err(Error::SupportLeakage(_))
        ));
    }

    #[test]
    fn serializes_as_bit_string_map() {
        let t = CoefficientTable::from_entries(2, 0, &[("01", 2.0), ("10", -2.0)]).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"00":0.0,"01":2.0,"10":-2.0,"11":0.0}"#);
    }

    fn find<'a>(chain: &'a ConstraintChain, id: &str) -> &'a ConstraintEvidence {
        chain.evidence.iter().find(|e| e.id == id).unwrap()
    }

    #[test]
    fn diagonal_term_is_rejected() {
        let t = CoefficientTable::from_entries(2, 0, &[("11", 1.0)]).unwrap();
        let chain = coefficient_constraints(&t, 1e-10).unwrap();
        let d = find(&chain, "diag");
        assert_eq!(d.value, 4.0);
        assert!(!d.satisfied);
        assert!(!chain.consistent);
    }

    #[test]
    fn plus_and_minus_pairs() {
        for (c10, sign) in [(2.0, 1), (-2.0, -1)] {
            let t = CoefficientTable::from_entries(2, 0, &[("01", 2.0), ("10", c10)]).unwrap();
            let chain = coefficient_constraints(&t, 1e-10).unwrap();
            assert!(chain.consistent, "{chain:?}");
            assert_eq!(chain.sign, Some(sign));
            assert_eq!(chain.pair, Some((0, 1)));
        }
    }

    #[test]
    fn pair_values_match_closed_form() {
        // i1 = 2^{n-2}(c01² - c10² + c11² - c00²), i2 with 01 and 10 swapped
        let (c00, c01, c10, c11) = (0.3, -1.1, 0.7, 0.2);
        let t = CoefficientTable::from_entries(2, 1, &[("00", c00), ("01", c01), ("10", c10), ("11", c11)]).unwrap();
        let chain = coefficient_constraints(&t, 1e-10).unwrap();
        let scale = 2.0;
        let i1 = scale * (c01 * c01 - c10 * c10 + c11 * c11 - c00 * c00);
        let i2 = scale * (c10 * c10 - c01 * c01 + c11 * c11 - c00 * c00);
        assert!((find(&chain, "i1[0,1]").value - i1).abs() < 1e-12);
        assert!((find(&chain, "i2[0,1]").value - i2).abs() < 1e-12);
        assert!((find(&chain, "diag").value - c11 * c11 * 8.0).abs() < 1e-12);
        // cross-check against the generic second-order evaluation
        let y = t.reconstruct().unwrap();
        let e2 = BlochVector3::e2();
        let a = [e2, e2, BlochVector3::e1()];
        let (off, _) = second_order_values(&y, &a, &a, 0).unwrap();
        assert!((off - i1).abs() < 1e-12);
    }

    #[test]
    fn induction_rejects_an_isolated_zero_set() {
        // a lone double zero already fails i1 + i2; the induction handles l = 3
        let t = CoefficientTable::from_entries(3, 0, &[("001", 1.5)]).unwrap();
        assert!(find(&coefficient_constraints(&t, 1e-10).unwrap(), "i1+i2[0,1]").value < 0.0);
        let t = CoefficientTable::from_entries(3, 1, &[("000", 1.5)]).unwrap();
        let chain = coefficient_constraints(&t, 1e-10).unwrap();
        let step = find(&chain, "induction+[0,1,2]");
        assert!((step.value + 1.5 * 1.5 * 2.0).abs() < 1e-12);
        assert!(!step.satisfied);
        assert!(!chain.consistent);
    }

    #[test]
    fn induction_descends_to_a_single_zero() {
        let t =
            CoefficientTable::from_entries(3, 0, &[("000", 0.5), ("011", 1.0), ("101", 1.0), ("110", 1.0)]).unwrap();
        let chain = coefficient_constraints(&t, 1e-10).unwrap();
        let step = find(&chain, "induction+[0,1,2]");
        assert!((step.value - 0.75).abs() < 1e-12, "{chain:?}");
        assert!(chain.consistent);
        assert_eq!(chain.pair, Some((0, 1)));
    }
}
