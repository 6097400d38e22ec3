//! Factor-wise views of `4^n x 4^n` matrices.
//!
//! A matrix `X[β][α]` is viewed as an order-`n` tensor whose mode `k` has
//! 16 entries indexed by `4 βk + αk`, mode 0 slowest. Linear maps acting on
//! one qubit factor at a time (projectors, basis decompositions) become mode
//! products in this view.

use crate::RMatrix;
use nalgebra::Matrix4;

fn interleave(beta: usize, alpha: usize, n: usize) -> usize {
    let mut idx = 0;
    for k in 0..n {
        let shift = 2 * (n - 1 - k);
        let b = (beta >> shift) & 3;
        let a = (alpha >> shift) & 3;
        idx = idx * 16 + 4 * b + a;
    }
    idx
}

pub(crate) fn to_modes(x: &RMatrix, n: usize) -> Vec<f64> {
    let dim = 1usize << (2 * n);
    let mut t = vec![0.0; dim * dim];
    for alpha in 0..dim {
        for beta in 0..dim {
            t[interleave(beta, alpha, n)] = x[(beta, alpha)];
        }
    }
    t
}

pub(crate) fn from_modes(t: &[f64], n: usize) -> RMatrix {
    let dim = 1usize << (2 * n);
    RMatrix::from_fn(dim, dim, |beta, alpha| t[interleave(beta, alpha, n)])
}

/// Applies `map` (`out x dims[k]`) to mode `k`; returns the new tensor.
pub(crate) fn mode_apply(t: &[f64], dims: &[usize], k: usize, map: &RMatrix) -> Vec<f64> {
    let inner = dims[k];
    assert_eq!(map.ncols(), inner);
    let outer_dim = map.nrows();
    let left: usize = dims[..k].iter().product();
    let right: usize = dims[k + 1..].iter().product();
    let mut out = vec![0.0; left * outer_dim * right];
    for l in 0..left {
        for j in 0..inner {
            let src = &t[(l * inner + j) * right..(l * inner + j + 1) * right];
            for i in 0..outer_dim {
                let w = map[(i, j)];
                if w == 0.0 {
                    continue;
                }
                let dst = &mut out[(l * outer_dim + i) * right..(l * outer_dim + i + 1) * right];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
    }
    out
}

/// Row-major flattening `m[4β + α]` of a factor matrix.
pub(crate) fn vec4(m: &Matrix4<f64>) -> [f64; 16] {
    let mut v = [0.0; 16];
    for b in 0..4 {
        for a in 0..4 {
            v[4 * b + a] = m[(b, a)];
        }
    }
    v
}

/// 16x16 matrix of a linear map on 4x4 factor matrices.
pub(crate) fn factor_map_matrix(f: impl Fn(&Matrix4<f64>) -> Matrix4<f64>) -> RMatrix {
    let mut out = RMatrix::zeros(16, 16);
    for j in 0..16 {
        let mut unit = Matrix4::zeros();
        unit[(j / 4, j % 4)] = 1.0;
        let image = vec4(&f(&unit));
        for (i, v) in image.iter().enumerate() {
            out[(i, j)] = *v;
        }
    }
    out
}

/// Applies one 16x16 factor map per qubit.
pub(crate) fn apply_factorwise(x: &RMatrix, n: usize, maps: &[RMatrix]) -> RMatrix {
    assert_eq!(maps.len(), n);
    let mut t = to_modes(x, n);
    let dims = vec![16; n];
    for (k, map) in maps.iter().enumerate() {
        t = mode_apply(&t, &dims, k, map);
    }
    from_modes(&t, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::factor::{e0, e1, kron_factors};

    #[test]
    fn modes_round_trip() {
        let x = RMatrix::from_fn(16, 16, |i, j| (i * 16 + j) as f64);
        assert_eq!(from_modes(&to_modes(&x, 2), 2), x);
    }

    #[test]
    fn factorwise_maps_act_on_kronecker_factors() {
        let x = kron_factors(&[e0(), e1()]);
        let transpose = factor_map_matrix(|m| m.transpose());
        let ident = factor_map_matrix(|m| *m);
        let y = apply_factorwise(&x, 2, &[transpose, ident]);
        assert_eq!(y, kron_factors(&[e0().transpose(), e1()]));
    }

    #[test]
    fn mode_apply_changes_dimension() {
        let t: Vec<f64> = (0..6).map(|v| v as f64).collect(); // dims [2, 3]
        let map = RMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        assert_eq!(mode_apply(&t, &[2, 3], 1, &map), vec![3.0, 12.0]);
    }
}
