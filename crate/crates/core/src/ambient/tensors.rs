//! Scalar-generic component formulas for the model-space structure tensors.
//!
//! The metric, its y-partials and the Christoffel symbols are written once
//! over a small ring abstraction and instantiated both for `f64` (pointwise
//! evaluation) and for [`Jet`](crate::jet::Jet) (exact differentiation along
//! a curve). Metric entries are polynomials in the y-coordinates, so both
//! instantiations are exact up to rounding.

// index loops mirror the tensor notation g_ij, Gamma^k_ij
#![allow(clippy::needless_range_loop)]

use crate::jet::Jet;

/// Minimal ring-with-division interface for the tensor formulas.
pub(crate) trait Ring: Clone {
    fn zero() -> Self;
    fn from_f64(c: f64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Magnitude used for pivot selection in Gauss-Jordan elimination.
    fn pivot_magnitude(&self) -> f64;
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_f64(c: f64) -> Self {
        c
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn pivot_magnitude(&self) -> f64 {
        self.abs()
    }
}

// Jets form a local ring; division pivots on the function value.
impl Ring for Jet {
    fn zero() -> Self {
        // Order is fixed up by arithmetic truncation against real operands;
        // constants start at the maximum order we use.
        Jet::constant(0.0, crate::curvelang::MAX_JET_ORDER)
    }
    fn from_f64(c: f64) -> Self {
        Jet::constant(c, crate::curvelang::MAX_JET_ORDER)
    }
    fn add(&self, rhs: &Self) -> Self {
        Jet::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Jet::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Jet::mul(self, rhs)
    }
    fn div(&self, rhs: &Self) -> Self {
        Jet::div(self, rhs)
    }
    fn neg(&self) -> Self {
        Jet::neg(self)
    }
    fn pivot_magnitude(&self) -> f64 {
        self.value().abs()
    }
}

// Coordinate layout: indices 0..m are x_i, m..2m are y_i, 2m..2m+s are z_a.

/// Metric components g_ij as functions of the y-coordinates:
///   g(x_i, x_j) = (s y_i y_j + delta_ij) / 4
///   g(x_i, z_a) = -y_i / 4
///   g(y_i, y_j) = delta_ij / 4
///   g(z_a, z_b) = delta_ab / 4
/// with all other blocks zero.
pub(crate) fn metric_components<R: Ring>(m: usize, s: usize, y: &[R]) -> Vec<Vec<R>> {
    let n = 2 * m + s;
    let quarter = R::from_f64(0.25);
    let s_quarter = R::from_f64(s as f64 * 0.25);
    let mut g = vec![vec![R::zero(); n]; n];
    for i in 0..m {
        for j in 0..m {
            let mut e = s_quarter.mul(&y[i].mul(&y[j]));
            if i == j {
                e = e.add(&quarter);
            }
            g[i][j] = e;
        }
        for a in 0..s {
            let e = quarter.mul(&y[i]).neg();
            g[i][2 * m + a] = e.clone();
            g[2 * m + a][i] = e;
        }
        g[m + i][m + i] = quarter.clone();
    }
    for a in 0..s {
        g[2 * m + a][2 * m + a] = quarter.clone();
    }
    g
}

/// Partial derivative of the metric with respect to y_k; the only
/// y-dependent blocks are (x,x) and (x,z):
///   d g(x_i, x_j) / d y_k = s (delta_ik y_j + delta_jk y_i) / 4
///   d g(x_i, z_a) / d y_k = -delta_ik / 4
pub(crate) fn metric_y_partial<R: Ring>(m: usize, s: usize, y: &[R], k: usize) -> Vec<Vec<R>> {
    let n = 2 * m + s;
    let quarter = R::from_f64(0.25);
    let s_quarter = R::from_f64(s as f64 * 0.25);
    let mut dg = vec![vec![R::zero(); n]; n];
    for i in 0..m {
        for j in 0..m {
            let mut e = R::zero();
            if i == k {
                e = e.add(&s_quarter.mul(&y[j]));
            }
            if j == k {
                e = e.add(&s_quarter.mul(&y[i]));
            }
            dg[i][j] = e;
        }
    }
    for a in 0..s {
        let e = quarter.neg();
        dg[k][2 * m + a] = e.clone();
        dg[2 * m + a][k] = e;
    }
    dg
}

/// Gauss-Jordan inversion with partial pivoting. Returns `None` when a
/// pivot column collapses (singular input).
pub(crate) fn invert<R: Ring>(mat: &[Vec<R>]) -> Option<Vec<Vec<R>>> {
    let n = mat.len();
    let mut a: Vec<Vec<R>> = mat.to_vec();
    let mut inv: Vec<Vec<R>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { R::from_f64(1.0) } else { R::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&r1, &r2| {
            a[r1][col]
                .pivot_magnitude()
                .partial_cmp(&a[r2][col].pivot_magnitude())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot_row][col].pivot_magnitude() < 1e-300 {
            return None;
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        for j in 0..n {
            a[col][j] = a[col][j].div(&pivot);
            inv[col][j] = inv[col][j].div(&pivot);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r][col].clone();
            if factor.pivot_magnitude() == 0.0 {
                continue;
            }
            for j in 0..n {
                a[r][j] = a[r][j].sub(&factor.mul(&a[col][j]));
                inv[r][j] = inv[r][j].sub(&factor.mul(&inv[col][j]));
            }
        }
    }
    Some(inv)
}

/// Christoffel symbols of the Levi-Civita connection,
/// Gamma^k_ij = g^{kl} (d_i g_jl + d_j g_il - d_l g_ij) / 2,
/// indexed as `gamma[k][i][j]`. Partials are taken analytically; only
/// y-directions contribute.
pub(crate) fn christoffel_components<R: Ring>(
    m: usize,
    s: usize,
    y: &[R],
) -> Option<Vec<Vec<Vec<R>>>> {
    let n = 2 * m + s;
    let g = metric_components(m, s, y);
    let ginv = invert(&g)?;
    // dg[k][i][j] = d g_ij / d u_k, nonzero only for u_k = y_k
    let dg: Vec<Vec<Vec<R>>> = (0..m).map(|k| metric_y_partial(m, s, y, k)).collect();
    let partial = |a: usize, i: usize, j: usize| -> R {
        if (m..2 * m).contains(&a) {
            dg[a - m][i][j].clone()
        } else {
            R::zero()
        }
    };
    let half = R::from_f64(0.5);
    let mut gamma = vec![vec![vec![R::zero(); n]; n]; n];
    for i in 0..n {
        for j in i..n {
            // the bracket term is symmetric in (i, j)
            let brackets: Vec<R> = (0..n)
                .map(|l| {
                    partial(i, j, l)
                        .add(&partial(j, i, l))
                        .sub(&partial(l, i, j))
                })
                .collect();
            for k in 0..n {
                let mut acc = R::zero();
                for (l, b) in brackets.iter().enumerate() {
                    acc = acc.add(&ginv[k][l].mul(b));
                }
                let val = half.mul(&acc);
                gamma[k][i][j] = val.clone();
                gamma[k][j][i] = val;
            }
        }
    }
    Some(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_inverse_round_trip() {
        let m = 2;
        let s = 2;
        let y = vec![0.4, -1.3];
        let g = metric_components(m, s, &y);
        let ginv = invert(&g).unwrap();
        let n = 2 * m + s;
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += g[i][l] * ginv[l][j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (acc - want).abs() < 1e-12,
                    "g*ginv mismatch at ({i},{j}): {acc}"
                );
            }
        }
    }

    #[test]
    fn christoffel_symmetric_in_lower_indices() {
        let m = 2;
        let s = 2;
        let y = vec![0.9, 0.2];
        let gamma = christoffel_components(m, s, &y).unwrap();
        let n = 2 * m + s;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(gamma[k][i][j], gamma[k][j][i]);
                }
            }
        }
    }
}
