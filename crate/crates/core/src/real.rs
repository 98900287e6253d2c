//! Real coordinates `(x_1, y_1, …, x_n, y_n)` on `ℂⁿ` and small dense solves.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn to_real(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub fn from_real(x: &[f64]) -> Vec<Complex64> {
    x.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

pub fn norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn real_norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Hermitian product `Σ a_j conj(b_j)`.
pub fn hermitian(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn scale(z: &[Complex64], s: f64) -> Vec<Complex64> {
    z.iter().map(|c| c * s).collect()
}

/// Smallest singular value of the matrix with the given rows.
pub fn smallest_singular_value(rows: &[Vec<f64>]) -> f64 {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    if m == 0 || n < m {
        return 0.0;
    }
    let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let sv = a.singular_values();
    sv.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Minimum-norm solution of the underdetermined system `A v = b` via the
/// regularized normal equations `v = Aᵀ (A Aᵀ + ε I)⁻¹ b`.
pub fn min_norm_solve(rows: &[Vec<f64>], rhs: &[f64], floor: f64) -> Result<Vec<f64>> {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let mut gram = &a * a.transpose();
    for i in 0..m {
        gram[(i, i)] += floor;
    }
    let y = gram
        .cholesky()
        .ok_or_else(|| Error::Numerical("normal equations are not positive definite".into()))?
        .solve(&DVector::from_column_slice(rhs));
    Ok((a.transpose() * y).iter().cloned().collect())
}

/// Solves the square system `A x = b` by partially pivoted LU.
pub fn solve_square(a: &DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    a.clone().lu().solve(&DVector::from_column_slice(b)).map(|x| x.iter().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_norm_solution_is_orthogonal_to_kernel() {
        let rows = vec![vec![1.0, 1.0, 0.0]];
        let v = min_norm_solve(&rows, &[2.0], 0.0).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14 && v[2].abs() < 1e-14);
    }

    #[test]
    fn singular_values_of_orthonormal_rows() {
        let s = smallest_singular_value(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        assert!((s - 1.0).abs() < 1e-14);
        let s = smallest_singular_value(&[vec![1.0, 0.0], vec![1.0, 0.0]]);
        assert!(s.abs() < 1e-14);
    }
}
