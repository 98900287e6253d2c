//! Exact integer and rational linear algebra on small matrices.

use num_rational::Ratio;
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, One, Zero};

use crate::error::{Error, Result};

pub type Q = Ratio<i128>;

/// Determinant of a square integer matrix by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<i64>]) -> Result<i128> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("determinant of a non-square matrix".into()));
    }
    if n == 0 {
        return Ok(1);
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = a[i][j].checked_mul(a[k][k]).ok_or(Error::Overflow("computing a determinant"))?;
                let rhs = a[i][k].checked_mul(a[k][j]).ok_or(Error::Overflow("computing a determinant"))?;
                // Bareiss guarantees exact division
                a[i][j] = lhs.checked_sub(rhs).ok_or(Error::Overflow("computing a determinant"))? / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

fn ovf(what: &'static str) -> Error {
    Error::Overflow(what)
}

/// Basis of the rational null space of an integer matrix, one vector per free
/// column of the reduced row echelon form (the free variable set to one, the
/// other free variables to zero).
pub fn null_space(rows: &[Vec<i128>], cols: usize) -> Result<NullSpace> {
    let mut a: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Q::from_integer(x)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == a.len() {
            break;
        }
        let Some(p) = (row..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = Q::one().checked_div(&a[row][col]).ok_or_else(|| ovf("reducing a weight system"))?;
        for x in a[row].iter_mut() {
            *x = x.checked_mul(&inv).ok_or_else(|| ovf("reducing a weight system"))?;
        }
        for i in 0..a.len() {
            if i == row || a[i][col].is_zero() {
                continue;
            }
            let factor = a[i][col];
            for j in 0..cols {
                let delta = factor.checked_mul(&a[row][j]).ok_or_else(|| ovf("reducing a weight system"))?;
                a[i][j] = a[i][j].checked_sub(&delta).ok_or_else(|| ovf("reducing a weight system"))?;
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    Ok(NullSpace { reduced: a, pivots, free, cols })
}

/// Parameterization of a rational null space by its free variables.
#[derive(Debug, Clone)]
pub struct NullSpace {
    reduced: Vec<Vec<Q>>,
    pivots: Vec<usize>,
    pub free: Vec<usize>,
    cols: usize,
}

impl NullSpace {
    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    /// The solution whose free variables take the given values.
    pub fn solution(&self, free_values: &[i128]) -> Result<Vec<Q>> {
        let mut x = vec![Q::zero(); self.cols];
        for (&f, &v) in self.free.iter().zip(free_values) {
            x[f] = Q::from_integer(v);
        }
        for (r, &p) in self.pivots.iter().enumerate() {
            let mut acc = Q::zero();
            for (&f, &v) in self.free.iter().zip(free_values) {
                let term = self.reduced[r][f]
                    .checked_mul(&Q::from_integer(v))
                    .ok_or_else(|| ovf("evaluating a weight solution"))?;
                acc = acc.checked_sub(&term).ok_or_else(|| ovf("evaluating a weight solution"))?;
            }
            x[p] = acc;
        }
        Ok(x)
    }
}

/// Clears denominators and divides out the common factor. Returns `None` for
/// the zero vector.
pub fn primitive_integer_vector(x: &[Q]) -> Result<Option<Vec<i128>>> {
    use num_integer::Integer;
    let mut lcm = 1i128;
    for q in x {
        lcm = lcm.lcm(q.denom());
        if lcm > i64::MAX as i128 {
            return Err(ovf("clearing denominators"));
        }
    }
    let scaled: Vec<i128> = x
        .iter()
        .map(|q| {
            q.checked_mul(&Q::from_integer(lcm))
                .map(|v| v.to_integer())
                .ok_or_else(|| ovf("clearing denominators"))
        })
        .collect::<Result<_>>()?;
    let g = scaled.iter().fold(0i128, |g, &v| g.gcd(&v));
    if g == 0 {
        return Ok(None);
    }
    Ok(Some(scaled.into_iter().map(|v| v / g).collect()))
}
