//! Polar and radial weight detection, and the polar `S¹`-action.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::poly::MixedPolynomial;

/// Integer weights together with the degree they produce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weights {
    pub weights: Vec<u64>,
    pub degree: u64,
}

/// Polar weights `P` with polar degree `d`, radial weights `Q` with radial
/// degree `d_r`. Either part is `None` when the polynomial is not weighted
/// homogeneous in that sense.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSystem {
    pub polar: Option<Weights>,
    pub radial: Option<Weights>,
}

/// Largest total of free-variable values tried when the solution space of the
/// weight equations has more than one dimension.
const FREE_SEARCH_SPAN: i128 = 24;
const FREE_SEARCH_BUDGET: usize = 250_000;

/// Finds the smallest positive integer weights and degree for the polar
/// equations `(ν_i − μ_i)·P = d` and the radial equations `(ν_i + μ_i)·Q = d_r`.
///
/// When the equations leave more than one free parameter the candidate with
/// the smallest degree, then lexicographically smallest weights, is reported
/// among primitive solutions whose free coordinates sum to at most
/// `FREE_SEARCH_SPAN` above their minimum.
pub fn detect_weights(poly: &MixedPolynomial) -> Result<WeightSystem> {
    if poly.monomials().is_empty() {
        return Ok(WeightSystem { polar: None, radial: None });
    }
    let rows = |sign: i128| -> Vec<Vec<i128>> {
        poly.monomials()
            .iter()
            .map(|m| {
                let mut row: Vec<i128> =
                    m.nu.iter().zip(&m.mu).map(|(&a, &b)| a as i128 + sign * b as i128).collect();
                row.push(-1);
                row
            })
            .collect()
    };
    Ok(WeightSystem {
        polar: solve_positive(&rows(-1), poly.n())?,
        radial: solve_positive(&rows(1), poly.n())?,
    })
}

fn solve_positive(rows: &[Vec<i128>], n: usize) -> Result<Option<Weights>> {
    let ns = exact::null_space(rows, n + 1)?;
    let k = ns.dimension();
    if k == 0 {
        return Ok(None);
    }
    let mut best: Option<Vec<i128>> = None;
    let mut tried = 0usize;
    let mut free = vec![1i128; k];
    'outer: for total in k as i128..=k as i128 + FREE_SEARCH_SPAN {
        // compositions of `total` into k positive parts, lexicographic
        free.iter_mut().for_each(|v| *v = 1);
        free[k - 1] = total - (k as i128 - 1);
        loop {
            tried += 1;
            if tried > FREE_SEARCH_BUDGET {
                break 'outer;
            }
            let x = ns.solution(&free)?;
            if let Some(v) = exact::primitive_integer_vector(&x)? {
                if v.iter().all(|&c| c > 0) {
                    let better = match &best {
                        None => true,
                        Some(b) => (v[n], &v[..n]) < (b[n], &b[..n]),
                    };
                    if better {
                        best = Some(v);
                    }
                }
            }
            if k == 1 || !next_composition(&mut free) {
                break;
            }
        }
        if k == 1 {
            break;
        }
    }
    best.map(|v| {
        let to_u64 = |x: i128| u64::try_from(x).map_err(|_| Error::Overflow("reporting weights"));
        Ok(Weights {
            weights: v[..n].iter().map(|&x| to_u64(x)).collect::<Result<_>>()?,
            degree: to_u64(v[n])?,
        })
    })
    .transpose()
}

// Advances a composition with positive parts to the next one in
// lexicographic order, keeping the total fixed.
fn next_composition(parts: &mut [i128]) -> bool {
    let k = parts.len();
    for i in (0..k - 1).rev() {
        let tail: i128 = parts[i + 1..].iter().sum();
        if tail > (k - 1 - i) as i128 {
            parts[i] += 1;
            for p in parts[i + 1..k - 1].iter_mut() {
                *p = 1;
            }
            parts[k - 1] = tail - 1 - (k - 2 - i) as i128;
            return true;
        }
    }
    false
}

/// `(z_1 λ^{p_1}, …, z_n λ^{p_n})` for unimodular `λ`.
pub fn polar_action(weights: &[u64], lambda: Complex64, point: &[Complex64]) -> Result<Vec<Complex64>> {
    if weights.len() != point.len() {
        return Err(Error::DimensionMismatch { expected: weights.len(), got: point.len() });
    }
    if (lambda.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("|lambda| = {} is not 1", lambda.norm())));
    }
    Ok(point.iter().zip(weights).map(|(z, &p)| z * lambda.powu(p as u32)).collect())
}

/// The polar action at `λ = e^{iφ}`, written with angles to avoid
/// accumulating powers of a unit complex number.
pub fn polar_rotate(weights: &[u64], phi: f64, point: &[Complex64]) -> Vec<Complex64> {
    point
        .iter()
        .zip(weights)
        .map(|(z, &p)| z * Complex64::from_polar(1.0, p as f64 * phi))
        .collect()
}
