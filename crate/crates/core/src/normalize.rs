//! Diagonal rescaling that turns every coefficient of a simplicial mixed
//! polynomial into one.
//!
//! Writing `c_i = exp(A_i + i B_i)` and `α_j = exp(γ_j + i ε_j)`, the scaled
//! monomial `c_i z^{ν_i} z̄^{μ_i}` equals `w^{ν_i} w̄^{μ_i}` for `w_j = α_j z_j`
//! exactly when `γ·(N+M) = A` and `ε·(N−M) = B`. Both systems are square and
//! nondegenerate for simplicial input.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{ExponentMatrices, MixedPolynomial};
use crate::real;
use crate::rng;

/// Condition numbers above this are reported alongside the solution.
pub const CONDITION_WARNING: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSolution {
    pub alpha: Vec<Complex64>,
    pub gamma: Vec<f64>,
    pub epsilon: Vec<f64>,
    /// `max_i |scaled coefficient − 1|`.
    pub residual: f64,
    /// Largest condition number of `N ± M`, present only when it exceeds
    /// [`CONDITION_WARNING`].
    pub condition: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Normalization {
    pub scaling: ScalingSolution,
    pub normalized: MixedPolynomial,
}

fn transposed(mats: &ExponentMatrices, sign: i64) -> DMatrix<f64> {
    let n = mats.n;
    // row i of the transpose is column i of N ± M
    DMatrix::from_fn(n, n, |i, j| mats.nu[i][j] as f64 + sign as f64 * mats.mu[i][j] as f64)
}

fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

pub fn normalize_coefficients(poly: &MixedPolynomial) -> Result<Normalization> {
    let mats = poly.exponent_matrices();
    let report = mats.is_simplicial()?;
    if mats.columns() != poly.n() {
        return Err(Error::NotSimplicial {
            reason: format!("{} monomials in {} variables", mats.columns(), poly.n()),
        });
    }
    if report.det_plus == 0 {
        return Err(Error::NotSimplicial { reason: "det(N+M) = 0".into() });
    }
    if report.det_minus == 0 {
        return Err(Error::NotSimplicial { reason: "det(N-M) = 0".into() });
    }
    let coefficients: Vec<Complex64> = poly.monomials().iter().map(|m| m.coefficient).collect();
    if let Some(i) = coefficients.iter().position(|c| c.norm() == 0.0) {
        return Err(Error::InvalidInput(format!("coefficient {i} is zero")));
    }
    let log_moduli: Vec<f64> = coefficients.iter().map(|c| c.norm().ln()).collect();
    // principal branch in (−π, π]
    let args: Vec<f64> = coefficients
        .iter()
        .map(|c| {
            let a = c.arg();
            if a == -std::f64::consts::PI { std::f64::consts::PI } else { a }
        })
        .collect();

    let plus = transposed(&mats, 1);
    let minus = transposed(&mats, -1);
    let gamma = real::solve_square(&plus, &log_moduli)
        .ok_or_else(|| Error::Numerical("N+M elimination failed".into()))?;
    let epsilon = real::solve_square(&minus, &args)
        .ok_or_else(|| Error::Numerical("N-M elimination failed".into()))?;
    let alpha: Vec<Complex64> =
        gamma.iter().zip(&epsilon).map(|(&g, &e)| Complex64::new(g, e).exp()).collect();

    let residual = poly
        .monomials()
        .iter()
        .map(|m| {
            let mut induced = Complex64::new(1.0, 0.0);
            for (j, a) in alpha.iter().enumerate() {
                induced *= a.powu(m.nu[j]) * a.conj().powu(m.mu[j]);
            }
            (m.coefficient / induced - 1.0).norm()
        })
        .fold(0.0, f64::max);
    let cond = condition_number(&plus).max(condition_number(&minus));

    Ok(Normalization {
        scaling: ScalingSolution {
            alpha,
            gamma,
            epsilon,
            residual,
            condition: (cond > CONDITION_WARNING).then_some(cond),
        },
        normalized: poly.with_unit_coefficients(),
    })
}

/// `max |f̃(α∘z) − f(z)| / (1 + |f(z)|)` over seeded random points, where `f̃`
/// has the exponents of `f` and unit coefficients.
pub fn verify_scaling(poly: &MixedPolynomial, scaling: &ScalingSolution, samples: usize, seed: u64) -> Result<f64> {
    if scaling.alpha.len() != poly.n() {
        return Err(Error::DimensionMismatch { expected: poly.n(), got: scaling.alpha.len() });
    }
    let unit = poly.with_unit_coefficients();
    let mut s = rng::stream(seed, "verify-scaling");
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let z = rng::box_point(&mut s, poly.n());
        let w: Vec<Complex64> = z.iter().zip(&scaling.alpha).map(|(a, b)| a * b).collect();
        let f = poly.eval_unchecked(&z);
        let g = unit.eval_unchecked(&w);
        worst = worst.max((g - f).norm() / (1.0 + f.norm()));
    }
    Ok(worst)
}
