//! Mixed polynomials `f(z, z̄) = Σ c_i z^{ν_i} z̄^{μ_i}` and their Wirtinger calculus.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;

/// One term `c · z^ν · z̄^μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedMonomial {
    #[serde(rename = "c")]
    pub coefficient: Complex64,
    pub nu: Vec<u32>,
    pub mu: Vec<u32>,
}

impl MixedMonomial {
    pub fn new(coefficient: Complex64, nu: Vec<u32>, mu: Vec<u32>) -> Self {
        MixedMonomial { coefficient, nu, mu }
    }

    /// Total degree in `z` minus total degree in `z̄`, weighted.
    pub fn polar_degree(&self, weights: &[u64]) -> i128 {
        self.nu
            .iter()
            .zip(&self.mu)
            .zip(weights)
            .map(|((&n, &m), &p)| (n as i128 - m as i128) * p as i128)
            .sum()
    }

    pub fn radial_degree(&self, weights: &[u64]) -> i128 {
        self.nu
            .iter()
            .zip(&self.mu)
            .zip(weights)
            .map(|((&n, &m), &q)| (n as i128 + m as i128) * q as i128)
            .sum()
    }

    fn eval_monomial(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = self.coefficient;
        for ((zj, &n), &m) in z.iter().zip(&self.nu).zip(&self.mu) {
            if n > 0 {
                acc *= zj.powu(n);
            }
            if m > 0 {
                acc *= zj.conj().powu(m);
            }
        }
        acc
    }
}

/// A mixed polynomial in canonical merged form: no two monomials share the
/// same `(ν, μ)` pair and no coefficient is zero. Monomials keep the order in
/// which their exponent pair first appeared.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedPolynomial {
    n: usize,
    monomials: Vec<MixedMonomial>,
}

impl MixedPolynomial {
    /// Builds a polynomial in `n` variables, merging repeated exponent pairs
    /// and dropping terms whose merged coefficient is exactly zero.
    pub fn new(n: usize, monomials: Vec<MixedMonomial>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("a mixed polynomial needs at least one variable".into()));
        }
        let mut merged: Vec<MixedMonomial> = Vec::with_capacity(monomials.len());
        for m in monomials {
            if m.nu.len() != n || m.mu.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: if m.nu.len() != n { m.nu.len() } else { m.mu.len() },
                });
            }
            if !(m.coefficient.re.is_finite() && m.coefficient.im.is_finite()) {
                return Err(Error::InvalidInput("non-finite coefficient".into()));
            }
            match merged.iter_mut().find(|e| e.nu == m.nu && e.mu == m.mu) {
                Some(existing) => existing.coefficient += m.coefficient,
                None => merged.push(m),
            }
        }
        merged.retain(|m| m.coefficient != Complex64::new(0.0, 0.0));
        Ok(MixedPolynomial { n, monomials: merged })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn monomials(&self) -> &[MixedMonomial] {
        &self.monomials
    }

    /// Largest total degree `|ν| + |μ|` over all monomials.
    pub fn max_degree(&self) -> u32 {
        self.monomials
            .iter()
            .map(|m| m.nu.iter().sum::<u32>() + m.mu.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn check_dim(&self, point: &[Complex64]) -> Result<()> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: point.len() });
        }
        Ok(())
    }

    /// `Σ c_i z^{ν_i} z̄^{μ_i}`.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64> {
        self.check_dim(point)?;
        Ok(self.eval_unchecked(point))
    }

    pub(crate) fn eval_unchecked(&self, point: &[Complex64]) -> Complex64 {
        self.monomials.iter().map(|m| m.eval_monomial(point)).sum()
    }

    /// Formal partials `∂f/∂z_j` and `∂f/∂z̄_j`, treating `z` and `z̄` as
    /// independent variables.
    pub fn wirtinger_gradient(&self, point: &[Complex64]) -> Result<WirtingerGradient> {
        self.check_dim(point)?;
        Ok(self.gradient_unchecked(point))
    }

    pub(crate) fn gradient_unchecked(&self, z: &[Complex64]) -> WirtingerGradient {
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        let mut d_z = vec![zero; n];
        let mut d_zbar = vec![zero; n];
        let conj: Vec<Complex64> = z.iter().map(|c| c.conj()).collect();
        for m in &self.monomials {
            for j in 0..n {
                let (nj, mj) = (m.nu[j], m.mu[j]);
                if nj == 0 && mj == 0 {
                    continue;
                }
                // product over the other coordinates
                let mut rest = m.coefficient;
                for k in (0..n).filter(|&k| k != j) {
                    if m.nu[k] > 0 {
                        rest *= z[k].powu(m.nu[k]);
                    }
                    if m.mu[k] > 0 {
                        rest *= conj[k].powu(m.mu[k]);
                    }
                }
                if nj > 0 {
                    let mut t = rest * nj as f64 * z[j].powu(nj - 1);
                    if mj > 0 {
                        t *= conj[j].powu(mj);
                    }
                    d_z[j] += t;
                }
                if mj > 0 {
                    let mut t = rest * mj as f64 * conj[j].powu(mj - 1);
                    if nj > 0 {
                        t *= z[j].powu(nj);
                    }
                    d_zbar[j] += t;
                }
            }
        }
        WirtingerGradient { d_z, d_zbar }
    }

    /// Exponent columns `N = (ν_1, …)` and `M = (μ_1, …)` in monomial order.
    pub fn exponent_matrices(&self) -> ExponentMatrices {
        ExponentMatrices {
            n: self.n,
            nu: self.monomials.iter().map(|m| m.nu.clone()).collect(),
            mu: self.monomials.iter().map(|m| m.mu.clone()).collect(),
        }
    }

    /// Same exponents with every coefficient replaced by one.
    pub fn with_unit_coefficients(&self) -> MixedPolynomial {
        MixedPolynomial {
            n: self.n,
            monomials: self
                .monomials
                .iter()
                .map(|m| MixedMonomial::new(Complex64::new(1.0, 0.0), m.nu.clone(), m.mu.clone()))
                .collect(),
        }
    }

    /// `Σ_i s_i · p_i` over polynomials in the same variables, re-merged.
    pub fn linear_combination(terms: &[(Complex64, &MixedPolynomial)]) -> Result<MixedPolynomial> {
        let n = terms.first().map(|(_, p)| p.n).ok_or_else(|| {
            Error::InvalidInput("linear combination of zero polynomials".into())
        })?;
        let mut all = Vec::new();
        for (s, p) in terms {
            if p.n != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.n });
            }
            all.extend(p.monomials.iter().map(|m| {
                MixedMonomial::new(m.coefficient * s, m.nu.clone(), m.mu.clone())
            }));
        }
        MixedPolynomial::new(n, all)
    }
}

impl<'de> Deserialize<'de> for MixedPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            monomials: Vec<MixedMonomial>,
        }
        let raw = Raw::deserialize(d)?;
        MixedPolynomial::new(raw.n, raw.monomials).map_err(serde::de::Error::custom)
    }
}

/// The two Wirtinger partial vectors of a mixed polynomial at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WirtingerGradient {
    pub d_z: Vec<Complex64>,
    pub d_zbar: Vec<Complex64>,
}

/// Exponent columns of a mixed polynomial. `nu[i]` is the column `ν_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentMatrices {
    pub n: usize,
    pub nu: Vec<Vec<u32>>,
    pub mu: Vec<Vec<u32>>,
}

impl ExponentMatrices {
    /// Number of columns (monomials).
    pub fn columns(&self) -> usize {
        self.nu.len()
    }

    /// `N + M` (sign = 1) or `N − M` (sign = −1) as a row-major `n × m` matrix.
    pub fn combined(&self, sign: i64) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|row| {
                (0..self.columns())
                    .map(|col| self.nu[col][row] as i64 + sign * self.mu[col][row] as i64)
                    .collect()
            })
            .collect()
    }

    pub fn is_simplicial(&self) -> Result<SimplicialReport> {
        if self.columns() != self.n {
            return Ok(SimplicialReport { simplicial: false, det_plus: 0, det_minus: 0 });
        }
        let det_plus = exact::determinant(&self.combined(1))?;
        let det_minus = exact::determinant(&self.combined(-1))?;
        Ok(SimplicialReport { simplicial: det_plus != 0 && det_minus != 0, det_plus, det_minus })
    }
}

/// Outcome of the simpliciality test: exactly `n` monomials with `N ± M`
/// both nondegenerate. Determinants are zero when the matrices are not square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimplicialReport {
    pub simplicial: bool,
    pub det_plus: i128,
    pub det_minus: i128,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mono(coef: f64, nu: &[u32], mu: &[u32]) -> MixedMonomial {
        MixedMonomial::new(c(coef, 0.0), nu.to_vec(), mu.to_vec())
    }

    #[test]
    fn evaluates_brieskorn_sum() {
        let f = MixedPolynomial::new(2, vec![mono(1.0, &[2, 0], &[0, 0]), mono(1.0, &[0, 3], &[0, 0])])
            .unwrap();
        assert_eq!(f.evaluate(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn evaluates_conjugate_factor() {
        let f = MixedPolynomial::new(1, vec![mono(1.0, &[3], &[1])]).unwrap();
        let v = f.evaluate(&[c(0.0, 1.0)]).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_wrong_dimension() {
        let f = MixedPolynomial::new(1, vec![mono(1.0, &[3], &[1])]).unwrap();
        assert!(matches!(
            f.evaluate(&[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
        assert!(MixedPolynomial::new(2, vec![mono(1.0, &[3], &[1])]).is_err());
    }

    #[test]
    fn merges_equal_pairs_and_drops_zeros() {
        let f = MixedPolynomial::new(
            1,
            vec![mono(1.0, &[2], &[0]), mono(2.0, &[2], &[0]), mono(1.0, &[1], &[1]), mono(-1.0, &[1], &[1])],
        )
        .unwrap();
        assert_eq!(f.monomials().len(), 1);
        assert_eq!(f.monomials()[0].coefficient, c(3.0, 0.0));
    }

    #[test]
    fn wirtinger_power_rule() {
        let f = MixedPolynomial::new(1, vec![mono(1.0, &[3], &[1])]).unwrap();
        let g = f.wirtinger_gradient(&[c(1.0, 0.0)]).unwrap();
        assert_eq!(g.d_z, vec![c(3.0, 0.0)]);
        assert_eq!(g.d_zbar, vec![c(1.0, 0.0)]);

        let g = f.wirtinger_gradient(&[c(2.0, 0.0)]).unwrap();
        assert_eq!(g.d_z, vec![c(24.0, 0.0)]);
        assert_eq!(g.d_zbar, vec![c(8.0, 0.0)]);

        let h = MixedPolynomial::new(2, vec![mono(1.0, &[2, 0], &[0, 0]), mono(1.0, &[0, 3], &[0, 0])])
            .unwrap();
        let g = h.wirtinger_gradient(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(g.d_z, vec![c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(g.d_zbar, vec![c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn exponent_matrices_of_single_monomial() {
        let f = MixedPolynomial::new(1, vec![mono(4.0, &[3], &[1])]).unwrap();
        let m = f.exponent_matrices();
        assert_eq!(m.nu, vec![vec![3]]);
        assert_eq!(m.mu, vec![vec![1]]);
    }

    #[test]
    fn simpliciality_rejects_count_mismatch_and_degenerate() {
        let f = MixedPolynomial::new(
            2,
            vec![mono(1.0, &[2, 0], &[0, 0]), mono(1.0, &[0, 3], &[0, 0]), mono(1.0, &[1, 1], &[0, 0])],
        )
        .unwrap();
        assert!(!f.exponent_matrices().is_simplicial().unwrap().simplicial);

        // N = M: every monomial is |z_j|^2, N − M = 0
        let g = MixedPolynomial::new(2, vec![mono(1.0, &[1, 0], &[1, 0]), mono(1.0, &[0, 1], &[0, 1])])
            .unwrap();
        let r = g.exponent_matrices().is_simplicial().unwrap();
        assert_eq!(r.det_minus, 0);
        assert!(!r.simplicial);
    }

    #[test]
    fn deserializes_json_spec() {
        let f: MixedPolynomial = serde_json::from_str(
            r#"{"n": 2, "monomials": [{"c": [1.0, 0.0], "nu": [3,0], "mu": [1,0]},
                                      {"c": [1.0, 0.0], "nu": [0,3], "mu": [0,0]}]}"#,
        )
        .unwrap();
        assert_eq!(f.monomials().len(), 2);
        assert!(serde_json::from_str::<MixedPolynomial>(r#"{"n": 2, "monomials": [{"c": [1,0], "nu": [3], "mu": [1]}]}"#).is_err());
    }
}
