//! The deformation families `f_t = (1−t)·f + t·g` joining a mixed polynomial
//! to its holomorphic associate, and the reference maps `η` and `ψ`.

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{MixedMonomial, MixedPolynomial, WirtingerGradient};
use crate::real;
use crate::root;

/// Upper bounds on family exponents and dimension.
pub const MAX_EXPONENT: u32 = 32;
pub const MAX_VARIABLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `Σ z_j^{a_j+b_j} z̄_j^{b_j}` and `Σ z_j^{a_j}`.
    Brieskorn,
    /// Chain type: `Σ_{j<n} z_j^{a_j+b_j} z̄_j^{b_j} z_{j+1} + z_n^{a_n+b_n} z̄_n^{b_n}`.
    #[serde(rename = "type_i")]
    TypeI,
    /// Loop type: as the chain type, with the last monomial also multiplied by `z_1`.
    #[serde(rename = "type_ii")]
    TypeII,
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FamilyKind::Brieskorn => "brieskorn",
            FamilyKind::TypeI => "type_i",
            FamilyKind::TypeII => "type_ii",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    #[serde(rename = "family")]
    pub kind: FamilyKind,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, a: &[u32], b: &[u32]) -> Self {
        FamilySpec { kind, a: a.to_vec(), b: b.to_vec() }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.len();
        if n == 0 || n > MAX_VARIABLES {
            return Err(Error::InvalidInput(format!("family needs 1..={MAX_VARIABLES} variables, got {n}")));
        }
        if self.b.len() != n {
            return Err(Error::InvalidInput(format!("a has {n} entries but b has {}", self.b.len())));
        }
        if self.a.contains(&0) {
            return Err(Error::InvalidInput("every a_j must be at least 1".into()));
        }
        if self.a.iter().chain(&self.b).any(|&e| e > MAX_EXPONENT) {
            return Err(Error::InvalidInput(format!("exponents above {MAX_EXPONENT} are not supported")));
        }
        if self.kind == FamilyKind::TypeII && n < 2 {
            return Err(Error::InvalidInput("type_ii needs at least two variables".into()));
        }
        Ok(())
    }

    /// Index of the trailing variable multiplied into monomial `j`, if any.
    pub fn successor(&self, j: usize) -> Option<usize> {
        let n = self.n();
        match self.kind {
            FamilyKind::Brieskorn => None,
            FamilyKind::TypeI => (j + 1 < n).then_some(j + 1),
            FamilyKind::TypeII => Some((j + 1) % n),
        }
    }
}

/// Serialized as `{"r": r, "eta0": e}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MilnorTubeSpec {
    #[serde(rename = "r")]
    pub radius: f64,
    pub eta0: f64,
}

impl MilnorTubeSpec {
    pub fn new(radius: f64, eta0: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite() && eta0 > 0.0 && eta0.is_finite()) {
            return Err(Error::InvalidInput(format!("tube needs r > 0 and eta0 > 0, got r = {radius}, eta0 = {eta0}")));
        }
        Ok(MilnorTubeSpec { radius, eta0 })
    }
}

/// `f_t = (1−t)·endpoint_mixed + t·endpoint_holomorphic` for `t ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeformationFamily {
    pub spec: FamilySpec,
    pub endpoint_mixed: MixedPolynomial,
    pub endpoint_holomorphic: MixedPolynomial,
    /// Polar weights `p_j = lcm(a)/a_j`-style weights shared by every member.
    pub polar_weights: Vec<u64>,
    pub polar_degree: u64,
}

fn unit() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

pub fn build_family(spec: &FamilySpec) -> Result<DeformationFamily> {
    spec.validate()?;
    let n = spec.n();
    let mut mixed = Vec::with_capacity(n);
    let mut holo = Vec::with_capacity(n);
    for j in 0..n {
        let mut nu = vec![0u32; n];
        let mut mu = vec![0u32; n];
        nu[j] = spec.a[j] + spec.b[j];
        mu[j] = spec.b[j];
        let mut nu_h = vec![0u32; n];
        nu_h[j] = spec.a[j];
        if let Some(k) = spec.successor(j) {
            nu[k] += 1;
            nu_h[k] += 1;
        }
        mixed.push(MixedMonomial::new(unit(), nu, mu));
        holo.push(MixedMonomial::new(unit(), nu_h, vec![0; n]));
    }
    let endpoint_mixed = MixedPolynomial::new(n, mixed)?;
    let endpoint_holomorphic = MixedPolynomial::new(n, holo)?;
    let (polar_weights, polar_degree) = match spec.kind {
        FamilyKind::Brieskorn => brieskorn_weights(&spec.a)?,
        _ => {
            let w = crate::weights::detect_weights(&endpoint_mixed)?;
            let p = w.polar.ok_or_else(|| {
                Error::InvalidInput(format!("{} family with a = {:?} has no polar weights", spec.kind, spec.a))
            })?;
            (p.weights, p.degree)
        }
    };
    Ok(DeformationFamily { spec: spec.clone(), endpoint_mixed, endpoint_holomorphic, polar_weights, polar_degree })
}

/// `d = lcm(a)`, `p_j = d / a_j`, with overflow checks.
pub fn brieskorn_weights(a: &[u32]) -> Result<(Vec<u64>, u64)> {
    let mut d: u64 = 1;
    for &aj in a {
        let g = d.gcd(&(aj as u64));
        d = (d / g).checked_mul(aj as u64).ok_or(Error::Overflow("computing lcm(a)"))?;
    }
    Ok((a.iter().map(|&aj| d / aj as u64).collect(), d))
}

impl DeformationFamily {
    pub fn n(&self) -> usize {
        self.spec.n()
    }

    /// The member `f_t` as a mixed polynomial (union of both endpoints'
    /// monomials with coefficients `1−t` and `t`, merged).
    pub fn member(&self, t: f64) -> Result<MixedPolynomial> {
        if t == 0.0 {
            return Ok(self.endpoint_mixed.clone());
        }
        if t == 1.0 {
            return Ok(self.endpoint_holomorphic.clone());
        }
        MixedPolynomial::linear_combination(&[
            (Complex64::new(1.0 - t, 0.0), &self.endpoint_mixed),
            (Complex64::new(t, 0.0), &self.endpoint_holomorphic),
        ])
    }

    /// `f_t(z)` without materializing the member polynomial.
    pub fn value(&self, t: f64, z: &[Complex64]) -> Result<Complex64> {
        let f = self.endpoint_mixed.evaluate(z)?;
        let g = self.endpoint_holomorphic.eval_unchecked(z);
        Ok(f * (1.0 - t) + g * t)
    }

    pub fn value_unchecked(&self, t: f64, z: &[Complex64]) -> Complex64 {
        self.endpoint_mixed.eval_unchecked(z) * (1.0 - t) + self.endpoint_holomorphic.eval_unchecked(z) * t
    }

    pub fn gradient(&self, t: f64, z: &[Complex64]) -> Result<WirtingerGradient> {
        if z.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: z.len() });
        }
        Ok(self.gradient_unchecked(t, z))
    }

    pub fn gradient_unchecked(&self, t: f64, z: &[Complex64]) -> WirtingerGradient {
        let f = self.endpoint_mixed.gradient_unchecked(z);
        let g = self.endpoint_holomorphic.gradient_unchecked(z);
        WirtingerGradient {
            d_z: f.d_z.iter().zip(&g.d_z).map(|(a, b)| a * (1.0 - t) + b * t).collect(),
            d_zbar: f.d_zbar.iter().zip(&g.d_zbar).map(|(a, b)| a * (1.0 - t) + b * t).collect(),
        }
    }

    /// `∂f_t/∂t = g − f`, independent of `t`.
    pub fn t_derivative(&self, t: f64, z: &[Complex64]) -> Result<Complex64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Precondition(format!("t = {t} is outside [0, 1]")));
        }
        Ok(self.endpoint_holomorphic.evaluate(z)? - self.endpoint_mixed.evaluate(z)?)
    }

    pub fn t_derivative_unchecked(&self, z: &[Complex64]) -> Complex64 {
        self.endpoint_holomorphic.eval_unchecked(z) - self.endpoint_mixed.eval_unchecked(z)
    }

    /// Largest total degree among both endpoints.
    pub fn max_degree(&self) -> u32 {
        self.endpoint_mixed.max_degree().max(self.endpoint_holomorphic.max_degree())
    }

    /// Default on-variety tolerance `1e-8·(1 + ‖z‖^{maxdeg})`.
    pub fn on_variety_tolerance(&self, z: &[Complex64]) -> f64 {
        1e-8 * (1.0 + real::norm(z).powi(self.max_degree() as i32))
    }
}

/// `w_j = z_j |z_j|^{2 b_j / a_j}`: carries `f_{a,b}` values to `f_a` values.
/// Zero coordinates map to zero.
pub fn eta_map(spec: &FamilySpec, point: &[Complex64]) -> Result<Vec<Complex64>> {
    if spec.kind != FamilyKind::Brieskorn {
        return Err(Error::Precondition(format!("eta is defined for brieskorn families, not {}", spec.kind)));
    }
    spec.validate()?;
    if point.len() != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), got: point.len() });
    }
    Ok(point
        .iter()
        .zip(spec.a.iter().zip(&spec.b))
        .map(|(z, (&a, &b))| {
            let r = z.norm();
            if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                z * r.powf(2.0 * b as f64 / a as f64)
            }
        })
        .collect())
}

/// `s∘w = (w_1 s^{p_1}, …)` with `s > 0` chosen so that `‖s∘w‖ = radius`.
pub fn normalize_to_sphere(weights: &[u64], point: &[Complex64], radius: f64) -> Result<Vec<Complex64>> {
    if weights.len() != point.len() {
        return Err(Error::DimensionMismatch { expected: weights.len(), got: point.len() });
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    if weights.contains(&0) {
        return Err(Error::InvalidInput("weights must be positive".into()));
    }
    let moduli: Vec<f64> = point.iter().map(|c| c.norm_sqr()).collect();
    if moduli.iter().all(|&m| m == 0.0) {
        return Err(Error::InvalidInput("cannot normalize the zero vector".into()));
    }
    let s = root::solve_increasing(
        |s| {
            let mut v = 0.0;
            let mut dv = 0.0;
            for (&m, &p) in moduli.iter().zip(weights) {
                let e = 2 * p as i32;
                v += m * s.powi(e);
                dv += m * e as f64 * s.powi(e - 1);
            }
            (v, dv)
        },
        radius * radius,
        1.0,
        1.0,
    )?;
    Ok(point.iter().zip(weights).map(|(w, &p)| w * s.powi(p as i32)).collect())
}
