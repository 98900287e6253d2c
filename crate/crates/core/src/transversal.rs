//! Sphere transversality: the rank test on `[z; grad g; grad h]`, the
//! monotone radial curves that witness non-tangency for Brieskorn and chain
//! families, and a sampling harness for loop families.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{DeformationFamily, FamilyKind, FamilySpec};
use crate::poly::{MixedPolynomial, WirtingerGradient};
use crate::real;
use crate::rng;
use crate::root;

/// Gradients of `Re f` and `Im f` in the coordinates `(x_1, y_1, …, x_n, y_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealGradients {
    pub grad_g: Vec<f64>,
    pub grad_h: Vec<f64>,
}

/// `∂/∂x = ∂/∂z + ∂/∂z̄` and `∂/∂y = i(∂/∂z − ∂/∂z̄)`.
pub fn real_gradients_of(g: &WirtingerGradient) -> RealGradients {
    let n = g.d_z.len();
    let mut grad_g = Vec::with_capacity(2 * n);
    let mut grad_h = Vec::with_capacity(2 * n);
    for (a, b) in g.d_z.iter().zip(&g.d_zbar) {
        let dx = a + b;
        let dy = Complex64::i() * (a - b);
        grad_g.extend([dx.re, dy.re]);
        grad_h.extend([dx.im, dy.im]);
    }
    RealGradients { grad_g, grad_h }
}

pub fn real_gradients(poly: &MixedPolynomial, point: &[Complex64]) -> Result<RealGradients> {
    Ok(real_gradients_of(&poly.wirtinger_gradient(point)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RankTest,
    RadialWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversalityCertificate {
    pub point: Vec<Complex64>,
    pub t: f64,
    pub method: Method,
    /// `σ₃` of the row-normalized matrix for the rank test, `dρ/dr(1)` for
    /// radial witnesses.
    pub margin: f64,
    /// `dξ/dr(1)` in real coordinates.
    pub witness_vector: Option<Vec<f64>>,
    /// `max |f_t(ξ(1 ± h))|` along the witness curve.
    pub curve_residual: Option<f64>,
    /// `|f_t(point)|`.
    pub on_variety: f64,
}

/// Smallest singular value of the three rows `position`, `grad_g`, `grad_h`
/// after scaling each nonzero row to unit length.
pub fn transversality_margin(position: &[f64], grad_g: &[f64], grad_h: &[f64]) -> f64 {
    let unit = |v: &[f64]| {
        let n = real::real_norm(v);
        if n > 0.0 { v.iter().map(|x| x / n).collect() } else { v.to_vec() }
    };
    real::smallest_singular_value(&[unit(position), unit(grad_g), unit(grad_h)])
}

fn require_on_variety(fam: &DeformationFamily, t: f64, point: &[Complex64]) -> Result<f64> {
    if point.len() != fam.n() {
        return Err(Error::DimensionMismatch { expected: fam.n(), got: point.len() });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidInput(format!("t = {t} is outside [0, 1]")));
    }
    if real::norm(point) == 0.0 {
        return Err(Error::Precondition("the origin lies on every sphere-free level; pick z ≠ 0".into()));
    }
    let distance = fam.value_unchecked(t, point).norm();
    let tolerance = fam.on_variety_tolerance(point);
    if distance > tolerance {
        return Err(Error::OffVariety { distance, tolerance });
    }
    Ok(distance)
}

pub fn rank_test(fam: &DeformationFamily, t: f64, point: &[Complex64]) -> Result<TransversalityCertificate> {
    let on_variety = require_on_variety(fam, t, point)?;
    let rg = real_gradients_of(&fam.gradient_unchecked(t, point));
    Ok(TransversalityCertificate {
        point: point.to_vec(),
        t,
        method: Method::RankTest,
        margin: transversality_margin(&real::to_real(point), &rg.grad_g, &rg.grad_h),
        witness_vector: None,
        curve_residual: None,
        on_variety,
    })
}

/// The positive `s` with `s^a (τ + (1−τ) W s^{2b}) = r (τ + (1−τ) W)`,
/// `W = w_abs^{2b}`. The left side is strictly increasing in `s`, so the
/// root is unique; `r = 1` gives `s = 1`.
pub fn solve_phi(a: u32, b: u32, tau: f64, w_abs: f64, r: f64) -> Result<f64> {
    if a == 0 {
        return Err(Error::InvalidInput("a must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidInput(format!("tau = {tau} is outside [0, 1]")));
    }
    if !(w_abs > 0.0 && w_abs.is_finite() && r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("need w_abs > 0 and r > 0, got {w_abs} and {r}")));
    }
    let big_w = w_abs.powi(2 * b as i32);
    let (a, b) = (a as i32, b as i32);
    let c = (1.0 - tau) * big_w;
    let target = r * (tau + c);
    let guess = r.powf(1.0 / a as f64);
    root::solve_increasing(
        |s| {
            let sa = s.powi(a);
            let s2b = s.powi(2 * b);
            let value = sa * (tau + c * s2b);
            let deriv = a as f64 * s.powi(a - 1) * (tau + c * s2b) + sa * c * 2.0 * b as f64 * s.powi(2 * b - 1);
            (value, deriv)
        },
        target,
        guess.min(1.0),
        guess.max(1.0),
    )
}

/// `ξ(r) = (φ_j(r)·w_j)`: the curve through `w` along which every monomial of a
/// Brieskorn member scales by `r`. Zero coordinates stay zero.
pub fn radial_curve(fam: &DeformationFamily, t: f64, point: &[Complex64], r: f64) -> Result<Vec<Complex64>> {
    if fam.spec.kind != FamilyKind::Brieskorn {
        return Err(Error::Precondition(format!("radial curves are built for brieskorn families, not {}", fam.spec.kind)));
    }
    if point.len() != fam.n() {
        return Err(Error::DimensionMismatch { expected: fam.n(), got: point.len() });
    }
    point
        .iter()
        .enumerate()
        .map(|(j, w)| {
            if *w == Complex64::new(0.0, 0.0) {
                Ok(*w)
            } else {
                Ok(w * solve_phi(fam.spec.a[j], fam.spec.b[j], t, w.norm(), r)?)
            }
        })
        .collect()
}

const WITNESS_STEP: f64 = 1e-6;

fn witness_from_curve<F>(curve: F, point: &[Complex64], fam: &DeformationFamily, t: f64) -> Result<(Vec<f64>, f64, f64)>
where
    F: Fn(f64) -> Result<Vec<Complex64>>,
{
    let h = WITNESS_STEP;
    let plus = curve(1.0 + h)?;
    let minus = curve(1.0 - h)?;
    let du: Vec<f64> = real::to_real(&plus)
        .iter()
        .zip(real::to_real(&minus))
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect();
    let margin = 2.0 * real::dot(&real::to_real(point), &du);
    let residual = fam.value_unchecked(t, &plus).norm().max(fam.value_unchecked(t, &minus).norm());
    Ok((du, margin, residual))
}

pub fn radial_witness_brieskorn(fam: &DeformationFamily, t: f64, point: &[Complex64]) -> Result<TransversalityCertificate> {
    if fam.spec.kind != FamilyKind::Brieskorn {
        return Err(Error::Precondition(format!("radial witnesses are built for brieskorn families, not {}", fam.spec.kind)));
    }
    let on_variety = require_on_variety(fam, t, point)?;
    let (du, margin, residual) = witness_from_curve(|r| radial_curve(fam, t, point, r), point, fam, t)?;
    Ok(TransversalityCertificate {
        point: point.to_vec(),
        t,
        method: Method::RadialWitness,
        margin,
        witness_vector: Some(du),
        curve_residual: Some(residual),
        on_variety,
    })
}

/// One check of `ψ(1) = 1`, `ψ' > 0`, and `ψ(r)^a ≤ r` for `r ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecursionCheck {
    pub index: usize,
    pub psi_at_one: f64,
    pub derivative: f64,
    /// `ψ(r_j)^{a_j} / r_j`.
    pub power_ratio: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeIWitnessTrace {
    /// Indices with `w_j = 0` (zero-based).
    pub i0: Vec<usize>,
    /// Indices whose monomial does not vanish at `w`.
    pub j_set: Vec<usize>,
    /// Maximal runs `[start, end]` of `j_set`.
    pub components: Vec<(usize, usize)>,
    /// `1` when monomial `j` carries the trailing factor `z_{j+1}`, else `0`.
    pub epsilon_flags: Vec<u8>,
    pub eval_radius: f64,
    /// `r_j` at the evaluation radius; absent outside `j_set`.
    pub r_values: Vec<Option<f64>>,
    /// `s_j` at the evaluation radius (`1` outside `j_set`).
    pub s_values: Vec<f64>,
    /// Whether a component ends at the last index, where the last monomial
    /// has no trailing factor.
    pub ends_at_last: bool,
    /// Set when `j_set` is empty and the witness is uniform scaling.
    pub uniform_scaling: bool,
    pub checks: Vec<RecursionCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeIWitness {
    pub certificate: TransversalityCertificate,
    pub trace: TypeIWitnessTrace,
}

struct ChainData {
    j_set: Vec<usize>,
    components: Vec<(usize, usize)>,
}

fn chain_components(point: &[Complex64]) -> ChainData {
    let n = point.len();
    let nonzero = |j: usize| point[j] != Complex64::new(0.0, 0.0);
    let j_set: Vec<usize> = (0..n).filter(|&j| nonzero(j) && (j + 1 == n || nonzero(j + 1))).collect();
    let mut components: Vec<(usize, usize)> = Vec::new();
    for &j in &j_set {
        match components.last_mut() {
            Some(last) if last.1 + 1 == j => last.1 = j,
            _ => components.push((j, j)),
        }
    }
    ChainData { j_set, components }
}

// (r_j, s_j) along each component, solved downward from its last index
fn chain_scales(fam: &DeformationFamily, t: f64, point: &[Complex64], data: &ChainData, r: f64) -> Result<(Vec<Option<f64>>, Vec<f64>)> {
    let n = point.len();
    let mut r_vals = vec![None; n];
    let mut s_vals = vec![1.0; n];
    for &(start, end) in &data.components {
        let mut r_j = r;
        for j in (start..=end).rev() {
            let s = solve_phi(fam.spec.a[j], fam.spec.b[j], t, point[j].norm(), r_j)?;
            r_vals[j] = Some(r_j);
            s_vals[j] = s;
            r_j = r / s;
        }
    }
    Ok((r_vals, s_vals))
}

/// The chain-family witness at `point ∈ V_t`, with the recursion traced at
/// `eval_radius`.
pub fn type_i_witness(fam: &DeformationFamily, t: f64, point: &[Complex64], eval_radius: f64) -> Result<TypeIWitness> {
    if fam.spec.kind != FamilyKind::TypeI {
        return Err(Error::Precondition(format!("the chain witness needs a type_i family, not {}", fam.spec.kind)));
    }
    if !(eval_radius > 0.0 && eval_radius.is_finite()) {
        return Err(Error::InvalidInput(format!("evaluation radius must be positive, got {eval_radius}")));
    }
    let on_variety = require_on_variety(fam, t, point)?;
    let n = fam.n();
    let data = chain_components(point);
    let i0: Vec<usize> = (0..n).filter(|&j| point[j] == Complex64::new(0.0, 0.0)).collect();
    let epsilon_flags: Vec<u8> = (0..n).map(|j| u8::from(j + 1 < n)).collect();

    let uniform = data.j_set.is_empty();
    let curve = |r: f64| -> Result<Vec<Complex64>> {
        if uniform {
            return Ok(real::scale(point, r));
        }
        let (_, s) = chain_scales(fam, t, point, &data, r)?;
        Ok(point.iter().zip(&s).map(|(w, s)| w * s).collect())
    };
    let (du, margin, residual) = witness_from_curve(curve, point, fam, t)?;

    let (r_values, s_values) = if uniform {
        (vec![Some(eval_radius); n], vec![eval_radius; n])
    } else {
        chain_scales(fam, t, point, &data, eval_radius)?
    };
    let mut checks = Vec::new();
    for &j in &data.j_set {
        let (a, b, w) = (fam.spec.a[j], fam.spec.b[j], point[j].norm());
        let r_j = r_values[j].expect("indices in J carry r_j");
        let psi_at_one = solve_phi(a, b, t, w, 1.0)?;
        let h = 1e-6 * r_j.max(1.0);
        let derivative = (solve_phi(a, b, t, w, r_j + h)? - solve_phi(a, b, t, w, r_j - h)?) / (2.0 * h);
        let power_ratio = s_values[j].powi(a as i32) / r_j;
        let holds = (psi_at_one - 1.0).abs() <= 1e-12
            && derivative > 0.0
            && (r_j < 1.0 || power_ratio <= 1.0 + 1e-12);
        checks.push(RecursionCheck { index: j, psi_at_one, derivative, power_ratio, holds });
    }
    let ends_at_last = data.components.last().is_some_and(|c| c.1 + 1 == n);
    Ok(TypeIWitness {
        certificate: TransversalityCertificate {
            point: point.to_vec(),
            t,
            method: Method::RadialWitness,
            margin,
            witness_vector: Some(du),
            curve_residual: Some(residual),
            on_variety,
        },
        trace: TypeIWitnessTrace {
            i0,
            j_set: data.j_set,
            components: data.components,
            epsilon_flags,
            eval_radius,
            r_values,
            s_values,
            ends_at_last,
            uniform_scaling: uniform,
            checks,
        },
    })
}

/// Projects a starting point onto `V_t ∩ S_radius` by Newton steps of minimum
/// norm on `(Re f_t, Im f_t, (‖z‖² − radius²)/2)`. Returns `None` when the
/// iteration does not settle.
pub fn project_to_link(fam: &DeformationFamily, t: f64, start: &[Complex64], radius: f64) -> Option<Vec<Complex64>> {
    let mut x = real::to_real(start);
    for _ in 0..60 {
        let z = real::from_real(&x);
        let f = fam.value_unchecked(t, &z);
        let rho = 0.5 * (real::dot(&x, &x) - radius * radius);
        let scale = 1.0 + radius.powi(fam.max_degree() as i32);
        if f.norm() <= 1e-14 * scale && rho.abs() <= 1e-15 * radius * radius {
            let z = real::from_real(&x);
            return (real::norm(&z) - radius).abs().le(&(1e-12 * radius)).then_some(z);
        }
        let rg = real_gradients_of(&fam.gradient_unchecked(t, &z));
        let step = real::min_norm_solve(&[rg.grad_g, rg.grad_h, x.clone()], &[-f.re, -f.im, -rho], 1e-300).ok()?;
        let len = real::real_norm(&step);
        if !len.is_finite() {
            return None;
        }
        // damp very long steps
        let k = if len > 0.5 * radius { 0.5 * radius / len } else { 1.0 };
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi += k * si;
        }
    }
    let z = real::from_real(&x);
    let ok = fam.value_unchecked(t, &z).norm() <= 1e-12 * (1.0 + radius.powi(fam.max_degree() as i32))
        && (real::norm(&z) - radius).abs() <= 1e-12 * radius;
    ok.then_some(z)
}

/// Random point of `V_t ∩ S_radius` from seeded sphere starts, trying at most
/// `attempts` starts.
pub fn sample_link_point(
    fam: &DeformationFamily,
    t: f64,
    radius: f64,
    stream: &mut rng::Stream,
    attempts: usize,
) -> Option<Vec<Complex64>> {
    (0..attempts).find_map(|_| {
        let start = rng::sphere_point(stream, fam.n(), radius);
        project_to_link(fam, t, &start, radius)
    })
}

/// A sampled point whose margin fell below the threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlaggedPoint {
    pub t: f64,
    pub point: Vec<Complex64>,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub family: FamilySpec,
    pub t_grid: Vec<f64>,
    pub radius: f64,
    pub samples_per_t: usize,
    pub seed: u64,
    pub threshold: f64,
    /// `None` when no sample landed on the variety.
    pub min_margin: Option<f64>,
    pub argmin_point: Option<Vec<Complex64>>,
    pub argmin_t: Option<f64>,
    pub per_t_min: Vec<Option<f64>>,
    pub flagged: Vec<FlaggedPoint>,
    pub evaluated: usize,
    pub sampler_failures: usize,
    pub label: String,
}

/// Starts per sample before the sampler gives up on it.
pub const SAMPLER_ATTEMPTS: usize = 20;

/// Rank-test margins at seeded points of `V_t ∩ S_radius` for a loop family.
pub fn conjecture_search_type_ii(
    fam: &DeformationFamily,
    t_grid: &[f64],
    radius: f64,
    samples: usize,
    seed: u64,
    threshold: f64,
) -> Result<ConjectureReport> {
    if fam.spec.kind != FamilyKind::TypeII {
        return Err(Error::Precondition(format!("the conjecture search is for type_ii families, not {}", fam.spec.kind)));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::InvalidInput("t grid must be a nonempty subset of [0, 1]".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..t_grid.len()).flat_map(|ti| (0..samples).map(move |k| (ti, k))).collect();
    let results: Vec<Option<(Vec<Complex64>, f64)>> = jobs
        .par_iter()
        .map(|&(ti, k)| {
            let t = t_grid[ti];
            let mut s = rng::stream(seed, &format!("sample:{ti}:{k}"));
            let z = sample_link_point(fam, t, radius, &mut s, SAMPLER_ATTEMPTS)?;
            let cert = rank_test(fam, t, &z).ok()?;
            Some((z, cert.margin))
        })
        .collect();

    let mut per_t_min: Vec<Option<f64>> = vec![None; t_grid.len()];
    let mut best: Option<(f64, usize)> = None;
    let mut flagged = Vec::new();
    let mut failures = 0;
    for (i, (&(ti, _), res)) in jobs.iter().zip(&results).enumerate() {
        let Some((z, m)) = res else {
            failures += 1;
            continue;
        };
        per_t_min[ti] = Some(per_t_min[ti].map_or(*m, |v: f64| v.min(*m)));
        if best.is_none_or(|(b, _)| *m < b) {
            best = Some((*m, i));
        }
        if *m < threshold {
            flagged.push(FlaggedPoint { t: t_grid[ti], point: z.clone(), margin: *m });
        }
    }
    let argmin = best.map(|(_, i)| (results[i].as_ref().expect("best is a success").0.clone(), t_grid[jobs[i].0]));
    Ok(ConjectureReport {
        family: fam.spec.clone(),
        t_grid: t_grid.to_vec(),
        radius,
        samples_per_t: samples,
        seed,
        threshold,
        min_margin: best.map(|b| b.0),
        argmin_point: argmin.as_ref().map(|a| a.0.clone()),
        argmin_t: argmin.map(|a| a.1),
        per_t_min,
        flagged,
        evaluated: jobs.len() - failures,
        sampler_failures: failures,
        label: "evidence only; the transversality question for this family is open".into(),
    })
}
