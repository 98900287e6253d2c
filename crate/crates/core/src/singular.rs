//! Mixed singular points: the unimodular-parallelism residual, a seeded search
//! for small residuals on spheres and level sets, and the per-index
//! inequalities that rule singular points out.
//!
//! A point is mixed singular for `f` when `conj(∂f/∂z) = λ·∂f/∂z̄` for some
//! `|λ| = 1`. With `u = conj(∂f/∂z)` and `v = ∂f/∂z̄` the distance to that
//! condition is `min_{|λ|=1} ‖u − λv‖ = sqrt(‖u‖² + ‖v‖² − 2|⟨u, v⟩|)`, attained
//! at `λ = ⟨u, v⟩ / |⟨u, v⟩|`.
//!
//! Searches here produce numerical evidence only. A positive minimum over a
//! finite set of local searches does not prove the absence of singular points.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{DeformationFamily, FamilyKind, FamilySpec};
use crate::poly::{MixedPolynomial, WirtingerGradient};
use crate::real;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityResidualReport {
    pub point: Vec<Complex64>,
    /// Family parameter, when the polynomial is a family member.
    pub t: Option<f64>,
    pub residual: f64,
    pub lambda_star: Option<Complex64>,
    /// `|f(point)|`.
    pub on_variety: f64,
}

/// Closed-form `min_{|λ|=1} ‖u − λ v‖` and its minimizer (absent when `v = 0`).
pub fn parallelism_residual(u: &[Complex64], v: &[Complex64]) -> (f64, Option<Complex64>) {
    let vnorm = real::norm(v);
    if vnorm == 0.0 {
        return (real::norm(u), None);
    }
    let inner = real::hermitian(u, v);
    let lambda = if inner.norm() > 0.0 { inner / inner.norm() } else { Complex64::new(1.0, 0.0) };
    // evaluate the norm directly; the expanded form cancels badly near zero
    let r = u.iter().zip(v).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt();
    (r, Some(lambda))
}

fn residual_of_gradient(g: &WirtingerGradient) -> (f64, Option<Complex64>) {
    let u: Vec<Complex64> = g.d_z.iter().map(|c| c.conj()).collect();
    parallelism_residual(&u, &g.d_zbar)
}

pub fn singularity_residual(poly: &MixedPolynomial, point: &[Complex64]) -> Result<SingularityResidualReport> {
    let g = poly.wirtinger_gradient(point)?;
    let (residual, lambda_star) = residual_of_gradient(&g);
    Ok(SingularityResidualReport {
        point: point.to_vec(),
        t: None,
        residual,
        lambda_star,
        on_variety: poly.eval_unchecked(point).norm(),
    })
}

/// The residual for the family member `f_t`.
pub fn family_residual(fam: &DeformationFamily, t: f64, point: &[Complex64]) -> Result<SingularityResidualReport> {
    let g = fam.gradient(t, point)?;
    let (residual, lambda_star) = residual_of_gradient(&g);
    Ok(SingularityResidualReport {
        point: point.to_vec(),
        t: Some(t),
        residual,
        lambda_star,
        on_variety: fam.value_unchecked(t, point).norm(),
    })
}

/// Knobs for the local searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchOptions {
    pub max_iterations: usize,
    /// Central-difference step for gradients of `residual²`.
    pub fd_step: f64,
    /// Minimum residual above which the search reports `certified`.
    pub tolerance: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_iterations: 200, fd_step: 1e-6, tolerance: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
}

/// Where the search runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchDomain {
    /// The sphere `‖z‖ = radius`.
    Sphere { radius: f64 },
    /// The Milnor tube wall `|f_t(z)| = eta0` inside the ball `‖z‖ ≤ radius`.
    Level { eta0: f64, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellSearchReport {
    pub family: FamilySpec,
    pub t_grid: Vec<f64>,
    pub domain: SearchDomain,
    pub min_residual_found: f64,
    pub argmin_point: Vec<Complex64>,
    pub argmin_t: f64,
    /// Minimum residual per grid value of `t`.
    pub per_t_min: Vec<f64>,
    pub search_budget: SearchBudget,
    pub seed: u64,
    pub converged_restarts: usize,
    /// Restarts whose starting point could not be placed in the domain.
    pub failed_starts: usize,
    pub tolerance: f64,
    pub certified: bool,
    /// Set when no restart converged within its budget.
    pub diagnostic: Option<String>,
    pub note: String,
}

struct LocalResult {
    x: Vec<f64>,
    value: f64,
    converged: bool,
}

// The constraint surface the local search stays on.
trait Surface: Sync {
    fn retract(&self, x: &[f64]) -> Option<Vec<f64>>;
    fn tangent(&self, x: &[f64], g: &[f64]) -> Vec<f64>;
    fn scale(&self) -> f64;
}

struct SphereSurface {
    radius: f64,
}

impl Surface for SphereSurface {
    fn retract(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = real::real_norm(x);
        (n > 0.0).then(|| x.iter().map(|v| v * self.radius / n).collect())
    }
    fn tangent(&self, x: &[f64], g: &[f64]) -> Vec<f64> {
        let k = real::dot(g, x) / real::dot(x, x);
        g.iter().zip(x).map(|(a, b)| a - k * b).collect()
    }
    fn scale(&self) -> f64 {
        self.radius
    }
}

struct LevelSurface<'a> {
    fam: &'a DeformationFamily,
    t: f64,
    eta0: f64,
    radius: f64,
}

impl LevelSurface<'_> {
    // gradient of |f_t| in real coordinates
    fn modulus_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let z = real::from_real(x);
        let f = self.fam.value_unchecked(self.t, &z);
        let rg = crate::transversal::real_gradients_of(&self.fam.gradient_unchecked(self.t, &z));
        let m = f.norm();
        let g = rg.grad_g.iter().zip(&rg.grad_h).map(|(a, b)| (f.re * a + f.im * b) / m).collect();
        (m, g)
    }
}

impl Surface for LevelSurface<'_> {
    fn retract(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut y = x.to_vec();
        for _ in 0..30 {
            let (m, g) = self.modulus_gradient(&y);
            if !m.is_finite() || m == 0.0 {
                return None;
            }
            let err = m - self.eta0;
            if err.abs() <= 1e-13 * self.eta0 {
                break;
            }
            let gg = real::dot(&g, &g);
            if gg == 0.0 {
                return None;
            }
            for (yi, gi) in y.iter_mut().zip(&g) {
                *yi -= err * gi / gg;
            }
        }
        let (m, _) = self.modulus_gradient(&y);
        let ok = (m - self.eta0).abs() <= 1e-10 * self.eta0 && real::real_norm(&y) <= self.radius;
        ok.then_some(y)
    }
    fn tangent(&self, x: &[f64], g: &[f64]) -> Vec<f64> {
        let (_, n) = self.modulus_gradient(x);
        let k = real::dot(g, &n) / real::dot(&n, &n);
        g.iter().zip(&n).map(|(a, b)| a - k * b).collect()
    }
    fn scale(&self) -> f64 {
        self.radius
    }
}

fn minimize<F: Fn(&[f64]) -> f64>(
    objective: F,
    surface: &dyn Surface,
    start: Vec<f64>,
    opts: &SearchOptions,
) -> LocalResult {
    let mut x = start;
    let mut fx = objective(&x);
    let mut step = 0.1 * surface.scale();
    let h = opts.fd_step;
    let dim = x.len();
    for _ in 0..opts.max_iterations {
        let mut g = vec![0.0; dim];
        let mut probe = x.clone();
        for i in 0..dim {
            let orig = probe[i];
            probe[i] = orig + h;
            let fp = objective(&probe);
            probe[i] = orig - h;
            let fm = objective(&probe);
            probe[i] = orig;
            g[i] = (fp - fm) / (2.0 * h);
        }
        let gt = surface.tangent(&x, &g);
        let gnorm = real::real_norm(&gt);
        if gnorm <= 1e-14 * (1.0 + fx) {
            return LocalResult { x, value: fx, converged: true };
        }
        // Armijo backtracking along the retracted descent direction
        let mut accepted = None;
        let mut alpha = (2.0 * step).min(surface.scale());
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&gt).map(|(a, b)| a - alpha * b / gnorm).collect();
            if let Some(y) = surface.retract(&trial) {
                let fy = objective(&y);
                if fy <= fx - 1e-4 * alpha * gnorm {
                    accepted = Some((y, fy, alpha));
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((y, fy, a)) => {
                let decrease = fx - fy;
                x = y;
                fx = fy;
                step = a;
                if decrease <= 1e-15 * (1.0 + fx) {
                    return LocalResult { x, value: fx, converged: true };
                }
            }
            None => {
                // line search stalled: derivative-free fallback
                return pattern_search(&objective, surface, x, fx, step);
            }
        }
    }
    LocalResult { x, value: fx, converged: false }
}

fn pattern_search<F: Fn(&[f64]) -> f64>(
    objective: &F,
    surface: &dyn Surface,
    mut x: Vec<f64>,
    mut fx: f64,
    start_step: f64,
) -> LocalResult {
    let dim = x.len();
    let mut delta = start_step.max(1e-6 * surface.scale());
    let mut sweeps = 0;
    while delta > 1e-10 * surface.scale() && sweeps < 400 {
        sweeps += 1;
        let mut improved = false;
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let mut e = vec![0.0; dim];
                e[i] = sign;
                let d = surface.tangent(&x, &e);
                let dn = real::real_norm(&d);
                if dn < 1e-12 {
                    continue;
                }
                let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + delta * b / dn).collect();
                if let Some(y) = surface.retract(&trial) {
                    let fy = objective(&y);
                    if fy < fx {
                        x = y;
                        fx = fy;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            delta *= 0.5;
        }
    }
    LocalResult { x, value: fx, converged: delta <= 1e-10 * surface.scale() }
}

fn residual_squared(fam: &DeformationFamily, t: f64, x: &[f64]) -> f64 {
    let z = real::from_real(x);
    let (r, _) = residual_of_gradient(&fam.gradient_unchecked(t, &z));
    r * r
}

fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidInput("empty t grid".into()));
    }
    if let Some(t) = t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidInput(format!("t = {t} is outside [0, 1]")));
    }
    Ok(())
}

/// Seeded local minimizations of `residual²` over `‖z‖ = radius` for every
/// `t` in the grid. The returned minimum is the smallest value any restart
/// reached.
pub fn certify_smooth_shell(
    fam: &DeformationFamily,
    t_grid: &[f64],
    radius: f64,
    restarts: usize,
    seed: u64,
) -> Result<ShellSearchReport> {
    certify_smooth_with(fam, t_grid, SearchDomain::Sphere { radius }, restarts, seed, &SearchOptions::default())
}

pub fn certify_smooth_with(
    fam: &DeformationFamily,
    t_grid: &[f64],
    domain: SearchDomain,
    restarts: usize,
    seed: u64,
    opts: &SearchOptions,
) -> Result<ShellSearchReport> {
    validate_grid(t_grid)?;
    if restarts == 0 {
        return Err(Error::InvalidInput("at least one restart is required".into()));
    }
    let radius = match domain {
        SearchDomain::Sphere { radius } => radius,
        SearchDomain::Level { eta0, radius } => {
            if !(eta0 > 0.0) {
                return Err(Error::InvalidInput(format!("eta0 must be positive, got {eta0}")));
            }
            radius
        }
    };
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    let n = fam.n();
    let jobs: Vec<(usize, usize)> =
        (0..t_grid.len()).flat_map(|ti| (0..restarts).map(move |k| (ti, k))).collect();
    let results: Vec<Option<LocalResult>> = jobs
        .par_iter()
        .map(|&(ti, k)| {
            let t = t_grid[ti];
            let mut s = rng::stream(seed, &format!("restart:{ti}:{k}"));
            let objective = |x: &[f64]| residual_squared(fam, t, x);
            match domain {
                SearchDomain::Sphere { radius } => {
                    let surface = SphereSurface { radius };
                    let start = real::to_real(&rng::sphere_point(&mut s, n, radius));
                    Some(minimize(objective, &surface, start, opts))
                }
                SearchDomain::Level { eta0, radius } => {
                    let surface = LevelSurface { fam, t, eta0, radius };
                    // a few attempts to land a random ball point on the level set
                    (0..16).find_map(|_| {
                        let r = radius * rand::Rng::random_range(&mut s, 0.05..1.0);
                        let z = rng::sphere_point(&mut s, n, r);
                        surface.retract(&real::to_real(&z))
                    })
                    .map(|start| minimize(objective, &surface, start, opts))
                }
            }
        })
        .collect();

    let mut per_t_min = vec![f64::INFINITY; t_grid.len()];
    let mut best: Option<(f64, usize)> = None;
    let mut converged = 0;
    let mut failed_starts = 0;
    for (job, res) in jobs.iter().zip(&results) {
        let Some(res) = res else {
            failed_starts += 1;
            continue;
        };
        if res.converged {
            converged += 1;
        }
        let r = res.value.max(0.0).sqrt();
        per_t_min[job.0] = per_t_min[job.0].min(r);
        if best.is_none_or(|(b, _)| r < b) {
            best = Some((r, job.0 * restarts + job.1));
        }
    }
    let (min_residual, best_index) =
        best.ok_or_else(|| Error::Numerical("no restart could be placed on the search domain".into()))?;
    let best_result = results[best_index].as_ref().expect("best index refers to a finished restart");
    Ok(ShellSearchReport {
        family: fam.spec.clone(),
        t_grid: t_grid.to_vec(),
        domain,
        min_residual_found: min_residual,
        argmin_point: real::from_real(&best_result.x),
        argmin_t: t_grid[jobs[best_index].0],
        per_t_min,
        search_budget: SearchBudget { restarts, iterations: opts.max_iterations },
        seed,
        converged_restarts: converged,
        failed_starts,
        tolerance: opts.tolerance,
        certified: min_residual > opts.tolerance,
        diagnostic: (converged == 0).then(|| "no restart converged within the iteration budget".to_string()),
        note: "numerical evidence from seeded local searches, not a proof".to_string(),
    })
}

/// One index of the singularity inequality `|L| ≥ l_bound ≥ r = |R|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexInequality {
    /// Zero-based coordinate index.
    pub index: usize,
    /// `|L|` computed from the actual gradient.
    pub l_exact: f64,
    /// The closed-form lower bound for `|L|`.
    pub l_bound: f64,
    /// `|R|`.
    pub r: f64,
    /// `l_bound > r`.
    pub strict: bool,
    /// Whether this index is the one the contradiction argument uses.
    pub governing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub t: f64,
    pub per_index: Vec<IndexInequality>,
}

impl LemmaCheck {
    /// True when every governing index is strict.
    pub fn governing_strict(&self) -> bool {
        self.per_index.iter().filter(|e| e.governing).all(|e| e.strict)
    }
}

/// Evaluates the per-index inequalities that exclude mixed singular points of
/// `f_t`, `0 < t < 1`, away from the origin.
pub fn lemma_inequality_check(fam: &DeformationFamily, t: f64, point: &[Complex64]) -> Result<LemmaCheck> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Precondition(format!("the inequalities need 0 < t < 1, got {t}")));
    }
    let grad = fam.gradient(t, point)?;
    let spec = &fam.spec;
    let n = spec.n();
    let abs: Vec<f64> = point.iter().map(|c| c.norm()).collect();
    let s = 1.0 - t;
    let power = |j: usize| abs[j].powi((spec.a[j] + 2 * spec.b[j]) as i32);
    let trailing = |j: usize| spec.successor(j).map_or(1.0, |k| abs[k]);

    let mut out: Vec<IndexInequality> = (0..n)
        .map(|j| {
            let (a, b) = (spec.a[j] as f64, spec.b[j] as f64);
            let q = power(j) * trailing(j);
            let coef = if spec.kind == FamilyKind::TypeII { a + b - 1.0 } else { a + b };
            let l_bound = coef * q * s;
            let r = b * q * s;
            IndexInequality {
                index: j,
                l_exact: grad.d_z[j].norm() * abs[j],
                l_bound,
                r,
                strict: l_bound > r,
                governing: false,
            }
        })
        .collect();

    // index where a vanishing coordinate follows a nonzero one
    let vanishing_tail = |ell: usize, prev: usize| IndexInequality {
        index: ell,
        l_exact: grad.d_z[ell].norm(),
        l_bound: abs[prev].powi(spec.a[prev] as i32)
            * (s * abs[prev].powi(2 * spec.b[prev] as i32) + t),
        r: grad.d_zbar[ell].norm(),
        strict: false,
        governing: true,
    };

    if abs.iter().all(|&x| x == 0.0) {
        return Ok(LemmaCheck { t, per_index: out });
    }
    match spec.kind {
        FamilyKind::Brieskorn => {
            for e in out.iter_mut() {
                e.governing = abs[e.index] > 0.0;
            }
        }
        FamilyKind::TypeI => {
            if abs[n - 1] > 0.0 {
                let mut s_idx = n - 1;
                while s_idx > 0 && abs[s_idx - 1] > 0.0 {
                    s_idx -= 1;
                }
                out[s_idx].governing = true;
            } else {
                let mut ell = n - 1;
                while ell > 0 && abs[ell - 1] == 0.0 {
                    ell -= 1;
                }
                let mut e = vanishing_tail(ell, ell - 1);
                e.strict = e.l_bound > e.r;
                out[ell] = e;
            }
        }
        FamilyKind::TypeII => {
            if abs.iter().all(|&x| x > 0.0) {
                let scores: Vec<f64> = (0..n).map(|j| power(j) * trailing(j)).collect();
                let mut m = 0;
                for j in 1..n {
                    if scores[j] > scores[m] {
                        m = j;
                    }
                }
                out[m].governing = true;
            } else {
                let ell = (0..n)
                    .find(|&j| abs[j] == 0.0 && abs[(j + n - 1) % n] > 0.0)
                    .expect("a zero coordinate follows a nonzero one cyclically");
                let mut e = vanishing_tail(ell, (ell + n - 1) % n);
                e.strict = e.l_bound > e.r;
                out[ell] = e;
            }
        }
    }
    Ok(LemmaCheck { t, per_index: out })
}
