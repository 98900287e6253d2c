//! Transport of points along the family by a value-preserving flow.
//!
//! On the sphere `‖z‖ = r` the velocity is the minimum-norm solution of
//! `⟨z, v⟩ = 0` and `Df_t[v] = −∂f_t/∂t`, switched off outside the tube
//! `|f_t| ≤ 2η₀` by a quintic smoothstep. Trajectories starting on the link
//! `K_0` stay on `K_t`; trajectories starting on a level `|f_0| = η₀` keep
//! their value.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{DeformationFamily, MilnorTubeSpec};
use crate::real;
use crate::rng;
use crate::transversal::{real_gradients_of, transversality_margin};

/// Normal-equation floor for the minimum-norm solve.
pub const TIKHONOV_FLOOR: f64 = 1e-14;
/// Below this normalized margin the constraints are treated as dependent.
pub const RANK_FLOOR: f64 = 1e-10;
/// Newton iterations per step.
pub const NEWTON_ITERATIONS: usize = 5;
/// Inner edge of the collar where tube-fiber flows blend in sphere tangency,
/// as a fraction of the radius.
pub const COLLAR_START: f64 = 0.9;

/// `1` below `lo`, `0` above `hi`, quintic smoothstep in between.
pub fn cutoff(x: f64, lo: f64, hi: f64) -> f64 {
    if x <= lo {
        return 1.0;
    }
    if x >= hi {
        return 0.0;
    }
    let u = (x - lo) / (hi - lo);
    1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
}

fn constrained_velocity(fam: &DeformationFamily, t: f64, x: &[f64], tangent: bool) -> Result<Vec<f64>> {
    let z = real::from_real(x);
    let rg = real_gradients_of(&fam.gradient_unchecked(t, &z));
    let dt = fam.t_derivative_unchecked(&z);
    let margin = if tangent {
        transversality_margin(x, &rg.grad_g, &rg.grad_h)
    } else {
        two_row_margin(&rg.grad_g, &rg.grad_h)
    };
    if margin < RANK_FLOOR {
        return Err(Error::RankDeficient { margin });
    }
    if tangent {
        real::min_norm_solve(&[x.to_vec(), rg.grad_g, rg.grad_h], &[0.0, -dt.re, -dt.im], TIKHONOV_FLOOR)
    } else {
        real::min_norm_solve(&[rg.grad_g, rg.grad_h], &[-dt.re, -dt.im], TIKHONOV_FLOOR)
    }
}

fn two_row_margin(a: &[f64], b: &[f64]) -> f64 {
    let unit = |v: &[f64]| {
        let n = real::real_norm(v);
        if n > 0.0 { v.iter().map(|x| x / n).collect() } else { v.to_vec() }
    };
    real::smallest_singular_value(&[unit(a), unit(b)])
}

/// The sphere-tangent connection at `point` (real coordinates returned).
pub fn connection_velocity(fam: &DeformationFamily, t: f64, point: &[Complex64], tube: &MilnorTubeSpec) -> Result<Vec<f64>> {
    if point.len() != fam.n() {
        return Err(Error::DimensionMismatch { expected: fam.n(), got: point.len() });
    }
    let norm = real::norm(point);
    if (norm - tube.radius).abs() > 1e-6 * tube.radius {
        return Err(Error::Precondition(format!("‖z‖ = {norm} is not on the sphere of radius {}", tube.radius)));
    }
    sphere_velocity(fam, t, &real::to_real(point), tube)
}

fn sphere_velocity(fam: &DeformationFamily, t: f64, x: &[f64], tube: &MilnorTubeSpec) -> Result<Vec<f64>> {
    let z = real::from_real(x);
    let level = fam.value_unchecked(t, &z).norm();
    let chi = cutoff(level, tube.eta0, 2.0 * tube.eta0);
    if chi == 0.0 {
        return Ok(vec![0.0; x.len()]);
    }
    let v = constrained_velocity(fam, t, x, true)?;
    Ok(v.into_iter().map(|c| c * chi).collect())
}

fn fiber_velocity(fam: &DeformationFamily, t: f64, x: &[f64], radius: f64) -> Result<Vec<f64>> {
    let chi = 1.0 - cutoff(real::real_norm(x), COLLAR_START * radius, radius);
    let value_only = constrained_velocity(fam, t, x, false)?;
    if chi == 0.0 {
        return Ok(value_only);
    }
    let tangent = constrained_velocity(fam, t, x, true)?;
    Ok(value_only.iter().zip(&tangent).map(|(a, b)| a + chi * (b - a)).collect())
}

/// Integration knobs. Disabling both corrections leaves plain RK4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsotopyOptions {
    pub renormalize: bool,
    pub newton: bool,
    pub value_tolerance: f64,
    pub norm_tolerance: f64,
}

impl Default for IsotopyOptions {
    fn default() -> Self {
        IsotopyOptions { renormalize: true, newton: true, value_tolerance: 1e-6, norm_tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotopySample {
    pub t: f64,
    pub point: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    /// Points on the sphere, flowed by the sphere connection.
    Sphere,
    /// Points of a tube fiber inside the ball.
    TubeFiber,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotopyTrace {
    pub start: Vec<Complex64>,
    pub radius: f64,
    pub tube: MilnorTubeSpec,
    pub kind: FlowKind,
    pub samples: Vec<IsotopySample>,
    /// `max |f_t(z_t) − f_{t_0}(z_0)|` over samples; zero when the start lies
    /// outside the tube, where values are not preserved.
    pub value_residual: f64,
    pub value_tracked: bool,
    /// `max |‖z_t‖ − r|` on the sphere, `max(‖z_t‖ − r, 0)` for tube fibers.
    pub norm_residual: f64,
    pub failed: bool,
    pub failure: Option<String>,
}

impl IsotopyTrace {
    pub fn endpoint(&self) -> &[Complex64] {
        &self.samples.last().expect("a trace has at least its start").point
    }
}

fn rk4<F>(field: &F, t: f64, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let axpy = |a: &[f64], k: &[f64], s: f64| -> Vec<f64> { a.iter().zip(k).map(|(p, q)| p + s * q).collect() };
    let k1 = field(t, x)?;
    let k2 = field(t + 0.5 * h, &axpy(x, &k1, 0.5 * h))?;
    let k3 = field(t + 0.5 * h, &axpy(x, &k2, 0.5 * h))?;
    let k4 = field(t + h, &axpy(x, &k3, h))?;
    Ok((0..x.len()).map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect())
}

fn rescale(x: &mut [f64], radius: f64) {
    let n = real::real_norm(x);
    if n > 0.0 {
        x.iter_mut().for_each(|c| *c *= radius / n);
    }
}

// Newton steps toward f_t = target inside span(grad g, grad h).
fn correct_value(fam: &DeformationFamily, t: f64, x: &mut Vec<f64>, target: Complex64, sphere: Option<f64>) -> Result<bool> {
    let z = real::from_real(x);
    let mut err = (fam.value_unchecked(t, &z) - target).norm();
    let floor = 1e-15 * (1.0 + real::real_norm(x).powi(fam.max_degree() as i32));
    for _ in 0..NEWTON_ITERATIONS {
        if err <= floor {
            break;
        }
        let z = real::from_real(x);
        let f = fam.value_unchecked(t, &z) - target;
        let rg = real_gradients_of(&fam.gradient_unchecked(t, &z));
        let step = real::min_norm_solve(&[rg.grad_g, rg.grad_h], &[-f.re, -f.im], TIKHONOV_FLOOR)?;
        let mut y: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
        if let Some(r) = sphere {
            rescale(&mut y, r);
        }
        let new_err = (fam.value_unchecked(t, &real::from_real(&y)) - target).norm();
        if !(new_err.is_finite()) || new_err > 2.0 * err.max(floor) {
            return Ok(false);
        }
        *x = y;
        err = new_err;
    }
    Ok(true)
}

/// Integrates from `t_start` to `t_end` (either direction) in `steps` RK4 steps.
pub fn integrate_between(
    fam: &DeformationFamily,
    z0: &[Complex64],
    t_start: f64,
    t_end: f64,
    steps: usize,
    tube: &MilnorTubeSpec,
    kind: FlowKind,
    opts: &IsotopyOptions,
) -> Result<IsotopyTrace> {
    if z0.len() != fam.n() {
        return Err(Error::DimensionMismatch { expected: fam.n(), got: z0.len() });
    }
    for t in [t_start, t_end] {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidInput(format!("t = {t} is outside [0, 1]")));
        }
    }
    if t_start != t_end && steps == 0 {
        return Err(Error::InvalidInput("at least one step is required".into()));
    }
    let radius = tube.radius;
    let norm0 = real::norm(z0);
    match kind {
        FlowKind::Sphere if (norm0 - radius).abs() > 1e-6 * radius => {
            return Err(Error::Precondition(format!("‖z0‖ = {norm0} is not on the sphere of radius {radius}")));
        }
        FlowKind::TubeFiber if norm0 > radius * (1.0 + 1e-12) => {
            return Err(Error::Precondition(format!("‖z0‖ = {norm0} lies outside the ball of radius {radius}")));
        }
        _ => {}
    }
    let target = fam.value_unchecked(t_start, z0);
    let tracked = match kind {
        FlowKind::Sphere => target.norm() <= tube.eta0,
        FlowKind::TubeFiber => true,
    };
    let norm_error = |x: &[f64]| {
        let n = real::real_norm(x);
        match kind {
            FlowKind::Sphere => (n - radius).abs(),
            FlowKind::TubeFiber => (n - radius).max(0.0),
        }
    };
    let field = |t: f64, x: &[f64]| match kind {
        FlowKind::Sphere => sphere_velocity(fam, t, x, tube),
        FlowKind::TubeFiber => fiber_velocity(fam, t, x, radius),
    };
    let mut trace = IsotopyTrace {
        start: z0.to_vec(),
        radius,
        tube: *tube,
        kind,
        samples: vec![IsotopySample { t: t_start, point: z0.to_vec() }],
        value_residual: 0.0,
        value_tracked: tracked,
        norm_residual: match kind {
            FlowKind::Sphere => (norm0 - radius).abs(),
            FlowKind::TubeFiber => (norm0 - radius).max(0.0),
        },
        failed: false,
        failure: None,
    };
    if t_start == t_end {
        return Ok(trace);
    }
    let h = (t_end - t_start) / steps as f64;
    let mut x = real::to_real(z0);
    for k in 0..steps {
        let t = t_start + k as f64 * h;
        let t_next = if k + 1 == steps { t_end } else { t_start + (k + 1) as f64 * h };
        x = match rk4(&field, t, &x, t_next - t) {
            Ok(x) => x,
            Err(e) => {
                trace.failed = true;
                trace.failure = Some(format!("step {k}: {e}"));
                return Ok(trace);
            }
        };
        let on_sphere = kind == FlowKind::Sphere;
        if opts.renormalize && on_sphere {
            rescale(&mut x, radius);
        }
        if opts.newton && tracked {
            let sphere = (opts.renormalize && on_sphere).then_some(radius);
            if !correct_value(fam, t_next, &mut x, target, sphere)? {
                trace.failed = true;
                trace.failure = Some(format!("step {k}: value correction diverged"));
            }
        }
        let z = real::from_real(&x);
        if tracked {
            trace.value_residual = trace.value_residual.max((fam.value_unchecked(t_next, &z) - target).norm());
        }
        trace.norm_residual = trace.norm_residual.max(norm_error(&x));
        trace.samples.push(IsotopySample { t: t_next, point: z });
    }
    if trace.value_residual > opts.value_tolerance || trace.norm_residual > opts.norm_tolerance {
        trace.failed = true;
        trace.failure.get_or_insert_with(|| {
            format!("residuals above tolerance: value {:e}, norm {:e}", trace.value_residual, trace.norm_residual)
        });
    }
    Ok(trace)
}

/// `h_t(z0)` for `t ∈ [0, t_end]` on the sphere of radius `tube.radius`.
pub fn integrate_isotopy(
    fam: &DeformationFamily,
    z0: &[Complex64],
    t_end: f64,
    steps: usize,
    tube: &MilnorTubeSpec,
) -> Result<IsotopyTrace> {
    integrate_between(fam, z0, 0.0, t_end, steps, tube, FlowKind::Sphere, &IsotopyOptions::default())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transport {
    pub traces: Vec<IsotopyTrace>,
    pub worst_value_residual: f64,
    pub worst_norm_residual: f64,
    /// Set when any trace failed.
    pub partial: bool,
}

fn summarize(traces: Vec<IsotopyTrace>) -> Transport {
    Transport {
        worst_value_residual: traces.iter().map(|t| t.value_residual).fold(0.0, f64::max),
        worst_norm_residual: traces.iter().map(|t| t.norm_residual).fold(0.0, f64::max),
        partial: traces.iter().any(|t| t.failed),
        traces,
    }
}

/// Transports points of `K_0` to `t_end`.
pub fn transport_link(
    fam: &DeformationFamily,
    link0: &[Vec<Complex64>],
    t_end: f64,
    steps: usize,
    tube: &MilnorTubeSpec,
    opts: &IsotopyOptions,
) -> Result<Transport> {
    for (i, z) in link0.iter().enumerate() {
        if z.len() != fam.n() {
            return Err(Error::DimensionMismatch { expected: fam.n(), got: z.len() });
        }
        let f = fam.value_unchecked(0.0, z).norm();
        let tol = fam.on_variety_tolerance(z);
        if f > tol {
            return Err(Error::Precondition(format!("point {i} has |f_0| = {f:e} above {tol:e}")));
        }
        let n = real::norm(z);
        if (n - tube.radius).abs() > 1e-8 * tube.radius {
            return Err(Error::Precondition(format!("point {i} has norm {n}, expected {}", tube.radius)));
        }
    }
    let traces = link0
        .par_iter()
        .map(|z| integrate_between(fam, z, 0.0, t_end, steps, tube, FlowKind::Sphere, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(traces))
}

/// Transports points of a fiber `f_0 = η₀ e^{iθ}` of the tube wall.
pub fn transport_tube_fiber(
    fam: &DeformationFamily,
    fiber0: &[Vec<Complex64>],
    t_end: f64,
    steps: usize,
    tube: &MilnorTubeSpec,
    opts: &IsotopyOptions,
) -> Result<Transport> {
    for (i, z) in fiber0.iter().enumerate() {
        if z.len() != fam.n() {
            return Err(Error::DimensionMismatch { expected: fam.n(), got: z.len() });
        }
        let f = fam.value_unchecked(0.0, z).norm();
        if (f - tube.eta0).abs() > 1e-8 * tube.eta0.max(1.0) {
            return Err(Error::Precondition(format!("point {i} has |f_0| = {f}, expected {}", tube.eta0)));
        }
        if real::norm(z) > tube.radius {
            return Err(Error::Precondition(format!("point {i} lies outside the ball")));
        }
    }
    let traces = fiber0
        .par_iter()
        .map(|z| integrate_between(fam, z, 0.0, t_end, steps, tube, FlowKind::TubeFiber, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(traces))
}

/// Seeded points with `f_t = η₀ e^{iθ}` and `‖z‖ ≤ tube.radius`, found by
/// minimum-norm Newton from random points of the ball. Returns fewer points
/// than requested if the attempt budget runs out.
pub fn sample_tube_fiber(
    fam: &DeformationFamily,
    t: f64,
    tube: &MilnorTubeSpec,
    theta: f64,
    count: usize,
    seed: u64,
) -> Vec<Vec<Complex64>> {
    let target = Complex64::from_polar(tube.eta0, theta);
    let found: Vec<Option<Vec<Complex64>>> = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut s = rng::stream(seed, &format!("fiber:{k}"));
            (0..40).find_map(|_| {
                let r = tube.radius * rand::Rng::random_range(&mut s, 0.2..0.95);
                let mut x = real::to_real(&rng::sphere_point(&mut s, fam.n(), r));
                for _ in 0..60 {
                    let z = real::from_real(&x);
                    let f = fam.value_unchecked(t, &z) - target;
                    if f.norm() <= 1e-14 {
                        break;
                    }
                    let rg = real_gradients_of(&fam.gradient_unchecked(t, &z));
                    let step = real::min_norm_solve(&[rg.grad_g, rg.grad_h], &[-f.re, -f.im], 1e-300).ok()?;
                    let len = real::real_norm(&step);
                    let k = if len > 0.25 * tube.radius { 0.25 * tube.radius / len } else { 1.0 };
                    x.iter_mut().zip(&step).for_each(|(a, b)| *a += k * b);
                }
                let z = real::from_real(&x);
                let ok = (fam.value_unchecked(t, &z) - target).norm() <= 1e-13 && real::norm(&z) <= tube.radius;
                ok.then_some(z)
            })
        })
        .collect();
    found.into_iter().flatten().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eta0Choice {
    pub eta0: f64,
    pub margin_threshold: f64,
    pub samples: usize,
    /// Sampled points whose rank-test margin fell below the threshold.
    pub low_margin_points: usize,
    /// Smallest `|f_t|` among the low-margin points.
    pub min_low_margin_level: Option<f64>,
}

/// Picks `η₀` as half the smallest `|f_t|` over seeded sphere points whose
/// level set meets the sphere with margin below `margin_threshold`, across the
/// `t` grid. With no such point, half the largest sampled `|f_t|`.
pub fn choose_eta0(
    fam: &DeformationFamily,
    t_grid: &[f64],
    radius: f64,
    samples: usize,
    margin_threshold: f64,
    seed: u64,
) -> Result<Eta0Choice> {
    if !(radius > 0.0) || samples == 0 || t_grid.is_empty() {
        return Err(Error::InvalidInput("eta0 scan needs radius > 0, samples > 0 and a t grid".into()));
    }
    let mut s = rng::stream(seed, "eta0-scan");
    let points: Vec<Vec<Complex64>> = (0..samples).map(|_| rng::sphere_point(&mut s, fam.n(), radius)).collect();
    let mut min_low: Option<f64> = None;
    let mut max_level: f64 = 0.0;
    let mut low = 0;
    for &t in t_grid {
        for z in &points {
            let level = fam.value_unchecked(t, z).norm();
            max_level = max_level.max(level);
            let rg = real_gradients_of(&fam.gradient_unchecked(t, z));
            if transversality_margin(&real::to_real(z), &rg.grad_g, &rg.grad_h) < margin_threshold {
                low += 1;
                min_low = Some(min_low.map_or(level, |m: f64| m.min(level)));
            }
        }
    }
    let eta0 = 0.5 * min_low.unwrap_or(max_level);
    if !(eta0 > 0.0) {
        return Err(Error::Numerical("eta0 scan found no usable level".into()));
    }
    Ok(Eta0Choice { eta0, margin_threshold, samples, low_margin_points: low, min_low_margin_level: min_low })
}
