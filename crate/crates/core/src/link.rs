//! Links `K_t = V_t ∩ S_r³` of two-variable families.
//!
//! Every link is a union of orbits of the polar action
//! `λ∘z = (λ^{p_1} z_1, λ^{p_2} z_2)`, so each component is a single orbit.
//! Orbits with `z_1 ≠ 0` meet the slice `arg z_1 = 0`, where the link is cut
//! out by two real equations in `(|z_1|, arg z_2)`. Representatives are found
//! there, traced around their orbits, and deduplicated by exact membership.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use num_integer::Integer;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{DeformationFamily, FamilyKind, FamilySpec};
use crate::poly::MixedPolynomial;
use crate::real;
use crate::rng;
use crate::weights::polar_rotate;

/// Points traced per orbit.
pub const ORBIT_RESOLUTION: usize = 720;
/// Orbits closer than this multiple of the radius are merged and flagged.
pub const MERGE_THRESHOLD: f64 = 1e-4;
/// `|f|` below which the phase is undefined.
pub const PHASE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orbit {
    pub representative: Vec<Complex64>,
    /// Range `start..start + len` of this orbit in the sample's point list.
    pub start: usize,
    pub len: usize,
    /// Angle after which the action returns to the representative.
    pub period: f64,
    pub component: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkSample {
    pub family: FamilySpec,
    pub t: f64,
    pub radius: f64,
    pub weights: Vec<u64>,
    pub points: Vec<Vec<Complex64>>,
    pub orbits: Vec<Orbit>,
    pub component_count: usize,
    pub seeds_used: usize,
    pub empty: bool,
    /// Set when two distinct orbits come within the merge threshold or within
    /// twice the tracing step of each other.
    pub ambiguous: bool,
    pub min_orbit_separation: Option<f64>,
    /// Largest distance between consecutive traced points.
    pub max_trace_step: f64,
}

fn require_two_variables(fam: &DeformationFamily) -> Result<()> {
    if fam.n() != 2 {
        return Err(Error::Precondition(format!("link tracing needs n = 2, got n = {}", fam.n())));
    }
    Ok(())
}

fn slice_point(rho1: f64, theta2: f64, radius: f64) -> [Complex64; 2] {
    let rho2 = (radius * radius - rho1 * rho1).max(0.0).sqrt();
    [Complex64::new(rho1, 0.0), Complex64::from_polar(rho2, theta2)]
}

// Newton on (|z1|, arg z2) for f_t = 0 along the slice arg z1 = 0.
fn polish(fam: &DeformationFamily, t: f64, radius: f64, mut rho1: f64, mut theta2: f64) -> Option<(f64, f64)> {
    let scale = 1.0 + radius.powi(fam.max_degree() as i32);
    for _ in 0..60 {
        let z = slice_point(rho1, theta2, radius);
        let f = fam.value_unchecked(t, &z);
        if f.norm() <= 1e-14 * scale {
            return Some((rho1, theta2.rem_euclid(std::f64::consts::TAU)));
        }
        let g = fam.gradient_unchecked(t, &z);
        let rho2 = z[1].norm();
        if rho2 < 1e-12 * radius {
            return None;
        }
        let directional = |v: [Complex64; 2]| g.d_z[0] * v[0] + g.d_zbar[0] * v[0].conj() + g.d_z[1] * v[1] + g.d_zbar[1] * v[1].conj();
        let e2 = Complex64::from_polar(1.0, theta2);
        let d_rho = directional([Complex64::new(1.0, 0.0), e2 * (-rho1 / rho2)]);
        let d_theta = directional([Complex64::new(0.0, 0.0), Complex64::i() * e2 * rho2]);
        let det = d_rho.re * d_theta.im - d_theta.re * d_rho.im;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dr = -(f.re * d_theta.im - d_theta.re * f.im) / det;
        let dt = -(d_rho.re * f.im - f.re * d_rho.im) / det;
        let mut k = 1.0;
        while k > 1e-6 && !(rho1 + k * dr > 0.0 && rho1 + k * dr < radius) {
            k *= 0.5;
        }
        rho1 += k * dr;
        theta2 += k * dt;
        if !(rho1 > 0.0 && rho1 < radius) {
            return None;
        }
    }
    let z = slice_point(rho1, theta2, radius);
    (fam.value_unchecked(t, &z).norm() <= 1e-12 * scale).then_some((rho1, theta2.rem_euclid(std::f64::consts::TAU)))
}

// exact seeds from the monotone modulus equation of a Brieskorn member
fn brieskorn_seeds(fam: &DeformationFamily, t: f64, radius: f64) -> Vec<(f64, f64)> {
    let spec = &fam.spec;
    let weight = |j: usize, rho: f64| rho.powi(spec.a[j] as i32) * (t + (1.0 - t) * rho.powi(2 * spec.b[j] as i32));
    let h = |rho1: f64| weight(0, rho1) - weight(1, (radius * radius - rho1 * rho1).max(0.0).sqrt());
    let (mut lo, mut hi) = (0.0, radius);
    if !(h(lo) < 0.0 && h(hi) > 0.0) {
        return Vec::new();
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho1 = 0.5 * (lo + hi);
    let a2 = spec.a[1] as f64;
    (0..spec.a[1]).map(|k| (rho1, (std::f64::consts::PI + std::f64::consts::TAU * k as f64) / a2)).collect()
}

// local minima of |f_t| over a jittered grid on the slice
fn grid_seeds(fam: &DeformationFamily, t: f64, radius: f64, size: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut s = rng::stream(seed, "link-grid");
    let (jr, jt): (f64, f64) = (s.random_range(0.0..1.0), s.random_range(0.0..1.0));
    let rho = |i: usize| radius * (i as f64 + 0.5 * (0.5 + jr)) / size as f64;
    let theta = |k: usize| std::f64::consts::TAU * (k as f64 + jt) / size as f64;
    let values: Vec<Vec<f64>> = (0..size)
        .map(|i| (0..size).map(|k| fam.value_unchecked(t, &slice_point(rho(i), theta(k), radius)).norm()).collect())
        .collect();
    let mut seeds = Vec::new();
    for i in 0..size {
        for k in 0..size {
            let v = values[i][k];
            let mut minimal = true;
            for di in [-1i64, 0, 1] {
                for dk in [-1i64, 0, 1] {
                    if di == 0 && dk == 0 {
                        continue;
                    }
                    let ii = i as i64 + di;
                    if ii < 0 || ii >= size as i64 {
                        continue;
                    }
                    let kk = (k as i64 + dk).rem_euclid(size as i64) as usize;
                    if values[ii as usize][kk] < v {
                        minimal = false;
                    }
                }
            }
            if minimal {
                seeds.push((rho(i), theta(k)));
            }
        }
    }
    seeds
}

/// Whether `b = λ∘a` for some unimodular `λ`, within `tol`.
pub fn same_orbit(weights: &[u64], a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if (real::norm(a) - real::norm(b)).abs() > tol {
        return false;
    }
    let Some(j) = (0..a.len()).max_by(|&i, &k| a[i].norm().total_cmp(&a[k].norm())) else {
        return true;
    };
    if a[j].norm() <= tol {
        return real::norm(b) <= tol;
    }
    let base = (b[j] / a[j]).arg();
    let p = weights[j];
    (0..p).any(|k| {
        let phi = (base + std::f64::consts::TAU * k as f64) / p as f64;
        real::distance(&polar_rotate(weights, phi, a), b) <= tol
    })
}

/// Smallest `φ > 0` with `e^{iφ}∘z = z`.
pub fn orbit_period(weights: &[u64], z: &[Complex64]) -> f64 {
    let g = z
        .iter()
        .zip(weights)
        .filter(|(c, _)| c.norm() > 0.0)
        .fold(0u64, |g, (_, &p)| g.gcd(&p));
    std::f64::consts::TAU / g.max(1) as f64
}

fn trace(weights: &[u64], z: &[Complex64]) -> (Vec<Vec<Complex64>>, f64) {
    let period = orbit_period(weights, z);
    let pts = (0..ORBIT_RESOLUTION)
        .map(|k| polar_rotate(weights, period * k as f64 / ORBIT_RESOLUTION as f64, z))
        .collect();
    (pts, period)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let p = self.0[i];
        if p == i {
            return i;
        }
        let r = self.find(p);
        self.0[i] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

// Traces representatives, merges orbits that touch, and labels components.
fn assemble(fam: &DeformationFamily, t: f64, radius: f64, reps: Vec<Vec<Complex64>>, seeds_used: usize) -> LinkSample {
    let weights = fam.polar_weights.clone();
    let mut points = Vec::new();
    let mut orbits = Vec::new();
    for rep in reps {
        let (pts, period) = trace(&weights, &rep);
        orbits.push(Orbit { representative: rep, start: points.len(), len: pts.len(), period, component: 0 });
        points.extend(pts);
    }
    let max_trace_step = orbits
        .iter()
        .flat_map(|o| {
            let slice = &points[o.start..o.start + o.len];
            (0..o.len).map(move |i| real::distance(&slice[i], &slice[(i + 1) % o.len]))
        })
        .fold(0.0, f64::max);
    let mut uf = UnionFind((0..orbits.len()).collect());
    let mut min_sep: Option<f64> = None;
    let mut ambiguous = false;
    for i in 0..orbits.len() {
        for j in i + 1..orbits.len() {
            let (oi, oj) = (&orbits[i], &orbits[j]);
            let mut d = f64::INFINITY;
            for p in &points[oi.start..oi.start + oi.len] {
                for q in &points[oj.start..oj.start + oj.len] {
                    d = d.min(real::distance(p, q));
                }
            }
            min_sep = Some(min_sep.map_or(d, |m: f64| m.min(d)));
            if d < MERGE_THRESHOLD * radius {
                uf.union(i, j);
                ambiguous = true;
            } else if d < 2.0 * max_trace_step {
                ambiguous = true;
            }
        }
    }
    let mut labels: Vec<usize> = Vec::new();
    for i in 0..orbits.len() {
        let root = uf.find(i);
        let label = match labels.iter().position(|&r| r == root) {
            Some(l) => l,
            None => {
                labels.push(root);
                labels.len() - 1
            }
        };
        orbits[i].component = label;
    }
    LinkSample {
        family: fam.spec.clone(),
        t,
        radius,
        weights,
        empty: orbits.is_empty(),
        component_count: labels.len(),
        points,
        orbits,
        seeds_used,
        ambiguous,
        min_orbit_separation: min_sep,
        max_trace_step,
    }
}

fn push_distinct(weights: &[u64], reps: &mut Vec<Vec<Complex64>>, z: Vec<Complex64>, tol: f64) {
    if !reps.iter().any(|r| same_orbit(weights, r, &z, tol)) {
        reps.push(z);
    }
}

/// Samples `K_t` on the sphere of the given radius from a `seeds × seeds`
/// grid on the slice `arg z_1 = 0`.
pub fn sample_link(fam: &DeformationFamily, t: f64, radius: f64, seeds: usize, seed: u64) -> Result<LinkSample> {
    require_two_variables(fam)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidInput(format!("t = {t} is outside [0, 1]")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    if seeds < 4 {
        return Err(Error::InvalidInput("at least a 4 × 4 seed grid is required".into()));
    }
    let mut candidates = grid_seeds(fam, t, radius, seeds, seed);
    if fam.spec.kind == FamilyKind::Brieskorn {
        candidates.splice(0..0, brieskorn_seeds(fam, t, radius));
    }
    let seeds_used = candidates.len();
    let weights = &fam.polar_weights;
    let tol = 1e-6 * radius;
    let mut reps: Vec<Vec<Complex64>> = Vec::new();
    let scale = 1.0 + radius.powi(fam.max_degree() as i32);
    for axis in [[Complex64::new(radius, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(radius, 0.0)]] {
        if fam.value_unchecked(t, &axis).norm() <= 1e-12 * scale {
            push_distinct(weights, &mut reps, axis.to_vec(), tol);
        }
    }
    for (rho1, theta2) in candidates {
        if let Some((r, th)) = polish(fam, t, radius, rho1, theta2) {
            push_distinct(weights, &mut reps, slice_point(r, th, radius).to_vec(), tol);
        }
    }
    Ok(assemble(fam, t, radius, reps, seeds_used))
}

/// Groups given points of `K_t` into orbits and components.
pub fn link_from_points(fam: &DeformationFamily, t: f64, radius: f64, points: &[Vec<Complex64>]) -> Result<LinkSample> {
    require_two_variables(fam)?;
    let mut reps = Vec::new();
    for z in points {
        if z.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: z.len() });
        }
        push_distinct(&fam.polar_weights, &mut reps, z.clone(), 1e-6 * radius);
    }
    Ok(assemble(fam, t, radius, reps, points.len()))
}

pub fn count_components(sample: &LinkSample) -> Result<usize> {
    if sample.orbits.is_empty() {
        return Err(Error::Precondition("the link sample is empty".into()));
    }
    Ok(sample.component_count)
}

/// `f(z)/|f(z)|`.
pub fn fibration_phase(poly: &MixedPolynomial, point: &[Complex64]) -> Result<Complex64> {
    let f = poly.evaluate(point)?;
    let m = f.norm();
    if m <= PHASE_TOLERANCE {
        return Err(Error::Precondition(format!("|f| = {m:e} is too small for a phase")));
    }
    Ok(f / m)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// SVG of the stereographic projection from `(0, 0, 0, 1)`, one polyline per
/// orbit, colored by component.
pub fn render_svg(sample: &LinkSample) -> Result<String> {
    if sample.orbits.is_empty() {
        return Err(Error::Precondition("cannot draw an empty link sample".into()));
    }
    let project = |z: &[Complex64]| -> Option<(f64, f64)> {
        let (x1, y1, x2, y2) = (z[0].re / sample.radius, z[0].im / sample.radius, z[1].re / sample.radius, z[1].im / sample.radius);
        let pole = (x1 * x1 + y1 * y1 + x2 * x2 + (y2 - 1.0) * (y2 - 1.0)).sqrt();
        (pole > 1e-6).then(|| (x1 / (1.0 - y2), y1 / (1.0 - y2)))
    };
    let lines: Vec<(usize, Vec<(f64, f64)>)> = sample
        .orbits
        .iter()
        .map(|o| (o.component, sample.points[o.start..o.start + o.len].iter().filter_map(|z| project(z)).collect()))
        .collect();
    let extent = lines
        .iter()
        .flat_map(|(_, l)| l.iter().map(|(x, y)| x.abs().max(y.abs())))
        .fold(0.0f64, f64::max)
        .clamp(1e-9, 10.0);
    let size = 800.0;
    let to_px = |v: f64| size / 2.0 + v.clamp(-extent, extent) / extent * (size / 2.0 - 20.0);
    let mut svg = String::new();
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800">"#).unwrap();
    writeln!(svg, r#"<rect width="800" height="800" fill="white"/>"#).unwrap();
    for (component, line) in &lines {
        let mut pts: Vec<String> = line.iter().map(|(x, y)| format!("{:.4},{:.4}", to_px(*x), to_px(-*y))).collect();
        if let Some(first) = pts.first().cloned() {
            pts.push(first);
        }
        writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="2" data-component="{}" points="{}"/>"#,
            PALETTE[component % PALETTE.len()],
            component,
            pts.join(" ")
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn project_svg(sample: &LinkSample, path: &Path) -> Result<()> {
    let svg = render_svg(sample)?;
    std::fs::write(path, svg).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
