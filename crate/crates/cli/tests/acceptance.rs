//! Acceptance run: ten property checks at desk scale, each with a time limit.
//!
//! Prints one `PASS` or `FAIL` line per criterion and exits nonzero when any
//! criterion fails. Reference values come from oracles written here (gcd and
//! lcm, closed-form monomial scalings, direct residual formulas), not from the
//! routines under test.

use std::f64::consts::TAU;
use std::path::Path;
use std::time::{Duration, Instant};

use mixed_milnor::family::{build_family, eta_map, DeformationFamily, FamilyKind, FamilySpec, MilnorTubeSpec};
use mixed_milnor::isotopy::{self, FlowKind, IsotopyOptions};
use mixed_milnor::link;
use mixed_milnor::normalize;
use mixed_milnor::poly::{MixedMonomial, MixedPolynomial};
use mixed_milnor::rng::{self, Stream};
use mixed_milnor::singular;
use mixed_milnor::transversal::{self, SAMPLER_ATTEMPTS};
use mixed_milnor::weights::{detect_weights, polar_action};
use mixed_milnor::Complex64;
use rand::Rng;
use serde_json::Value;
use sha2::{Digest, Sha256};

const SEED: u64 = 20_240_601;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fam(kind: FamilyKind, a: &[u32], b: &[u32]) -> DeformationFamily {
    build_family(&FamilySpec::new(kind, a, b)).expect("valid family")
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(xs: &[u64]) -> u64 {
    xs.iter().fold(1, |acc, &x| acc / gcd(acc, x) * x)
}

fn norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn link_points(f: &DeformationFamily, t: f64, count: usize, label: &str) -> Result<Vec<Vec<Complex64>>, String> {
    (0..count)
        .map(|k| {
            let mut s = rng::stream(SEED, &format!("{label}:{k}"));
            transversal::sample_link_point(f, t, 1.0, &mut s, SAMPLER_ATTEMPTS)
                .ok_or_else(|| format!("no point of the link found for sample {k} at t = {t}"))
        })
        .collect()
}

// |f_t| evaluated with every monomial replaced by its modulus: the natural
// floating-point scale of an evaluation at z
fn magnitude(f: &DeformationFamily, t: f64, z: &[Complex64]) -> f64 {
    let m = f.member(t).unwrap();
    m.monomials()
        .iter()
        .map(|mono| {
            let mut v = mono.coefficient.norm();
            for ((zj, &nu), &mu) in z.iter().zip(&mono.nu).zip(&mono.mu) {
                v *= zj.norm().powi((nu + mu) as i32);
            }
            v
        })
        .sum()
}

fn criterion_1() -> Check {
    let mut checked = 0;
    for n in 1..=4usize {
        let total = 5usize.pow(n as u32);
        for code in 0..total {
            let a: Vec<u32> = (0..n).map(|j| 2 + (code / 5usize.pow(j as u32) % 5) as u32).collect();
            let monos = (0..n)
                .map(|j| {
                    let mut nu = vec![0; n];
                    nu[j] = a[j];
                    MixedMonomial::new(Complex64::new(1.0, 0.0), nu, vec![0; n])
                })
                .collect();
            let poly = MixedPolynomial::new(n, monos).map_err(|e| e.to_string())?;
            let w = detect_weights(&poly).map_err(|e| e.to_string())?;
            let d = lcm(&a.iter().map(|&x| x as u64).collect::<Vec<_>>());
            let expected: Vec<u64> = a.iter().map(|&x| d / x as u64).collect();
            let polar = w.polar.ok_or_else(|| format!("no polar weights for a = {a:?}"))?;
            ensure(polar.weights == expected && polar.degree == d, || {
                format!("a = {a:?}: got {:?} (d = {}), expected {expected:?} (d = {d})", polar.weights, polar.degree)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} exponent vectors, all p_j = lcm(a)/a_j"))
}

fn random_spec(s: &mut Stream) -> FamilySpec {
    let kind = [FamilyKind::Brieskorn, FamilyKind::TypeI, FamilyKind::TypeII][s.random_range(0..3)];
    let n = s.random_range(2..=3);
    let a: Vec<u32> = (0..n).map(|_| s.random_range(2..=5)).collect();
    let b: Vec<u32> = (0..n).map(|_| s.random_range(0..=2)).collect();
    FamilySpec::new(kind, &a, &b)
}

fn criterion_2() -> Check {
    let ts = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut s = rng::stream(SEED, "homogeneity");
    let mut worst_polar: f64 = 0.0;
    let mut worst_eta: f64 = 0.0;
    for trial in 0..1000 {
        let t = ts[trial % ts.len()];
        let spec = random_spec(&mut s);
        let f = build_family(&spec).map_err(|e| e.to_string())?;
        let z = rng::box_point(&mut s, spec.n());
        let lambda = rng::unit_complex(&mut s);
        let moved = polar_action(&f.polar_weights, lambda, &z).map_err(|e| e.to_string())?;
        let lhs = f.value(t, &moved).unwrap();
        let rhs = lambda.powu(f.polar_degree as u32) * f.value(t, &z).unwrap();
        let rel = (lhs - rhs).norm() / magnitude(&f, t, &z).max(f64::MIN_POSITIVE);
        worst_polar = worst_polar.max(rel);
        ensure(rel <= 1e-10, || format!("polar identity off by {rel:e} for {spec:?} at t = {t}"))?;

        // η identities on the Brieskorn pattern with the same exponents
        let bspec = FamilySpec::new(FamilyKind::Brieskorn, &spec.a, &spec.b);
        let bf = build_family(&bspec).unwrap();
        let w = eta_map(&bspec, &z).unwrap();
        let holo = bf.value(1.0, &w).unwrap();
        let mixed = bf.value(0.0, &z).unwrap();
        let rel = (holo - mixed).norm() / magnitude(&bf, 0.0, &z).max(f64::MIN_POSITIVE);
        worst_eta = worst_eta.max(rel);
        ensure(rel <= 1e-10, || format!("f_a(eta(z)) differs from f_(a,b)(z) by {rel:e} for {bspec:?}"))?;
        let lhs = eta_map(&bspec, &polar_action(&bf.polar_weights, lambda, &z).unwrap()).unwrap();
        let rhs = polar_action(&bf.polar_weights, lambda, &w).unwrap();
        let diff: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(p, q)| p - q).collect();
        let rel = norm(&diff) / norm(&w).max(f64::MIN_POSITIVE);
        worst_eta = worst_eta.max(rel);
        ensure(rel <= 1e-10, || format!("eta is not equivariant: {rel:e} for {bspec:?}"))?;
    }
    Ok(format!("1000 trials; worst polar {worst_polar:.1e}, worst eta {worst_eta:.1e}"))
}

fn criterion_3() -> Check {
    let f = fam(FamilyKind::Brieskorn, &[2, 3], &[1, 1]);
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let rep = singular::certify_smooth_shell(&f, &grid, 1.0, 64, SEED).map_err(|e| e.to_string())?;
    ensure(rep.min_residual_found > 1e-3 && rep.certified, || {
        format!("minimum residual {:e} at t = {}", rep.min_residual_found, rep.argmin_t)
    })?;
    let mut s = rng::stream(SEED, "lemma-points");
    for k in 0..500 {
        let t = s.random_range(0.01..0.99);
        let z: Vec<Complex64> = (0..2)
            .map(|_| Complex64::from_polar(s.random_range(0.05..1.5), s.random_range(0.0..TAU)))
            .collect();
        let check = singular::lemma_inequality_check(&f, t, &z).map_err(|e| e.to_string())?;
        ensure(check.per_index.iter().any(|e| e.governing), || format!("point {k}: no governing index"))?;
        // the inequality is re-derived from the gradient: |L| ≥ bound > |R|
        for e in check.per_index.iter().filter(|e| e.governing) {
            ensure(e.strict && e.l_bound > e.r && e.l_exact >= e.l_bound * (1.0 - 1e-12), || {
                format!("point {k}, index {}: |L| = {}, bound {}, |R| = {}", e.index, e.l_exact, e.l_bound, e.r)
            })?;
        }
    }
    Ok(format!("min residual {:.4} over 11 × 64 restarts; 500 points strict", rep.min_residual_found))
}

fn phi_lhs(a: u32, b: u32, tau: f64, w_abs: f64, s: f64) -> f64 {
    let big_w = w_abs.powi(2 * b as i32);
    s.powi(a as i32) * (tau + (1.0 - tau) * big_w * s.powi(2 * b as i32))
}

fn criterion_4() -> Check {
    let mut s = rng::stream(SEED, "phi");
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = s.random_range(1..=6);
        let b = s.random_range(0..=3);
        let tau = s.random_range(0.0..=1.0);
        let w_abs = s.random_range(0.1..2.0);
        let r = s.random_range(0.1..10.0);
        let root = transversal::solve_phi(a, b, tau, w_abs, r).map_err(|e| e.to_string())?;
        let target = r * (tau + (1.0 - tau) * w_abs.powi(2 * b as i32));
        let err = (phi_lhs(a, b, tau, w_abs, root) - target).abs() / target;
        worst = worst.max(err);
    }
    ensure(worst <= 1e-10, || format!("solve_phi round trip off by {worst:e}"))?;

    let f = fam(FamilyKind::Brieskorn, &[2, 3], &[1, 1]);
    let radii: Vec<f64> = (0..=30).map(|k| 0.5 + 1.5 * k as f64 / 30.0).collect();
    let mut min_margin = f64::INFINITY;
    let mut worst_curve: f64 = 0.0;
    let mut certified = 0;
    let mut k = 0;
    while certified < 100 {
        let t = (k % 11) as f64 / 10.0;
        let mut st = rng::stream(SEED, &format!("witness:{k}"));
        k += 1;
        let Some(z) = transversal::sample_link_point(&f, t, 1.0, &mut st, SAMPLER_ATTEMPTS) else { continue };
        let rank = transversal::rank_test(&f, t, &z).map_err(|e| e.to_string())?;
        if !(rank.margin > 1e-8) {
            continue;
        }
        certified += 1;
        let cert = transversal::radial_witness_brieskorn(&f, t, &z).map_err(|e| e.to_string())?;
        min_margin = min_margin.min(cert.margin);
        for &r in &radii {
            let xi = transversal::radial_curve(&f, t, &z, r).map_err(|e| e.to_string())?;
            worst_curve = worst_curve.max(f.value(t, &xi).unwrap().norm());
        }
        ensure(k < 10_000, || "too few certified points".into())?;
    }
    ensure(min_margin > 0.0, || format!("witness margin {min_margin:e}"))?;
    ensure(worst_curve <= 1e-9, || format!("curve leaves the variety by {worst_curve:e}"))?;
    Ok(format!("phi worst {worst:.1e}; 100 witnesses, min margin {min_margin:.3}, curve residual {worst_curve:.1e}"))
}

fn criterion_5() -> Check {
    let (a, b) = ([2u32, 3, 2], [1u32, 0, 1]);
    let f = fam(FamilyKind::TypeI, &a, &b);
    let ts = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut checks = 0;
    for k in 0..100 {
        let t = ts[k % ts.len()];
        let z = link_points(&f, t, 1, &format!("chain:{k}"))?.remove(0);
        for r in [1.0, 1.5, 2.0, 4.0] {
            let w = transversal::type_i_witness(&f, t, &z, r).map_err(|e| e.to_string())?;
            let tr = &w.trace;
            ensure(w.certificate.margin > 0.0, || format!("point {k}: witness margin {}", w.certificate.margin))?;
            for &j in &tr.j_set {
                let r_j = tr.r_values[j].ok_or("missing r_j")?;
                let s_j = tr.s_values[j];
                let w_abs = z[j].norm();
                // the defining equation of s_j, recomputed
                let target = r_j * (t + (1.0 - t) * w_abs.powi(2 * b[j] as i32));
                let eq = (phi_lhs(a[j], b[j], t, w_abs, s_j) - target).abs() / target;
                ensure(eq <= 1e-10, || format!("point {k}, r = {r}, j = {j}: equation residual {eq:e}"))?;
                ensure(r_j >= 1.0 - 1e-12 && s_j >= 1.0 - 1e-12, || format!("point {k}, r = {r}, j = {j}: r_j = {r_j}, s_j = {s_j}"))?;
                ensure(s_j.powi(a[j] as i32) <= r_j * (1.0 + 1e-12), || format!("point {k}, r = {r}, j = {j}: psi^a > r_j"))?;
                let psi1 = transversal::solve_phi(a[j], b[j], t, w_abs, 1.0).unwrap();
                ensure((psi1 - 1.0).abs() <= 1e-12, || format!("psi_j(1) = {psi1}"))?;
                let lo = transversal::solve_phi(a[j], b[j], t, w_abs, r_j * 0.99).unwrap();
                let hi = transversal::solve_phi(a[j], b[j], t, w_abs, r_j * 1.01).unwrap();
                ensure(lo < s_j && s_j < hi, || format!("psi_j not increasing near r_j = {r_j}"))?;
                checks += 1;
            }
            ensure(tr.checks.iter().all(|c| c.holds), || format!("point {k}, r = {r}: a recursion check failed"))?;
            // each monomial of f_t scales by exactly r along the witness
            let scaled: Vec<Complex64> = z.iter().zip(&tr.s_values).map(|(w, s)| w * s).collect();
            let residual = f.value(t, &scaled).unwrap().norm();
            ensure(residual <= 1e-9 * r, || format!("point {k}, r = {r}: |f_t(s∘w)| = {residual:e}"))?;
        }
    }
    Ok(format!("100 points × 4 radii, {checks} index checks"))
}

fn criterion_6() -> Check {
    let f = fam(FamilyKind::Brieskorn, &[2, 3], &[1, 0]);
    let tube = MilnorTubeSpec::new(1.0, 0.05).unwrap();
    let starts = link_points(&f, 0.0, 200, "k0")?;
    let opts = IsotopyOptions::default();
    let forward = isotopy::transport_link(&f, &starts, 1.0, 200, &tube, &opts).map_err(|e| e.to_string())?;
    ensure(!forward.partial, || "a trace failed".into())?;
    let mut worst_f: f64 = 0.0;
    let mut worst_n: f64 = 0.0;
    let mut worst_loop: f64 = 0.0;
    for (z0, tr) in starts.iter().zip(&forward.traces) {
        let end = tr.endpoint();
        worst_f = worst_f.max(f.value(1.0, end).unwrap().norm());
        worst_n = worst_n.max((norm(end) - 1.0).abs());
        let back = isotopy::integrate_between(&f, end, 1.0, 0.0, 200, &tube, FlowKind::Sphere, &opts).map_err(|e| e.to_string())?;
        let d: Vec<Complex64> = back.endpoint().iter().zip(z0).map(|(p, q)| p - q).collect();
        worst_loop = worst_loop.max(norm(&d));
    }
    ensure(worst_f <= 1e-6, || format!("max |f_1| = {worst_f:e}"))?;
    ensure(worst_n <= 1e-8, || format!("norm residual {worst_n:e}"))?;
    ensure(worst_loop <= 1e-5, || format!("round trip error {worst_loop:e}"))?;

    let plain = IsotopyOptions { renormalize: false, newton: false, ..IsotopyOptions::default() };
    let value_error = |steps: usize| -> Result<f64, String> {
        let mut worst: f64 = 0.0;
        for z in starts.iter().take(20) {
            let tr = isotopy::integrate_between(&f, z, 0.0, 1.0, steps, &tube, FlowKind::Sphere, &plain).map_err(|e| e.to_string())?;
            worst = worst.max(f.value(1.0, tr.endpoint()).unwrap().norm());
        }
        Ok(worst)
    };
    let (coarse, fine) = (value_error(8)?, value_error(16)?);
    let ratio = coarse / fine;
    ensure(ratio >= 8.0, || format!("halving the step improved the residual only {ratio:.2}× ({coarse:e} → {fine:e})"))?;
    Ok(format!(
        "|f_1| ≤ {worst_f:.1e}, norm {worst_n:.1e}, round trip {worst_loop:.1e}, step halving {ratio:.1}×"
    ))
}

fn criterion_7() -> Check {
    let f = fam(FamilyKind::Brieskorn, &[2, 2], &[1, 1]);
    let eta0 = 0.05;
    let tube = MilnorTubeSpec::new(1.0, eta0).unwrap();
    let fiber = isotopy::sample_tube_fiber(&f, 0.0, &tube, 0.0, 100, SEED);
    ensure(fiber.len() == 100, || format!("only {} fiber points found", fiber.len()))?;
    let moved = isotopy::transport_tube_fiber(&f, &fiber, 1.0, 200, &tube, &IsotopyOptions::default()).map_err(|e| e.to_string())?;
    let target = Complex64::new(eta0, 0.0);
    let worst = moved
        .traces
        .iter()
        .map(|tr| (f.value(1.0, tr.endpoint()).unwrap() - target).norm())
        .fold(0.0, f64::max);
    let outside = moved.traces.iter().map(|tr| norm(tr.endpoint()) - 1.0).fold(f64::NEG_INFINITY, f64::max);
    ensure(worst <= 1e-6, || format!("max |f_1 − eta0| = {worst:e}"))?;
    ensure(outside <= 1e-8, || format!("a fiber point left the ball by {outside:e}"))?;
    Ok(format!("100 fiber points, max |f_1 − eta0| = {worst:.1e}"))
}

fn components(f: &DeformationFamily, t: f64) -> Result<(usize, link::LinkSample), String> {
    let sample = link::sample_link(f, t, 1.0, 32, SEED).map_err(|e| e.to_string())?;
    ensure(!sample.ambiguous, || format!("ambiguous sample for {:?} at t = {t}", f.spec))?;
    let n = link::count_components(&sample).map_err(|e| e.to_string())?;
    Ok((n, sample))
}

fn criterion_8() -> Check {
    for a1 in 2..=6u32 {
        for a2 in 2..=6u32 {
            let f = fam(FamilyKind::Brieskorn, &[a1, a2], &[0, 0]);
            let (n, _) = components(&f, 1.0)?;
            let g = gcd(a1 as u64, a2 as u64) as usize;
            ensure(n == g, || format!("a = ({a1}, {a2}): {n} components, gcd {g}"))?;
        }
    }
    let tube = MilnorTubeSpec::new(1.0, 0.05).unwrap();
    let mut notes = Vec::new();
    for (a, b) in [([2, 3], [1, 0]), ([2, 4], [0, 1]), ([2, 2], [1, 1])] {
        let f = fam(FamilyKind::Brieskorn, &a, &b);
        let (mixed, sample0) = components(&f, 0.0)?;
        let (holo, _) = components(&f, 1.0)?;
        ensure(mixed == holo, || format!("{a:?}, {b:?}: {mixed} components at t = 0, {holo} at t = 1"))?;
        // transport a spread of points from every orbit and recount at t = 1
        let starts: Vec<Vec<Complex64>> = sample0
            .orbits
            .iter()
            .flat_map(|o| (0..8).map(move |k| o.start + k * o.len / 8))
            .map(|i| sample0.points[i].clone())
            .collect();
        let moved = isotopy::transport_link(&f, &starts, 1.0, 100, &tube, &IsotopyOptions::default()).map_err(|e| e.to_string())?;
        ensure(!moved.partial, || "a transported trace failed".into())?;
        let ends: Vec<Vec<Complex64>> = moved.traces.iter().map(|tr| tr.endpoint().to_vec()).collect();
        let carried = link::link_from_points(&f, 1.0, 1.0, &ends).map_err(|e| e.to_string())?;
        ensure(!carried.ambiguous, || "transported link is ambiguous".into())?;
        let by_transport = link::count_components(&carried).map_err(|e| e.to_string())?;
        ensure(by_transport == holo, || format!("{a:?}, {b:?}: transport gives {by_transport}, sampling {holo}"))?;
        notes.push(format!("{a:?}/{b:?}: {mixed}"));
    }
    Ok(format!("25 holomorphic counts = gcd; mixed = holomorphic for {}", notes.join(", ")))
}

fn criterion_9() -> Check {
    let mut s = rng::stream(SEED, "scaling");
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let n = s.random_range(2..=4);
        let chain = k % 2 == 1;
        let monos = (0..n)
            .map(|j| {
                let a = s.random_range(1..=5);
                let b = s.random_range(0..=2);
                let mut nu = vec![0; n];
                let mut mu = vec![0; n];
                nu[j] = a + b;
                mu[j] = b;
                if chain && j + 1 < n {
                    nu[j + 1] = 1;
                }
                let modulus = 10f64.powf(s.random_range(-1.0..=1.0));
                MixedMonomial::new(Complex64::from_polar(modulus, s.random_range(-3.2..3.2)), nu, mu)
            })
            .collect();
        let poly = MixedPolynomial::new(n, monos).map_err(|e| e.to_string())?;
        ensure(poly.exponent_matrices().is_simplicial().unwrap().simplicial, || format!("case {k} is not simplicial"))?;
        let sol = normalize::normalize_coefficients(&poly).map_err(|e| e.to_string())?;
        let residual = normalize::verify_scaling(&poly, &sol.scaling, 64, SEED + k as u64).map_err(|e| e.to_string())?;
        worst = worst.max(residual);
    }
    ensure(worst <= 1e-10, || format!("worst verification residual {worst:e}"))?;
    Ok(format!("50 polynomials, worst residual {worst:.1e}"))
}

fn criterion_10(dir: &Path) -> Check {
    let spec = dir.join("loop.json");
    std::fs::write(&spec, r#"{"family": "type_ii", "a": [2, 2], "b": [1, 1]}"#).unwrap();
    let run = |out: &Path| {
        mixed_milnor_cli::run([
            "mixed-milnor", "explore-conjecture", "--family", spec.to_str().unwrap(), "--t-grid", "0:1:0.1", "--samples", "500",
            "--seed", "7", "--canonical", "--out", out.to_str().unwrap(),
        ])
    };
    let (first, second) = (dir.join("first.json"), dir.join("second.json"));
    let code = run(&first);
    ensure(code == 0, || format!("first run exited with {code}"))?;
    let code = run(&second);
    ensure(code == 0, || format!("second run exited with {code}"))?;
    let bytes = std::fs::read(&first).unwrap();
    ensure(bytes == std::fs::read(&second).unwrap(), || "reruns differ".into())?;
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    let min = v["min_margin"].as_f64().ok_or("no minimum margin reported")?;
    ensure(min > 0.0, || format!("minimum margin {min}"))?;
    ensure(v["t_grid"].as_array().map(Vec::len) == Some(11), || "t grid is not 11 points".into())?;
    ensure(v["evaluated"].as_u64() == Some(5500), || format!("evaluated {}", v["evaluated"]))?;
    let m = &v["manifest"];
    let digest: String = Sha256::digest(std::fs::read(&spec).unwrap()).iter().map(|b| format!("{b:02x}")).collect();
    ensure(m["inputs"]["spec"] == digest.as_str(), || "spec digest mismatch".into())?;
    ensure(m["subcommand"] == "explore-conjecture" && m["seed"] == 7 && m["version"].is_string(), || {
        format!("manifest header {m}")
    })?;
    ensure(m["params"]["samples"] == 500 && m["params"]["radius"].is_number() && m["params"]["tolerance"].is_number(), || {
        format!("manifest params {}", m["params"])
    })?;
    ensure(m["outcome"]["exit_code"] == 0 && m.get("started_at").is_none(), || format!("manifest outcome {m}"))?;
    Ok(format!("min margin {min:.4} over 5500 points; rerun byte-identical ({} bytes)", bytes.len()))
}

fn main() {
    let dir = tempfile::TempDir::new().unwrap();
    let criteria: Vec<(u32, &str, u64, Box<dyn Fn() -> Check>)> = vec![
        (1, "weight formula", 1, Box::new(criterion_1)),
        (2, "homogeneity identities", 5, Box::new(criterion_2)),
        (3, "no singular points on the shell", 120, Box::new(criterion_3)),
        (4, "radial witnesses", 30, Box::new(criterion_4)),
        (5, "chain recursion", 30, Box::new(criterion_5)),
        (6, "link isotopy", 60, Box::new(criterion_6)),
        (7, "tube fiber transport", 60, Box::new(criterion_7)),
        (8, "link component counts", 180, Box::new(criterion_8)),
        (9, "coefficient scaling", 5, Box::new(criterion_9)),
        (10, "conjecture explorer reproducibility", 120, Box::new(move || criterion_10(dir.path()))),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in &criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*limit);
        let (status, detail) = match (&result, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {limit} s limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {id:>2} {name} ({:.2} s, limit {limit} s): {detail}", elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
