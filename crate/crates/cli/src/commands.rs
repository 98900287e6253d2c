//! Subcommand bodies. Each one builds a report object and an exit code; the
//! manifest and output handling are shared.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, Context};
use mixed_milnor::family::{DeformationFamily, FamilyKind, FamilySpec, MilnorTubeSpec};
use mixed_milnor::isotopy::{self, Eta0Choice, FlowKind, IsotopyOptions, IsotopyTrace};
use mixed_milnor::link::{self, LinkSample};
use mixed_milnor::normalize;
use mixed_milnor::poly::MixedPolynomial;
use mixed_milnor::rng;
use mixed_milnor::singular::{self, SearchDomain, SearchOptions};
use mixed_milnor::transversal::{self, TransversalityCertificate, TypeIWitnessTrace, SAMPLER_ATTEMPTS};
use mixed_milnor::weights;
use mixed_milnor::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::input::{self, Spec};
use crate::report::{self, Manifest, Outcome};
use crate::{Cli, CliError, Command, MethodArg};

pub const NORMALIZE_TOLERANCE: f64 = 1e-10;
pub const SMOOTH_TOLERANCE: f64 = 1e-3;
pub const MARGIN_TOLERANCE: f64 = 1e-8;
pub const ISOTOPY_TOLERANCE: f64 = 1e-6;
/// Largest accepted `|f_t|` along a witness curve.
pub const CURVE_TOLERANCE: f64 = 1e-8;

/// Grid and sample count of the automatic tube-level scan.
const ETA0_SCAN_SAMPLES: usize = 256;
const ETA0_MARGIN: f64 = 1e-2;
const DEFAULT_FIBER_POINTS: usize = 100;

struct Finished {
    report: Value,
    exit_code: i32,
    summary: String,
}

fn internal<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Internal(e.into())
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(internal)
}

fn tolerance_or(cli: &Cli, default: f64) -> Result<f64, CliError> {
    let tol = cli.global.tolerance.unwrap_or(default);
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(CliError::Input(anyhow!("tolerance must be a finite nonnegative number")));
    }
    Ok(tol)
}

fn grid(text: &str) -> Result<Vec<f64>, CliError> {
    input::parse_grid(text).map_err(CliError::Input)
}

fn status(exit_code: i32) -> &'static str {
    if exit_code == 0 {
        "ok"
    } else {
        "property_failure"
    }
}

/// Runs the parsed command and writes its report. Returns the exit code.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let started = chrono::Utc::now();
    let mut inputs = BTreeMap::new();
    let (params, tolerance, finished) = match &cli.command {
        Command::Analyze(a) => (to_value(a)?, None, analyze(&a.spec, &mut inputs)?),
        Command::Normalize(a) => {
            let tol = tolerance_or(cli, NORMALIZE_TOLERANCE)?;
            (to_value(a)?, Some(tol), normalize_cmd(&a.spec, a.samples, cli.global.seed, tol, &mut inputs)?)
        }
        Command::CertifySmooth(a) => {
            let tol = tolerance_or(cli, SMOOTH_TOLERANCE)?;
            (to_value(a)?, Some(tol), certify(a, cli.global.seed, tol, &mut inputs)?)
        }
        Command::CheckTransversality(a) => {
            let tol = tolerance_or(cli, MARGIN_TOLERANCE)?;
            (to_value(a)?, Some(tol), check_transversality(a, cli.global.seed, tol, &mut inputs)?)
        }
        Command::ExploreConjecture(a) => {
            let tol = tolerance_or(cli, MARGIN_TOLERANCE)?;
            (to_value(a)?, Some(tol), explore(a, cli.global.seed, tol, &mut inputs)?)
        }
        Command::BuildIsotopy(a) => {
            let tol = tolerance_or(cli, ISOTOPY_TOLERANCE)?;
            (to_value(a)?, Some(tol), build_isotopy(a, cli.global.seed, tol, &mut inputs)?)
        }
        Command::TraceLink(a) => (to_value(a)?, None, trace_link(a, cli.global.seed, &mut inputs)?),
    };
    let mut params = params;
    if let (Value::Object(map), Some(tol)) = (&mut params, tolerance) {
        map.insert("tolerance".into(), to_value(&tol)?);
    }
    let finished_at = chrono::Utc::now();
    let manifest = Manifest {
        subcommand: cli.command.name().to_string(),
        inputs,
        params,
        seed: cli.global.seed,
        version: report::VERSION,
        started_at: (!cli.global.canonical).then(|| started.to_rfc3339()),
        finished_at: (!cli.global.canonical).then(|| finished_at.to_rfc3339()),
        outcome: Outcome {
            status: status(finished.exit_code),
            exit_code: finished.exit_code,
            summary: finished.summary,
        },
    };
    let mut document = match finished.report {
        Value::Object(map) => map,
        other => return Err(internal(anyhow!("report is not an object: {other}"))),
    };
    document.insert("manifest".into(), to_value(&manifest)?);
    let text = report::canonical_json(&Value::Object(document)).map_err(internal)?;
    match &cli.global.out {
        Some(path) => write_file(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(finished.exit_code)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(CliError::Input)
}

fn load_polynomial(path: &Path, inputs: &mut BTreeMap<String, String>) -> Result<(MixedPolynomial, Option<FamilySpec>), CliError> {
    let loaded = input::read_input(path)?;
    inputs.insert("spec".into(), loaded.digest.clone());
    Ok(match input::parse_spec(&loaded.bytes)? {
        Spec::Family(spec) => {
            let fam = mixed_milnor::family::build_family(&spec)?;
            (fam.endpoint_mixed, Some(spec))
        }
        Spec::Polynomial(p) => (p, None),
    })
}

fn load_family(path: &Path, inputs: &mut BTreeMap<String, String>) -> Result<DeformationFamily, CliError> {
    let (fam, loaded) = input::load_family(path)?;
    inputs.insert("spec".into(), loaded.digest);
    Ok(fam)
}

#[derive(Serialize)]
struct AnalyzeReport {
    family: Option<FamilySpec>,
    polynomial: MixedPolynomial,
    polar: Option<weights::Weights>,
    radial: Option<weights::Weights>,
    simplicial: bool,
    det_plus: i128,
    det_minus: i128,
}

fn analyze(spec: &Path, inputs: &mut BTreeMap<String, String>) -> Result<Finished, CliError> {
    let (poly, family) = load_polynomial(spec, inputs)?;
    let w = weights::detect_weights(&poly)?;
    let s = poly.exponent_matrices().is_simplicial()?;
    let summary = format!(
        "polar weights {}, radial weights {}, simplicial {}",
        w.polar.as_ref().map_or("none".into(), |p| format!("{:?} (d = {})", p.weights, p.degree)),
        w.radial.as_ref().map_or("none".into(), |q| format!("{:?} (d = {})", q.weights, q.degree)),
        s.simplicial
    );
    let report = AnalyzeReport {
        family,
        polynomial: poly,
        polar: w.polar,
        radial: w.radial,
        simplicial: s.simplicial,
        det_plus: s.det_plus,
        det_minus: s.det_minus,
    };
    Ok(Finished { report: to_value(&report)?, exit_code: 0, summary })
}

#[derive(Serialize)]
struct NormalizeReport {
    alpha: Vec<Complex64>,
    gamma: Vec<f64>,
    epsilon: Vec<f64>,
    /// Verification residual over random points.
    residual: f64,
    coefficient_residual: f64,
    condition: Option<f64>,
    samples: usize,
    tolerance: f64,
    normalized: MixedPolynomial,
}

fn normalize_cmd(
    spec: &Path,
    samples: usize,
    seed: u64,
    tolerance: f64,
    inputs: &mut BTreeMap<String, String>,
) -> Result<Finished, CliError> {
    if samples == 0 {
        return Err(CliError::Input(anyhow!("at least one verification sample is required")));
    }
    let (poly, _) = load_polynomial(spec, inputs)?;
    let norm = normalize::normalize_coefficients(&poly)?;
    let residual = normalize::verify_scaling(&poly, &norm.scaling, samples, seed)?;
    let ok = residual <= tolerance;
    let report = NormalizeReport {
        alpha: norm.scaling.alpha,
        gamma: norm.scaling.gamma,
        epsilon: norm.scaling.epsilon,
        residual,
        coefficient_residual: norm.scaling.residual,
        condition: norm.scaling.condition,
        samples,
        tolerance,
        normalized: norm.normalized,
    };
    Ok(Finished {
        report: to_value(&report)?,
        exit_code: if ok { 0 } else { 1 },
        summary: format!("verification residual {residual:e} (tolerance {tolerance:e})"),
    })
}

fn certify(a: &crate::CertifyArgs, seed: u64, tolerance: f64, inputs: &mut BTreeMap<String, String>) -> Result<Finished, CliError> {
    let fam = load_family(&a.family, inputs)?;
    let t_grid = grid(&a.t_grid)?;
    let domain = match a.level_eta0 {
        Some(eta0) => SearchDomain::Level { eta0, radius: a.radius },
        None => SearchDomain::Sphere { radius: a.radius },
    };
    let opts = SearchOptions { max_iterations: a.max_iterations, tolerance, ..SearchOptions::default() };
    let rep = singular::certify_smooth_with(&fam, &t_grid, domain, a.restarts, seed, &opts)?;
    let summary = format!(
        "minimum residual {:e} at t = {} (tolerance {tolerance:e})",
        rep.min_residual_found, rep.argmin_t
    );
    Ok(Finished { exit_code: if rep.certified { 0 } else { 1 }, report: to_value(&rep)?, summary })
}

#[derive(Serialize)]
struct PointCheck {
    t: f64,
    point: Vec<Complex64>,
    rank: Option<TransversalityCertificate>,
    witness: Option<TransversalityCertificate>,
    chain_trace: Option<TypeIWitnessTrace>,
    error: Option<String>,
}

#[derive(Serialize)]
struct TransversalityReport {
    family: FamilySpec,
    t_grid: Vec<f64>,
    radius: f64,
    method: MethodArg,
    samples_per_t: usize,
    seed: u64,
    tolerance: f64,
    curve_tolerance: f64,
    points: Vec<PointCheck>,
    min_rank_margin: Option<f64>,
    min_witness_margin: Option<f64>,
    max_curve_residual: Option<f64>,
    sampler_failures: usize,
    failures: usize,
    certified: bool,
}

fn check_point(fam: &DeformationFamily, t: f64, point: Vec<Complex64>, method: MethodArg, eval_radius: f64) -> PointCheck {
    let mut check = PointCheck { t, point, rank: None, witness: None, chain_trace: None, error: None };
    let mut errors = Vec::new();
    if method != MethodArg::Witness {
        match transversal::rank_test(fam, t, &check.point) {
            Ok(c) => check.rank = Some(c),
            Err(e) => errors.push(e.to_string()),
        }
    }
    if method != MethodArg::Rank {
        let result = match fam.spec.kind {
            FamilyKind::Brieskorn => transversal::radial_witness_brieskorn(fam, t, &check.point).map(|c| (c, None)),
            _ => transversal::type_i_witness(fam, t, &check.point, eval_radius).map(|w| (w.certificate, Some(w.trace))),
        };
        match result {
            Ok((c, trace)) => {
                check.witness = Some(c);
                check.chain_trace = trace;
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    if !errors.is_empty() {
        check.error = Some(errors.join("; "));
    }
    check
}

fn point_fails(p: &PointCheck, tolerance: f64) -> bool {
    p.error.is_some()
        || p.rank.as_ref().is_some_and(|c| !(c.margin > tolerance))
        || p.witness.as_ref().is_some_and(|c| {
            !(c.margin > tolerance) || !c.curve_residual.is_some_and(|r| r <= CURVE_TOLERANCE)
        })
        || p.chain_trace.as_ref().is_some_and(|tr| tr.checks.iter().any(|c| !c.holds))
}

fn fold_min(values: impl Iterator<Item = f64>) -> Option<f64> {
    values.fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
}

fn fold_max(values: impl Iterator<Item = f64>) -> Option<f64> {
    values.fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}

fn check_transversality(
    a: &crate::TransversalityArgs,
    seed: u64,
    tolerance: f64,
    inputs: &mut BTreeMap<String, String>,
) -> Result<Finished, CliError> {
    let fam = load_family(&a.family, inputs)?;
    let t_grid = grid(&a.t_grid)?;
    if !(a.radius > 0.0 && a.radius.is_finite()) {
        return Err(CliError::Input(anyhow!("radius must be positive")));
    }
    if a.method != MethodArg::Rank && fam.spec.kind == FamilyKind::TypeII {
        return Err(CliError::Input(anyhow!(
            "no radial witness is available for type_ii families; use --method rank or explore-conjecture"
        )));
    }
    let jobs: Vec<(usize, usize)> = (0..t_grid.len()).flat_map(|ti| (0..a.samples).map(move |k| (ti, k))).collect();
    let results: Vec<Option<PointCheck>> = jobs
        .par_iter()
        .map(|&(ti, k)| {
            let t = t_grid[ti];
            let mut s = rng::stream(seed, &format!("transversality:{ti}:{k}"));
            transversal::sample_link_point(&fam, t, a.radius, &mut s, SAMPLER_ATTEMPTS)
                .map(|z| check_point(&fam, t, z, a.method, a.eval_radius))
        })
        .collect();
    let sampler_failures = results.iter().filter(|r| r.is_none()).count();
    let points: Vec<PointCheck> = results.into_iter().flatten().collect();
    let failures = points.iter().filter(|p| point_fails(p, tolerance)).count();
    let min_rank_margin = fold_min(points.iter().filter_map(|p| p.rank.as_ref().map(|c| c.margin)));
    let min_witness_margin = fold_min(points.iter().filter_map(|p| p.witness.as_ref().map(|c| c.margin)));
    let max_curve_residual = fold_max(points.iter().filter_map(|p| p.witness.as_ref().and_then(|c| c.curve_residual)));
    let certified = failures == 0 && !points.is_empty();
    let summary = format!(
        "{} points checked, {failures} failures, {sampler_failures} sampler failures",
        points.len()
    );
    let report = TransversalityReport {
        family: fam.spec.clone(),
        t_grid,
        radius: a.radius,
        method: a.method,
        samples_per_t: a.samples,
        seed,
        tolerance,
        curve_tolerance: CURVE_TOLERANCE,
        points,
        min_rank_margin,
        min_witness_margin,
        max_curve_residual,
        sampler_failures,
        failures,
        certified,
    };
    Ok(Finished { report: to_value(&report)?, exit_code: if certified { 0 } else { 1 }, summary })
}

fn explore(a: &crate::ConjectureArgs, seed: u64, tolerance: f64, inputs: &mut BTreeMap<String, String>) -> Result<Finished, CliError> {
    let fam = load_family(&a.family, inputs)?;
    if fam.spec.kind != FamilyKind::TypeII {
        return Err(CliError::Input(anyhow!("explore-conjecture takes type_ii families, got {}", fam.spec.kind)));
    }
    let t_grid = grid(&a.t_grid)?;
    let rep = transversal::conjecture_search_type_ii(&fam, &t_grid, a.radius, a.samples, seed, tolerance)?;
    let ok = rep.min_margin.is_some_and(|m| m > tolerance) && rep.flagged.is_empty();
    let summary = match rep.min_margin {
        Some(m) => format!("minimum margin {m:e} over {} points; {}", rep.evaluated, rep.label),
        None => "no sampled point reached the link".to_string(),
    };
    Ok(Finished { report: to_value(&rep)?, exit_code: if ok { 0 } else { 1 }, summary })
}

#[derive(Serialize)]
struct Endpoint {
    start: Vec<Complex64>,
    endpoint: Vec<Complex64>,
    value_residual: f64,
    value_tracked: bool,
    norm_residual: f64,
    failed: bool,
    failure: Option<String>,
}

impl From<&IsotopyTrace> for Endpoint {
    fn from(tr: &IsotopyTrace) -> Self {
        Endpoint {
            start: tr.start.clone(),
            endpoint: tr.endpoint().to_vec(),
            value_residual: tr.value_residual,
            value_tracked: tr.value_tracked,
            norm_residual: tr.norm_residual,
            failed: tr.failed,
            failure: tr.failure.clone(),
        }
    }
}

#[derive(Serialize)]
struct IsotopyReport {
    family: FamilySpec,
    tube: MilnorTubeSpec,
    eta0_choice: Option<Eta0Choice>,
    kind: FlowKind,
    theta: Option<f64>,
    t_end: f64,
    steps: usize,
    tolerance: f64,
    start_count: usize,
    sampler_failures: usize,
    worst_value_residual: f64,
    worst_norm_residual: f64,
    partial: bool,
    traces: Option<Vec<IsotopyTrace>>,
    endpoints: Option<Vec<Endpoint>>,
}

fn build_isotopy(a: &crate::IsotopyArgs, seed: u64, tolerance: f64, inputs: &mut BTreeMap<String, String>) -> Result<Finished, CliError> {
    let fam = load_family(&a.family, inputs)?;
    if a.steps == 0 {
        return Err(CliError::Input(anyhow!("at least one step is required")));
    }
    if !(a.radius > 0.0 && a.radius.is_finite()) {
        return Err(CliError::Input(anyhow!("radius must be positive")));
    }
    if !(0.0..=1.0).contains(&a.t_end) {
        return Err(CliError::Input(anyhow!("t-end must lie in [0, 1]")));
    }
    let (eta0, eta0_choice) = match a.eta0 {
        Some(e) => (e, None),
        None => {
            let scan_grid = input::parse_grid("0:1:0.1").map_err(internal)?;
            let choice = isotopy::choose_eta0(&fam, &scan_grid, a.radius, ETA0_SCAN_SAMPLES, ETA0_MARGIN, seed)?;
            (choice.eta0, Some(choice))
        }
    };
    let tube = MilnorTubeSpec::new(a.radius, eta0)?;
    let opts = IsotopyOptions { value_tolerance: tolerance, ..IsotopyOptions::default() };

    let mut sampler_failures = 0;
    let starts: Vec<Vec<Complex64>> = match (&a.points, a.sample_link) {
        (Some(path), _) => {
            let loaded = input::read_input(path)?;
            inputs.insert("points".into(), loaded.digest.clone());
            input::parse_points(&loaded.bytes)?
        }
        (None, count) if a.fiber => {
            let count = count.unwrap_or(DEFAULT_FIBER_POINTS);
            let pts = isotopy::sample_tube_fiber(&fam, 0.0, &tube, a.theta, count, seed);
            sampler_failures = count - pts.len();
            pts
        }
        (None, Some(count)) => {
            let found: Vec<Option<Vec<Complex64>>> = (0..count)
                .into_par_iter()
                .map(|k| {
                    let mut s = rng::stream(seed, &format!("isotopy-start:{k}"));
                    transversal::sample_link_point(&fam, 0.0, a.radius, &mut s, SAMPLER_ATTEMPTS)
                })
                .collect();
            sampler_failures = found.iter().filter(|p| p.is_none()).count();
            found.into_iter().flatten().collect()
        }
        (None, None) => return Err(CliError::Input(anyhow!("give --points, --sample-link N or --fiber"))),
    };
    if starts.is_empty() {
        return Err(CliError::Internal(anyhow!("no starting points could be placed")));
    }
    let transport = if a.fiber {
        isotopy::transport_tube_fiber(&fam, &starts, a.t_end, a.steps, &tube, &opts)?
    } else {
        isotopy::transport_link(&fam, &starts, a.t_end, a.steps, &tube, &opts)?
    };
    let ok = !transport.partial && transport.worst_value_residual <= tolerance && sampler_failures == 0;
    let summary = format!(
        "{} points to t = {}: value residual {:e}, norm residual {:e}",
        starts.len(),
        a.t_end,
        transport.worst_value_residual,
        transport.worst_norm_residual
    );
    let (traces, endpoints) = if a.endpoints_only {
        (None, Some(transport.traces.iter().map(Endpoint::from).collect()))
    } else {
        (Some(transport.traces), None)
    };
    let report = IsotopyReport {
        family: fam.spec.clone(),
        tube,
        eta0_choice,
        kind: if a.fiber { FlowKind::TubeFiber } else { FlowKind::Sphere },
        theta: a.fiber.then_some(a.theta),
        t_end: a.t_end,
        steps: a.steps,
        tolerance,
        start_count: starts.len(),
        sampler_failures,
        worst_value_residual: transport.worst_value_residual,
        worst_norm_residual: transport.worst_norm_residual,
        partial: transport.partial,
        traces,
        endpoints,
    };
    Ok(Finished { report: to_value(&report)?, exit_code: if ok { 0 } else { 1 }, summary })
}

fn write_csv(sample: &LinkSample, path: &Path) -> Result<(), CliError> {
    let n = sample.points.first().map_or(2, Vec::len);
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(CliError::Input)?;
    let mut header = vec!["orbit".to_string(), "component".to_string()];
    for j in 1..=n {
        header.push(format!("re_z{j}"));
        header.push(format!("im_z{j}"));
    }
    w.write_record(&header).map_err(internal)?;
    for (oi, orbit) in sample.orbits.iter().enumerate() {
        for z in &sample.points[orbit.start..orbit.start + orbit.len] {
            let mut row = vec![oi.to_string(), orbit.component.to_string()];
            for c in z {
                row.push(format!("{:.16e}", c.re));
                row.push(format!("{:.16e}", c.im));
            }
            w.write_record(&row).map_err(internal)?;
        }
    }
    w.flush().map_err(internal)
}

fn trace_link(a: &crate::TraceArgs, seed: u64, inputs: &mut BTreeMap<String, String>) -> Result<Finished, CliError> {
    let fam = load_family(&a.family, inputs)?;
    let sample = link::sample_link(&fam, a.t, a.radius, a.seeds, seed)?;
    if let Some(path) = &a.svg {
        let svg = link::render_svg(&sample)?;
        write_file(path, svg.as_bytes())?;
    }
    if let Some(path) = &a.csv {
        write_csv(&sample, path)?;
    }
    let ok = !sample.empty && !sample.ambiguous;
    let summary = format!(
        "{} components from {} orbits{}",
        sample.component_count,
        sample.orbits.len(),
        if sample.ambiguous { " (ambiguous)" } else if sample.empty { " (empty)" } else { "" }
    );
    Ok(Finished { report: to_value(&sample)?, exit_code: if ok { 0 } else { 1 }, summary })
}
