use std::path::{Path, PathBuf};

use blaschke::criteria::InnerFunction;
use blaschke::sampling::{random_disk_point, random_finite};
use blaschke::{
    case2a_check, case2b_check, certify_indestructible, criteria_report, default_grid, destructibility_probe,
    grid_from_rings, preimage_decomposition_check, solve_maximal, verify_maximal, CaseReport, CertificateVerdict,
    CriticalSet, FiniteBlaschke, LogModulus, Source, Verdict, C64,
};
use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::model::ModelSpec;
use crate::output::{cell, float, Table};
use crate::Outcome;

const ZERO: C64 = C64::new(0.0, 0.0);
/// Zeros of random products are drawn uniformly from this disk.
const RANDOM_RADIUS: f64 = 0.8;

fn parse_complex(text: &str) -> Result<C64, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| CliError::Usage(format!("bad number {s:?} in {text:?}")));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(CliError::Usage(format!("expected RE or RE,IM, got {text:?}"))),
    }
}

/// `"r:count,r:count,..."`; a radius of 0 stands for the origin.
fn parse_rings(text: &str) -> Result<Vec<C64>, CliError> {
    let mut rings = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (r, n) =
            item.split_once(':').ok_or_else(|| CliError::Usage(format!("ring {item:?} is not RADIUS:COUNT")))?;
        let r: f64 = r.parse().map_err(|_| CliError::Usage(format!("bad ring radius {r:?}")))?;
        let n: usize = n.parse().map_err(|_| CliError::Usage(format!("bad ring count {n:?}")))?;
        if !(0.0..1.0).contains(&r) {
            return Err(CliError::Usage(format!("ring radius {r} is not in [0, 1)")));
        }
        rings.push((r, n));
    }
    let grid = grid_from_rings(&rings);
    if grid.is_empty() {
        return Err(blaschke::Error::Grid.into());
    }
    Ok(grid)
}

fn parse_schedule(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Usage(format!("bad radius {s:?} in schedule"))))
        .collect()
}

fn check_tol(name: &str, tol: f64) -> Result<(), CliError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{name} must be positive, got {tol}")))
    }
}

fn read_finite(path: &Path) -> Result<FiniteBlaschke, CliError> {
    ModelSpec::read(path)?
        .as_finite()?
        .ok_or_else(|| CliError::Usage(format!("{} is not a finite product", path.display())))
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn report<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("reports serialize to JSON")
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Evaluation point `RE,IM`; may be repeated.
    #[arg(long = "z", required = true, allow_hyphen_values = true)]
    pub z: Vec<String>,
    /// Tolerance for adaptively truncated factors.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

pub fn eval(args: &EvalArgs) -> Result<Outcome, CliError> {
    check_tol("--tol", args.tol)?;
    let spec = ModelSpec::read(&args.model)?;
    let model = spec.to_inner();
    let mut table = Table::new(&["re", "im", "value_re", "value_im", "log_modulus", "err_bound"]);
    let mut points = Vec::new();
    for text in &args.z {
        let z = parse_complex(text)?;
        if !(z.norm() < 1.0) {
            return Err(blaschke::Error::Domain(format!("{z} is not interior")).into());
        }
        let (value, log_modulus, err) = match &spec {
            ModelSpec::Sequence(t) => {
                let log = match t.log_modulus_at_level(z, t.level()) {
                    LogModulus::Finite { value, .. } => value,
                    LogModulus::AtZero { .. } => f64::NEG_INFINITY,
                };
                (t.evaluate(z), log, Some(t.tail_error(z, t.level())))
            }
            _ => (model.value(z, args.tol)?, model.log_modulus(z, args.tol)?, None),
        };
        table.push(vec![
            float(z.re),
            float(z.im),
            float(value.re),
            float(value.im),
            cell(log_modulus),
            err.map_or(String::new(), cell),
        ]);
        points.push(json!({
            "z": pair(z),
            "value": pair(value),
            "log_modulus": log_modulus,
            "err_bound": err,
        }));
    }
    Ok(Outcome { report: json!({ "model": spec, "points": points }), table, code: 0 })
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Grid of shifts as `RADIUS:COUNT,...`; defaults to two rings plus points near F(0).
    #[arg(long)]
    pub grid_rings: Option<String>,
    #[arg(long, default_value_t = 1e-7)]
    pub tol_cert: f64,
}

fn verdict_code(verdict: CertificateVerdict) -> u8 {
    match verdict {
        CertificateVerdict::Certified => 0,
        CertificateVerdict::Approximate => 3,
        CertificateVerdict::Refuted => 4,
    }
}

pub fn certify(args: &CertifyArgs) -> Result<Outcome, CliError> {
    check_tol("--tol-cert", args.tol_cert)?;
    let spec = ModelSpec::read(&args.model)?;
    let finite = spec.as_finite()?;
    let source = match (&finite, &spec) {
        (Some(b), _) => Source::Finite(b),
        (None, ModelSpec::Sequence(t)) => Source::Truncated(t),
        _ => return Err(CliError::Usage("certify needs a finite or sequence model".into())),
    };
    let grid = match &args.grid_rings {
        Some(text) => parse_rings(text)?,
        None => default_grid(source.value_at_origin()?),
    };
    let certificate = certify_indestructible(source, &grid, args.tol_cert)?;
    let mut table = Table::new(&["a_re", "a_im", "residual"]);
    for g in &certificate.m1_grid {
        table.push(vec![float(g.a.re), float(g.a.im), cell(g.residual)]);
    }
    let code = verdict_code(certificate.verdict);
    Ok(Outcome { report: report(&certificate), table, code })
}

#[derive(Debug, Args, Serialize)]
pub struct ProbeArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Ring grid `RADIUS:COUNT,...`; defaults to `0:1,0.3:8,0.6:8` unless `--point` is given.
    #[arg(long)]
    pub grid_rings: Option<String>,
    /// Additional shift `RE,IM`; may be repeated.
    #[arg(long = "point", allow_hyphen_values = true)]
    pub points: Vec<String>,
    #[arg(long, default_value = "0.5,0.9,0.99,0.999")]
    pub r_schedule: String,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_quad: f64,
}

pub fn probe(args: &ProbeArgs) -> Result<Outcome, CliError> {
    check_tol("--tol-quad", args.tol_quad)?;
    let model = ModelSpec::read(&args.model)?.to_inner();
    let mut grid = match (&args.grid_rings, args.points.is_empty()) {
        (Some(text), _) if text.trim().is_empty() => Vec::new(),
        (Some(text), _) => parse_rings(text)?,
        (None, true) => parse_rings("0:1,0.3:8,0.6:8")?,
        (None, false) => Vec::new(),
    };
    for text in &args.points {
        grid.push(parse_complex(text)?);
    }
    let schedule = parse_schedule(&args.r_schedule)?;
    let entries = destructibility_probe(&model, &grid, &schedule, args.tol_quad)?;
    let mut table = Table::new(&["a_re", "a_im", "singular_mass", "verdict"]);
    for e in &entries {
        table.push(vec![float(e.a.re), float(e.a.im), cell(e.singular_mass), verdict_name(e.verdict).into()]);
    }
    let code = if entries.iter().any(|e| e.verdict == Verdict::Inconclusive) { 3 } else { 0 };
    Ok(Outcome { report: json!({ "entries": entries }), table, code })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Blaschke => "blaschke",
        Verdict::NotBlaschke => "not_blaschke",
        Verdict::Inconclusive => "inconclusive",
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Theorem1Args {
    /// Largest degree of the outer factor.
    #[arg(long, default_value_t = 3)]
    pub deg_b: usize,
    /// Largest degree of the inner factor.
    #[arg(long, default_value_t = 3)]
    pub deg_c: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long)]
    pub grid_rings: Option<String>,
    #[arg(long, default_value_t = 1e-7)]
    pub tol_cert: f64,
}

fn check_degree(name: &str, deg: usize) -> Result<(), CliError> {
    if deg == 0 {
        return Err(CliError::Usage(format!("{name} must be at least 1")));
    }
    Ok(())
}

pub fn theorem1(args: &Theorem1Args, seed: u64) -> Result<Outcome, CliError> {
    check_tol("--tol-cert", args.tol_cert)?;
    check_degree("--deg-b", args.deg_b)?;
    check_degree("--deg-c", args.deg_c)?;
    let fixed_grid = args.grid_rings.as_deref().map(parse_rings).transpose()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Table::new(&["trial", "deg_b", "deg_c", "verdict", "m1_max", "m2_residual"]);
    let mut trials = Vec::new();
    let mut code = 0;
    for trial in 0..args.trials {
        let (deg_b, deg_c) = (rng.random_range(1..=args.deg_b), rng.random_range(1..=args.deg_c));
        let b = random_finite(&mut rng, deg_b, RANDOM_RADIUS);
        let c = random_finite(&mut rng, deg_c, RANDOM_RADIUS);
        let a = b.compose(&c)?;
        let grid = fixed_grid.clone().unwrap_or_else(|| default_grid(a.value(ZERO)));
        let cert = certify_indestructible(&a, &grid, args.tol_cert)?;
        code = code.max(verdict_code(cert.verdict));
        let verdict = report(&cert.verdict);
        table.push(vec![
            trial.to_string(),
            b.degree().to_string(),
            c.degree().to_string(),
            verdict.as_str().unwrap_or_default().to_string(),
            cell(cert.m1_max),
            cell(cert.m2_residual),
        ]);
        trials.push(json!({
            "b": b,
            "c": c,
            "verdict": verdict,
            "m1_max": cert.m1_max,
            "m2_residual": cert.m2_residual,
        }));
    }
    let stat = |key: &str| trials.iter().filter_map(|t| t[key].as_f64()).fold(0.0, f64::max);
    let summary = json!({
        "trials": args.trials,
        "certified": trials.iter().filter(|t| t["verdict"] == "certified").count(),
        "max_m1": stat("m1_max"),
        "max_m2": stat("m2_residual"),
    });
    Ok(Outcome { report: json!({ "summary": summary, "trials": trials }), table, code })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum CaseKind {
    #[value(name = "I")]
    I,
    #[value(name = "IIa")]
    IIa,
    #[value(name = "IIb")]
    IIb,
}

#[derive(Debug, Args, Serialize)]
pub struct CaseArgs {
    #[arg(value_enum)]
    pub case: CaseKind,
    /// Outer factor; random trials are run when `--b`/`--c` are absent.
    #[arg(long, requires = "c")]
    pub b: Option<PathBuf>,
    #[arg(long, requires = "b")]
    pub c: Option<PathBuf>,
    /// Target point for case I (random if absent).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub deg_b: usize,
    #[arg(long, default_value_t = 3)]
    pub deg_c: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Residual above which an identity counts as violated.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

fn run_case(kind: CaseKind, b: &FiniteBlaschke, c: &FiniteBlaschke, a: C64) -> blaschke::Result<CaseReport> {
    match kind {
        CaseKind::I => preimage_decomposition_check(b, c, a),
        CaseKind::IIa => case2a_check(b, c),
        CaseKind::IIb => case2b_check(b, c),
    }
}

pub fn case_check(args: &CaseArgs, seed: u64) -> Result<Outcome, CliError> {
    check_tol("--tol", args.tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fixed_a = args.a.as_deref().map(parse_complex).transpose()?;
    let mut instances = Vec::new();
    match (&args.b, &args.c) {
        (Some(b), Some(c)) => {
            let a = fixed_a.unwrap_or_else(|| random_disk_point(&mut rng, 0.9));
            instances.push((read_finite(b)?, read_finite(c)?, a));
        }
        _ => {
            check_degree("--deg-b", args.deg_b)?;
            check_degree("--deg-c", args.deg_c)?;
            for _ in 0..args.trials {
                let (deg_b, deg_c) = (rng.random_range(1..=args.deg_b), rng.random_range(1..=args.deg_c));
                let b = random_finite(&mut rng, deg_b, RANDOM_RADIUS);
                let c = if args.case == CaseKind::IIb {
                    let mut zeros = random_finite(&mut rng, deg_c, RANDOM_RADIUS).zeros().to_vec();
                    zeros[0] = ZERO;
                    FiniteBlaschke::from_zeros(zeros)?
                } else {
                    random_finite(&mut rng, deg_c, RANDOM_RADIUS)
                };
                let a = fixed_a.unwrap_or_else(|| random_disk_point(&mut rng, 0.9));
                instances.push((b, c, a));
            }
        }
    }
    let mut table = Table::new(&["case_tag", "deg_b", "deg_c", "residual", "matching_distance"]);
    let mut reports = Vec::new();
    let mut code = 0u8;
    let tag = report(&args.case);
    for (b, c, a) in &instances {
        let (row_residual, row_distance) = match run_case(args.case, b, c, *a) {
            Ok(r) => {
                let violated = !(r.residual < args.tol) || r.matching_distance.is_some_and(|d| !(d < args.tol));
                if violated {
                    code = code.max(4);
                }
                let cells = (cell(r.residual), r.matching_distance.map_or(String::new(), cell));
                reports.push(report(&r));
                cells
            }
            Err(e) => {
                code = code.max(CliError::from(e.clone()).exit_code() as u8);
                reports.push(json!({ "case_tag": tag, "error": e.to_string(), "b": b, "c": c, "a": pair(*a) }));
                (String::new(), String::new())
            }
        };
        table.push(vec![
            tag.as_str().unwrap_or_default().to_string(),
            b.degree().to_string(),
            c.degree().to_string(),
            row_residual,
            row_distance,
        ]);
    }
    Ok(Outcome { report: json!({ "reports": reports }), table, code })
}

#[derive(Debug, Args, Serialize)]
pub struct CriteriaArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value = "0.5,0.9,0.99,0.999")]
    pub r_schedule: String,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_quad: f64,
}

pub fn criteria(args: &CriteriaArgs) -> Result<Outcome, CliError> {
    check_tol("--tol-quad", args.tol_quad)?;
    let model = ModelSpec::read(&args.model)?.to_inner();
    let schedule = parse_schedule(&args.r_schedule)?;
    let result = criteria_report(&model, &schedule, args.tol_quad)?;
    let mut table = Table::new(&["r", "integral", "err_estimate"]);
    for ((r, i), e) in result.r_schedule.iter().zip(&result.integrals).zip(&result.err_estimates) {
        table.push(vec![float(*r), cell(*i), cell(*e)]);
    }
    let code = if result.verdict == Verdict::Inconclusive { 3 } else { 0 };
    Ok(Outcome { report: report(&result), table, code })
}

#[derive(Debug, Args, Serialize)]
pub struct MaximalArgs {
    /// JSON file `{"points": [[re, im], ...]}`.
    #[arg(long)]
    pub critical_set: PathBuf,
    /// Pseudo-hyperbolic tolerance on the critical-point match.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
}

pub fn maximal(args: &MaximalArgs) -> Result<Outcome, CliError> {
    check_tol("--tol", args.tol)?;
    let path = &args.critical_set;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let set: CriticalSet =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let f = solve_maximal(&set, args.tol)?;
    let verification = verify_maximal(&f, &set, args.tol);
    let mut table = Table::new(&["zero_re", "zero_im"]);
    for z in f.zeros() {
        table.push(vec![float(z.re), float(z.im)]);
    }
    let code = if verification.passed { 0 } else { 4 };
    let model = ModelSpec::Finite(f);
    Ok(Outcome { report: json!({ "model": model, "verification": verification }), table, code })
}
