//! Maximal Blaschke products with a prescribed finite critical set.
//!
//! For a critical multiset `C` with `N` copies of the origin and nonzero
//! points `c_1..c_m`, the maximal product is
//! `F(z) = z^(N+1) prod_j beta_{w_j}(z)`, normalized by `F(0) = 0` and
//! `F^(N+1)(0) > 0`. The `m` zeros `w_j` solve the critical-point equations
//!
//! ```text
//! (N+1) + sum_j c_k (1 - |w_j|^2) / ((c_k - w_j)(1 - conj(w_j) c_k)) = 0
//! ```
//!
//! which are followed from the scaled set `sC` at `s = 0` (where they reduce
//! to a polynomial problem) to `s = 1`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::disk::UnitDiskPoint;
use crate::indestructibility::{certify_indestructible, default_grid, CertificateReport, CERT_TOL};
use crate::matching::multiset_distance;
use crate::{poly, Error, FiniteBlaschke, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

const INITIAL_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-8;
const SPLIT: f64 = 1e-9;
const NEWTON_ITERS: usize = 12;
const POLISH_ITERS: usize = 50;

/// Stated in every report: `F(0) = 0` is a normalization choice.
pub const NORMALIZATION_NOTE: &str =
    "F(0) = 0 and F^(N+1)(0) > 0 are imposed as the normalization of the extremal function";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSet {
    pub points: Vec<UnitDiskPoint>,
}

impl CriticalSet {
    pub fn new(points: Vec<C64>) -> Result<Self> {
        Ok(Self { points: points.into_iter().map(UnitDiskPoint::new).collect::<Result<_>>()? })
    }

    pub fn values(&self) -> Vec<C64> {
        self.points.iter().map(|p| p.value()).collect()
    }

    /// Multiplicity of the origin.
    pub fn origin_order(&self) -> usize {
        self.points.iter().filter(|p| p.value() == ZERO).count()
    }
}

/// Nonzero critical points with repeated entries split apart.
fn separated(points: &[C64]) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(points.len());
    for &p in points {
        let copies = out.iter().filter(|q| (**q - p).norm() <= 2.0 * SPLIT).count();
        if copies == 0 {
            out.push(p);
        } else {
            out.push(p + C64::from_polar(SPLIT, 2.0 * copies as f64 + 0.5));
        }
    }
    out
}

/// Residuals `E_k` of the scaled critical-point equations.
fn residuals(c: &[C64], omega: &[C64], order: f64, s: f64) -> Vec<C64> {
    let s2 = s * s;
    c.iter()
        .map(|&ck| {
            omega.iter().fold(C64::new(order, 0.0), |acc, &w| {
                acc + ck * (1.0 - s2 * w.norm_sqr()) / ((ck - w) * (ONE - s2 * w.conj() * ck))
            })
        })
        .collect()
}

fn residual_norm(e: &[C64]) -> f64 {
    e.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// One Newton step on the real 2m x 2m system.
fn newton_step(c: &[C64], omega: &[C64], order: f64, s: f64) -> Option<Vec<C64>> {
    let m = omega.len();
    let s2 = s * s;
    let e = residuals(c, omega, order, s);
    let mut jac = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for (k, &ck) in c.iter().enumerate() {
        for (j, &w) in omega.iter().enumerate() {
            let d1 = ck - w;
            let d2 = ONE - s2 * w.conj() * ck;
            let u = 1.0 - s2 * w.norm_sqr();
            let da = ck * (-s2 * w.conj() * d1 + u) / (d1 * d1 * d2);
            let db = s2 * ck / (d2 * d2);
            let (p, q) = (da + db, da - db);
            jac[(2 * k, 2 * j)] = p.re;
            jac[(2 * k, 2 * j + 1)] = -q.im;
            jac[(2 * k + 1, 2 * j)] = p.im;
            jac[(2 * k + 1, 2 * j + 1)] = q.re;
        }
    }
    let rhs = DVector::from_iterator(2 * m, e.iter().flat_map(|v| [-v.re, -v.im]));
    let delta = jac.lu().solve(&rhs)?;
    Some((0..m).map(|j| C64::new(delta[2 * j], delta[2 * j + 1])).collect())
}

/// Newton iteration at fixed `s`; `None` if it fails to converge or leaves
/// the disk.
fn correct(c: &[C64], start: Vec<C64>, order: f64, s: f64, iters: usize) -> Option<(Vec<C64>, usize)> {
    let scale = order + c.len() as f64;
    let mut omega = start;
    let mut last = residual_norm(&residuals(c, &omega, order, s));
    for it in 0..iters {
        let delta = newton_step(c, &omega, order, s)?;
        let next: Vec<C64> = omega.iter().zip(&delta).map(|(w, d)| w + d).collect();
        if next.iter().any(|w| !w.is_finite() || !((s * w).norm() < 1.0)) {
            return None;
        }
        let size = delta.iter().map(|d| d.norm()).fold(0.0, f64::max);
        let res = residual_norm(&residuals(c, &next, order, s));
        if it > 2 && res > 2.0 * last {
            return None;
        }
        omega = next;
        last = res;
        let tiny = omega.iter().map(|w| w.norm()).fold(1.0, f64::max) * 1e-14;
        if size <= tiny || res <= 1e-14 * scale {
            return Some((omega, it + 1));
        }
    }
    (last <= 1e-10 * scale).then_some((omega, iters))
}

/// Zeros of `F` in the scaled variables at `s = 0`.
fn initial_zeros(c: &[C64], order: usize) -> Vec<C64> {
    let q = poly::from_roots(c);
    let p: Vec<C64> = q.iter().enumerate().map(|(m, qm)| qm / (m + order + 1) as f64).collect();
    poly::roots(&p)
}

/// The maximal product for `set`, checked against `set` at `tol`.
pub fn solve_maximal(set: &CriticalSet, tol: f64) -> Result<FiniteBlaschke> {
    let order = set.origin_order();
    let values = set.values();
    let nonzero: Vec<C64> = values.iter().copied().filter(|p| *p != ZERO).collect();
    let mut zeros = vec![ZERO; order + 1];
    if nonzero.is_empty() {
        return FiniteBlaschke::new(ONE, zeros);
    }
    let c = separated(&nonzero);
    let n1 = (order + 1) as f64;

    let mut omega = initial_zeros(&c, order);
    let mut prev: Option<(f64, Vec<C64>)> = None;
    let mut s = 0.0;
    let mut h = INITIAL_STEP;
    while s < 1.0 {
        let target = (s + h).min(1.0);
        let guess: Vec<C64> = match &prev {
            Some((sp, wp)) if s > *sp => {
                let t = (target - s) / (s - sp);
                omega.iter().zip(wp).map(|(w, p)| w + (w - p) * t).collect()
            }
            _ => omega.clone(),
        };
        match correct(&c, guess, n1, target, NEWTON_ITERS) {
            Some((next, iters)) => {
                prev = Some((s, std::mem::replace(&mut omega, next)));
                s = target;
                if iters <= 4 {
                    h = (2.0 * h).min(INITIAL_STEP);
                }
            }
            None => {
                h *= 0.5;
                if h < MIN_STEP {
                    return Err(Error::ContinuationStall { s });
                }
            }
        }
    }
    let omega = correct(&c, omega.clone(), n1, 1.0, POLISH_ITERS).map_or(omega, |(w, _)| w);
    zeros.extend(omega);
    let f = FiniteBlaschke::new(ONE, zeros)?;
    let distance = multiset_distance(&f.critical_points()?, &values);
    if !(distance <= tol) {
        return Err(Error::CriticalMismatch { distance, tol });
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalReport {
    pub degree: usize,
    pub degree_ok: bool,
    pub critical_distance: f64,
    pub critical_ok: bool,
    pub origin_modulus: f64,
    pub origin_ok: bool,
    /// `|Im / Re|` of `F^(N+1)(0)`, infinite if the real part is not positive.
    pub normalization: f64,
    pub normalization_ok: bool,
    pub certificate: Option<CertificateReport>,
    pub failures: Vec<String>,
    pub passed: bool,
    pub assumption: String,
}

/// Degree, critical set, normalization and indestructibility checks of `f`
/// against `set`.
pub fn verify_maximal(f: &FiniteBlaschke, set: &CriticalSet, tol: f64) -> MaximalReport {
    let mut failures = Vec::new();
    let values = set.values();
    let degree_ok = f.degree() == values.len() + 1;
    if !degree_ok {
        failures.push(format!("degree {} is not {}", f.degree(), values.len() + 1));
    }
    let critical_distance = match f.critical_points() {
        Ok(cp) => multiset_distance(&cp, &values),
        Err(e) => {
            failures.push(format!("critical points: {e}"));
            f64::INFINITY
        }
    };
    let critical_ok = critical_distance < tol;
    if !critical_ok {
        failures.push(Error::CriticalMismatch { distance: critical_distance, tol }.to_string());
    }
    let origin_modulus = f.value(ZERO).norm();
    let origin_ok = origin_modulus < 1e-10;
    if !origin_ok {
        failures.push(format!("|F(0)| = {origin_modulus:e}"));
    }
    let n = set.origin_order() + 1;
    let lead = f.taylor_coeffs(n)[n];
    let normalization = if lead.re > 0.0 { (lead.im / lead.re).abs() } else { f64::INFINITY };
    let normalization_ok = normalization < 1e-8;
    if !normalization_ok {
        failures.push(format!("coefficient {n} is {lead}"));
    }
    let certificate = match certify_indestructible(f, &default_grid(f.value(ZERO)), CERT_TOL) {
        Ok(report) => Some(report),
        Err(e) => {
            failures.push(format!("certificate: {e}"));
            None
        }
    };
    MaximalReport {
        degree: f.degree(),
        degree_ok,
        critical_distance,
        critical_ok,
        origin_modulus,
        origin_ok,
        normalization,
        normalization_ok,
        certificate,
        passed: failures.is_empty(),
        failures,
        assumption: NORMALIZATION_NOTE.to_string(),
    }
}
