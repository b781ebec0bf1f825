//! Finite Blaschke products `eta * prod_j beta_{a_j}(z)` with
//! `beta_a(z) = (-conj(a)/|a|) (z - a) / (1 - conj(a) z)` and `beta_0(z) = z`.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::disk::{check_closed_disk, check_unimodular, rho, MoebiusMap};
use crate::{poly, series, Error, Result, C64};

/// Coefficients with modulus at or below this are treated as zero when
/// resolving the order of `B - B(0)` at the origin.
pub const SERIES_TOL: f64 = 1e-11;
/// Maximum admissible `|B(xi) - a|` after refinement.
pub const PREIMAGE_RESIDUAL_TOL: f64 = 1e-9;
/// Refined roots with modulus `>= 1 - ESCAPE_MARGIN` signal breakdown.
pub const ESCAPE_MARGIN: f64 = 1e-10;
/// Pseudo-hyperbolic radius under which refined roots are one cluster.
pub const CLUSTER_RADIUS: f64 = 1e-7;
/// Tolerance for the grid check after composition and Frostman shifts.
pub const COMPOSE_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const PROBE_CANDIDATES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFinite")]
pub struct FiniteBlaschke {
    #[serde(with = "crate::serde_complex")]
    eta: C64,
    #[serde(with = "crate::serde_complex::vec")]
    zeros: Vec<C64>,
}

#[derive(Deserialize)]
struct RawFinite {
    #[serde(with = "crate::serde_complex")]
    eta: C64,
    #[serde(with = "crate::serde_complex::vec")]
    zeros: Vec<C64>,
}

impl TryFrom<RawFinite> for FiniteBlaschke {
    type Error = Error;

    fn try_from(raw: RawFinite) -> Result<Self> {
        FiniteBlaschke::new(raw.eta, raw.zeros)
    }
}

/// Solutions of `B(z) = target` counted with multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageSet {
    #[serde(with = "crate::serde_complex")]
    pub target: C64,
    #[serde(with = "crate::serde_complex::vec")]
    pub points: Vec<C64>,
    pub residuals: Vec<f64>,
}

impl PreimageSet {
    /// Product of the moduli of all points.
    pub fn modulus_product(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).product()
    }

    /// Groups points within `CLUSTER_RADIUS` into `(center, multiplicity)`.
    pub fn clusters(&self) -> Vec<(C64, usize)> {
        cluster(&self.points)
    }
}

fn cluster(points: &[C64]) -> Vec<(C64, usize)> {
    let mut out: Vec<(C64, usize)> = Vec::new();
    for &p in points {
        match out.iter_mut().find(|(c, _)| rho(*c, p) < CLUSTER_RADIUS) {
            Some((c, m)) => {
                *c = (*c * *m as f64 + p) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => out.push((p, 1)),
        }
    }
    out
}

#[inline]
fn unit_factor(a: C64) -> C64 {
    if a == ZERO {
        ONE
    } else {
        -a.conj() / a.norm()
    }
}

impl FiniteBlaschke {
    pub fn new(eta: C64, zeros: Vec<C64>) -> Result<Self> {
        check_unimodular(eta)?;
        if zeros.is_empty() {
            return Err(Error::InvalidParameter("a finite Blaschke product needs at least one zero".into()));
        }
        if let Some(z) = zeros.iter().find(|z| !(z.norm() < 1.0)) {
            return Err(Error::Domain(format!("zero {z} is not interior")));
        }
        Ok(Self { eta: eta / eta.norm(), zeros })
    }

    pub fn from_zeros(zeros: Vec<C64>) -> Result<Self> {
        Self::new(ONE, zeros)
    }

    /// `B(z) = z`.
    pub fn identity() -> Self {
        Self { eta: ONE, zeros: vec![ZERO] }
    }

    /// `B(z) = z^k`, `k >= 1`.
    pub fn monomial(k: usize) -> Result<Self> {
        Self::new(ONE, vec![ZERO; k])
    }

    /// The automorphism `T` viewed as a degree-one product.
    pub fn from_moebius(t: &MoebiusMap) -> Self {
        let a = t.a();
        let eta = t.eta() / unit_factor(a);
        Self { eta: eta / eta.norm(), zeros: vec![a] }
    }

    pub fn eta(&self) -> C64 {
        self.eta
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// Same unimodular constant and same zero multiset.
    pub fn multiset_eq(&self, other: &FiniteBlaschke, tol: f64) -> bool {
        (self.eta - other.eta).norm() <= tol && crate::matching::multiset_distance(&self.zeros, &other.zeros) <= tol
    }

    pub fn evaluate(&self, z: C64) -> Result<C64> {
        check_closed_disk(z)?;
        Ok(self.value(z))
    }

    /// Evaluation without the domain check.
    pub fn value(&self, z: C64) -> C64 {
        self.zeros.iter().fold(self.eta, |acc, &a| {
            if a == ZERO {
                acc * z
            } else {
                acc * unit_factor(a) * (z - a) / (1.0 - a.conj() * z)
            }
        })
    }

    /// `(B, B', B'')` at `z` by forward accumulation over the factors.
    pub fn value_with_derivatives(&self, z: C64) -> (C64, C64, C64) {
        let (mut v, mut d, mut s) = (self.eta, ZERO, ZERO);
        for &a in &self.zeros {
            let c = unit_factor(a);
            let den = 1.0 - a.conj() * z;
            let w = 1.0 - a.norm_sqr();
            let f = c * (z - a) / den;
            let f1 = c * w / (den * den);
            let f2 = 2.0 * c * a.conj() * w / (den * den * den);
            s = s * f + 2.0 * d * f1 + v * f2;
            d = d * f + v * f1;
            v *= f;
        }
        (v, d, s)
    }

    /// Maclaurin coefficients `b_0, ..., b_count`.
    pub fn taylor_coeffs(&self, count: usize) -> Vec<C64> {
        self.taylor_coeffs_at(ZERO, count)
    }

    /// Taylor coefficients of `h -> B(center + h)` up to `h^count`.
    pub fn taylor_coeffs_at(&self, center: C64, count: usize) -> Vec<C64> {
        let len = count + 1;
        let mut acc = vec![ZERO; len];
        acc[0] = self.eta;
        for &a in &self.zeros {
            let c = unit_factor(a);
            let num = [c * (center - a), c];
            let den = series::inverse(&[1.0 - a.conj() * center, -a.conj()], len);
            acc = series::mul(&acc, &series::mul(&num, &den, len), len);
        }
        acc
    }

    /// Smallest `n >= 1` with `|b_n| > SERIES_TOL`, and `b_n`.
    pub fn first_nonconstant_index(&self) -> Result<(usize, C64)> {
        let max_index = 2 * self.degree();
        let coeffs = self.taylor_coeffs(max_index);
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, b)| b.norm() > SERIES_TOL)
            .map(|(n, b)| (n, *b))
            .ok_or(Error::SeriesResolution { max_index })
    }

    /// `eta prod c_j (z - a_j) - target prod (1 - conj(a_j) z)`, whose roots
    /// are the solutions of `B(z) = target`.
    pub fn cleared_polynomial(&self, target: C64) -> Vec<C64> {
        let mut num = vec![self.eta];
        let mut den = vec![ONE];
        for &a in &self.zeros {
            let c = unit_factor(a);
            num = poly::mul(&num, &[-c * a, c]);
            den = poly::mul(&den, &[ONE, -a.conj()]);
        }
        poly::sub(&num, &poly::scale(&den, target))
    }

    /// All `deg(B)` solutions of `B(z) = a` in the disk, with multiplicity.
    pub fn preimages(&self, a: C64) -> Result<PreimageSet> {
        if !(a.norm() < 1.0) {
            return Err(Error::Domain(format!("target {a} is not interior")));
        }
        if a == ZERO {
            return Ok(PreimageSet { target: a, points: self.zeros.clone(), residuals: vec![0.0; self.degree()] });
        }
        let origin_order = if a == self.value(ZERO) { self.first_nonconstant_index()?.0 } else { 0 };
        self.level_set(a, origin_order)
    }

    fn level_set(&self, a: C64, origin_order: usize) -> Result<PreimageSet> {
        let mut cleared = self.cleared_polynomial(a);
        for c in cleared.iter_mut().take(origin_order) {
            *c = ZERO;
        }
        let start = poly::roots(&cleared);
        let fixed: Vec<bool> = start.iter().map(|z| *z == ZERO).collect();
        // Re-run Aberth with the Newton ratio taken from the factored form,
        // which stays accurate when zeros crowd the boundary.
        let raw = poly::aberth_refine(start, &fixed, |z| {
            let (v, d, _) = self.value_with_derivatives(z);
            let poles: C64 = self.zeros.iter().map(|w| w.conj() / (ONE - w.conj() * z)).sum();
            (d / (v - a) - poles).inv()
        });
        let refined: Vec<C64> = (0..raw.len())
            .map(|k| {
                if raw[k] == ZERO {
                    ZERO
                } else {
                    newton_polish(raw[k], &raw, k, |z| {
                        let (v, d, _) = self.value_with_derivatives(z);
                        (v - a, d)
                    })
                }
            })
            .collect();
        let points = merge_clusters(refined);
        if points.len() != self.degree() {
            return Err(Error::Convergence { residual: f64::INFINITY });
        }
        check_escape(&points)?;
        let residuals: Vec<f64> = points.iter().map(|&z| (self.value(z) - a).norm()).collect();
        if let Some(&worst) = residuals.iter().find(|r| !(**r < PREIMAGE_RESIDUAL_TOL)) {
            return Err(Error::Convergence { residual: worst });
        }
        Ok(PreimageSet { target: a, points, residuals })
    }

    /// The `deg(B) - 1` critical points in the disk, with multiplicity.
    pub fn critical_points(&self) -> Result<Vec<C64>> {
        let n = self.degree();
        if n < 2 {
            return Ok(Vec::new());
        }
        let mut p = vec![ONE];
        let mut q = vec![ONE];
        for &a in &self.zeros {
            let c = unit_factor(a);
            p = poly::mul(&p, &[-c * a, c]);
            q = poly::mul(&q, &[ONE, -a.conj()]);
        }
        let at_origin = self.zeros.iter().filter(|a| **a == ZERO).count();
        // The z^{2N-1} terms of P'Q and PQ' cancel when no zero sits at 0.
        let degree = if at_origin == 0 { 2 * n - 2 } else { 2 * n - 1 - at_origin };
        let mut w = poly::sub(&poly::mul(&poly::derivative(&p), &q), &poly::mul(&p, &poly::derivative(&q)));
        w.truncate(degree + 1);
        let mut raw = poly::roots(&w);
        raw.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
        if raw.len() < n - 1 {
            return Err(Error::Convergence { residual: f64::INFINITY });
        }
        if let Some(next) = raw.get(n - 1) {
            if next.norm() < 1.0 {
                return Err(Error::RootEscape { modulus: next.norm() });
            }
        }
        let inside = &raw[..n - 1];
        let refined: Vec<C64> = (0..inside.len())
            .map(|k| {
                if inside[k] == ZERO {
                    ZERO
                } else {
                    newton_polish(inside[k], inside, k, |z| {
                        let (_, d, s) = self.value_with_derivatives(z);
                        (d, s)
                    })
                }
            })
            .collect();
        let points = merge_clusters(refined);
        check_escape(&points)?;
        Ok(points)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &FiniteBlaschke) -> Result<FiniteBlaschke> {
        let mut cache: HashMap<(u64, u64), Vec<C64>> = HashMap::new();
        let mut zeros = Vec::with_capacity(self.degree() * inner.degree());
        for &a in &self.zeros {
            let key = (a.re.to_bits(), a.im.to_bits());
            if let Entry::Vacant(slot) = cache.entry(key) {
                slot.insert(inner.preimages(a)?.points);
            }
            zeros.extend_from_slice(&cache[&key]);
        }
        fit_eta(zeros, |z| self.value(inner.value(z)))
    }

    /// `T ∘ self` for a disk automorphism `T`.
    pub fn post_compose(&self, t: &MoebiusMap) -> Result<FiniteBlaschke> {
        let zeros = self.preimages(t.a())?.points;
        fit_eta(zeros, |z| t.apply_unchecked(self.value(z)))
    }

    /// The Frostman shift `(B - a) / (1 - conj(a) B)`.
    pub fn frostman_shift(&self, a: C64) -> Result<FiniteBlaschke> {
        self.post_compose(&MoebiusMap::frostman(a)?)
    }

    /// Nonzero solutions of `B(z) = B(0)`, with multiplicity.
    pub fn nonzero_level_points(&self) -> Result<Vec<C64>> {
        let b0 = self.value(ZERO);
        let set = self.preimages(b0)?;
        Ok(set.points.into_iter().filter(|z| z.norm() >= 1e-9).collect())
    }
}

/// Newton's method started at `roots[k]`, accepting only residual-decreasing
/// steps that stay well inside the gap to the other root estimates.
fn newton_polish(start: C64, roots: &[C64], k: usize, f: impl Fn(C64) -> (C64, C64)) -> C64 {
    let gap = roots
        .iter()
        .enumerate()
        .filter(|&(j, r)| j != k && *r != start)
        .map(|(_, r)| (*r - start).norm())
        .fold(f64::INFINITY, f64::min);
    let mut z = start;
    let (mut fz, mut dz) = f(z);
    for _ in 0..30 {
        if dz == ZERO || fz == ZERO {
            break;
        }
        let step = fz / dz;
        if !step.is_finite() || step.norm() > 0.5 * gap {
            break;
        }
        let cand = z - step;
        let (fc, dc) = f(cand);
        if fc.norm() >= fz.norm() {
            break;
        }
        z = cand;
        fz = fc;
        dz = dc;
        if step.norm() <= f64::EPSILON * z.norm().max(1e-300) {
            break;
        }
    }
    z
}

fn merge_clusters(points: Vec<C64>) -> Vec<C64> {
    let inside: Vec<C64> = points.iter().copied().filter(|z| z.norm() < 1.0).collect();
    if inside.len() != points.len() {
        return points;
    }
    cluster(&points).into_iter().flat_map(|(c, m)| std::iter::repeat_n(c, m)).collect()
}

fn check_escape(points: &[C64]) -> Result<()> {
    match points.iter().map(|z| z.norm()).find(|m| !(*m < 1.0 - ESCAPE_MARGIN)) {
        Some(modulus) => Err(Error::RootEscape { modulus }),
        None => Ok(()),
    }
}

/// Builds the product with the given zeros whose unimodular constant makes
/// it agree with `target` at a probe point, then checks agreement on a grid.
fn fit_eta(zeros: Vec<C64>, target: impl Fn(C64) -> C64) -> Result<FiniteBlaschke> {
    let unit = FiniteBlaschke { eta: ONE, zeros };
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let eta = (0..PROBE_CANDIDATES)
        .map(|k| C64::from_polar(0.2 + 0.04 * k as f64, golden * k as f64 + 0.3))
        .find_map(|z0| {
            let (want, have) = (target(z0), unit.value(z0));
            (want.norm() > 1e-6 && have.norm() > 1e-6).then(|| want / have)
        })
        .ok_or(Error::Probe { candidates: PROBE_CANDIDATES })?;
    let result = FiniteBlaschke { eta: eta / eta.norm(), zeros: unit.zeros };
    let worst = (0..64)
        .map(|k| C64::from_polar(0.15 + 0.2 * (k % 4) as f64, std::f64::consts::TAU * (k / 4) as f64 / 16.0))
        .map(|z| (result.value(z) - target(z)).norm())
        .fold(0.0, f64::max);
    if !(worst <= COMPOSE_TOL) {
        return Err(Error::Convergence { residual: worst });
    }
    Ok(result)
}
