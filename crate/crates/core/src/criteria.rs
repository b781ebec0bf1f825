//! Criteria distinguishing Blaschke products among inner functions: the
//! radial log-integral `I(r) = int_0^{2pi} log|f(r e^{it})| dt`, its limit as
//! `r -> 1`, and the least harmonic majorant of `log|f|`.

use std::cell::RefCell;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disk::{BoundaryPoint, MoebiusMap};
use crate::infinite::{max_factors, LogModulus};
use crate::quadrature::{integrate, Quadrature};
use crate::{Error, FiniteBlaschke, Result, TruncatedBlaschke, C64};

/// Zeros closer than this (in modulus) to the integration circle get graded
/// breakpoints.
const PROXIMITY: f64 = 0.1;
/// Truncated factors contribute at most this many zeros as breakpoint seeds.
const MAX_SEEDED_ZEROS: usize = 64;

/// Singular inner function `exp(-mass (atom + z) / (atom - z))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAtomic")]
pub struct AtomicSingular {
    mass: f64,
    atom: BoundaryPoint,
}

#[derive(Deserialize)]
struct RawAtomic {
    mass: f64,
    atom: BoundaryPoint,
}

impl TryFrom<RawAtomic> for AtomicSingular {
    type Error = Error;

    fn try_from(raw: RawAtomic) -> Result<Self> {
        AtomicSingular::new(raw.mass, raw.atom)
    }
}

impl AtomicSingular {
    pub fn new(mass: f64, atom: BoundaryPoint) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("singular mass {mass} must be positive")));
        }
        Ok(Self { mass, atom })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn atom(&self) -> BoundaryPoint {
        self.atom
    }

    pub fn value(&self, z: C64) -> C64 {
        let zeta = self.atom.value();
        (-self.mass * (zeta + z) / (zeta - z)).exp()
    }

    pub fn log_modulus(&self, z: C64) -> f64 {
        -self.mass * (1.0 - z.norm_sqr()) / (self.atom.value() - z).norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Factor {
    Finite(FiniteBlaschke),
    Sequence(TruncatedBlaschke),
    Singular(AtomicSingular),
}

/// A point where `log|f|` is singular (a zero) or sharply peaked (an atom of
/// the singular measure, or the accumulation direction of zeros).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature {
    pub modulus: f64,
    pub angle: f64,
}

impl Feature {
    fn at(z: C64) -> Self {
        Self { modulus: z.norm(), angle: z.arg() }
    }
}

/// An inner function that can be sampled inside the disk.
pub trait InnerFunction: Sync {
    /// `f(z)`; `tol` bounds the log-modulus error of truncated factors.
    fn value(&self, z: C64, tol: f64) -> Result<C64>;
    /// `log|f(z)|`, `-inf` at zeros.
    fn log_modulus(&self, z: C64, tol: f64) -> Result<f64>;
    fn features(&self) -> Vec<Feature>;
}

/// `post(prod factors)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerModel {
    factors: Vec<Factor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    post: Option<MoebiusMap>,
}

impl InnerModel {
    pub fn new(factors: Vec<Factor>, post: Option<MoebiusMap>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("an inner model needs at least one factor".into()));
        }
        Ok(Self { factors, post })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn post(&self) -> Option<&MoebiusMap> {
        self.post.as_ref()
    }

    /// `t ∘ self`.
    pub fn post_composed(&self, t: &MoebiusMap) -> Self {
        let post = match &self.post {
            Some(existing) => t.compose(existing),
            None => *t,
        };
        let trivial = post.a().norm() < 1e-15 && (post.eta() - 1.0).norm() < 1e-15;
        Self { factors: self.factors.clone(), post: (!trivial).then_some(post) }
    }

    /// `self * other` (requires `other` to have no post map).
    pub fn times(&self, other: impl Into<Factor>) -> Result<Self> {
        if self.post.is_some() {
            return Err(Error::InvalidParameter("cannot multiply a post-composed model".into()));
        }
        let mut factors = self.factors.clone();
        factors.push(other.into());
        Ok(Self { factors, post: None })
    }

    /// Total mass of the atomic singular factors.
    pub fn atomic_mass(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| match f {
                Factor::Singular(s) => s.mass(),
                _ => 0.0,
            })
            .sum()
    }

    fn inner_value(&self, z: C64, tol: f64) -> Result<C64> {
        let mut acc = C64::new(1.0, 0.0);
        for factor in &self.factors {
            acc *= match factor {
                Factor::Finite(b) => b.value(z),
                Factor::Sequence(t) => t.evaluate_at_level(z, t.level_for(z, tol, max_factors())?),
                Factor::Singular(s) => s.value(z),
            };
        }
        Ok(acc)
    }

    fn product_of_finite(&self) -> Option<FiniteBlaschke> {
        let mut eta = C64::new(1.0, 0.0);
        let mut zeros = Vec::new();
        for factor in &self.factors {
            match factor {
                Factor::Finite(b) => {
                    eta *= b.eta();
                    zeros.extend_from_slice(b.zeros());
                }
                _ => return None,
            }
        }
        FiniteBlaschke::new(eta, zeros).ok()
    }
}

impl From<FiniteBlaschke> for Factor {
    fn from(b: FiniteBlaschke) -> Self {
        Factor::Finite(b)
    }
}

impl From<TruncatedBlaschke> for Factor {
    fn from(t: TruncatedBlaschke) -> Self {
        Factor::Sequence(t)
    }
}

impl From<AtomicSingular> for Factor {
    fn from(s: AtomicSingular) -> Self {
        Factor::Singular(s)
    }
}

impl<T: Into<Factor>> From<T> for InnerModel {
    fn from(f: T) -> Self {
        InnerModel { factors: vec![f.into()], post: None }
    }
}

impl InnerFunction for InnerModel {
    fn value(&self, z: C64, tol: f64) -> Result<C64> {
        let w = self.inner_value(z, tol)?;
        Ok(match &self.post {
            Some(t) => t.apply_unchecked(w),
            None => w,
        })
    }

    fn log_modulus(&self, z: C64, tol: f64) -> Result<f64> {
        if self.post.is_some() {
            return Ok(self.value(z, tol)?.norm().ln());
        }
        let share = tol / self.factors.len() as f64;
        let mut total = 0.0;
        for factor in &self.factors {
            total += match factor {
                Factor::Finite(b) => b.value(z).norm().ln(),
                Factor::Sequence(t) => match t.log_modulus(z, share)? {
                    LogModulus::Finite { value, .. } => value,
                    LogModulus::AtZero { .. } => f64::NEG_INFINITY,
                },
                Factor::Singular(s) => s.log_modulus(z),
            };
        }
        Ok(total)
    }

    fn features(&self) -> Vec<Feature> {
        let mut out = Vec::new();
        for factor in &self.factors {
            match factor {
                Factor::Singular(s) => out.push(Feature::at(s.atom().value())),
                Factor::Sequence(t) => {
                    if self.post.is_none() {
                        out.extend(t.zeros(t.level().min(MAX_SEEDED_ZEROS)).into_iter().map(Feature::at));
                    }
                    if let Some(direction) = t.rule().explicit_len().is_none().then(|| t.zeros(1)[0]) {
                        out.push(Feature { modulus: 1.0, angle: direction.arg() });
                    }
                }
                Factor::Finite(b) if self.post.is_none() => out.extend(b.zeros().iter().copied().map(Feature::at)),
                Factor::Finite(_) => {}
            }
        }
        if let (Some(t), Some(b)) = (&self.post, self.product_of_finite()) {
            if let Ok(set) = b.preimages(t.a()) {
                out.extend(set.points.into_iter().map(Feature::at));
            }
        }
        out
    }
}

/// `outer ∘ inner`.
pub struct Composite<'a> {
    pub outer: &'a InnerModel,
    pub inner: &'a dyn InnerFunction,
}

impl InnerFunction for Composite<'_> {
    fn value(&self, z: C64, tol: f64) -> Result<C64> {
        self.outer.value(self.inner.value(z, tol)?, tol)
    }

    fn log_modulus(&self, z: C64, tol: f64) -> Result<f64> {
        self.outer.log_modulus(self.inner.value(z, tol)?, tol)
    }

    fn features(&self) -> Vec<Feature> {
        self.inner.features()
    }
}

/// Panel boundaries graded geometrically toward features near the circle.
fn breakpoints(features: &[Feature], r: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for f in features {
        let distance = (f.modulus - r).abs();
        if distance >= PROXIMITY {
            continue;
        }
        let mut scale = if f.modulus >= 1.0 { 1.0 - r } else { distance.max(1e-12) };
        let theta = f.angle.rem_euclid(TAU);
        out.push(theta);
        while scale < 0.5 * PI {
            out.push((theta + scale).rem_euclid(TAU));
            out.push((theta - scale).rem_euclid(TAU));
            scale *= 2.0;
        }
    }
    out
}

fn weighted_integral(f: &dyn InnerFunction, r: f64, quad_tol: f64, weight: impl Fn(f64) -> f64) -> Result<Quadrature> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("radius {r} outside (0, 1)")));
    }
    // Pointwise truncation error times 2 pi stays a tenth of the target.
    let trunc_tol = quad_tol / (10.0 * TAU);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let q = integrate(
        |t| {
            let z = C64::from_polar(r, t);
            match f.log_modulus(z, trunc_tol) {
                Ok(v) => weight(t) * v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        TAU,
        &breakpoints(&f.features(), r),
        quad_tol,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    q
}

/// `I(r)` with its quadrature error estimate.
pub fn radial_log_integral_with_error(f: &dyn InnerFunction, r: f64, quad_tol: f64) -> Result<Quadrature> {
    weighted_integral(f, r, quad_tol, |_| 1.0)
}

/// `I(r) = int_0^{2pi} log|f(r e^{it})| dt` to absolute accuracy `quad_tol`.
pub fn radial_log_integral(f: &dyn InnerFunction, r: f64, quad_tol: f64) -> Result<f64> {
    radial_log_integral_with_error(f, r, quad_tol).map(|q| q.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Blaschke,
    NotBlaschke,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub r_schedule: Vec<f64>,
    pub integrals: Vec<f64>,
    pub err_estimates: Vec<f64>,
    pub limit_estimate: f64,
    pub singular_mass: f64,
    pub monotone: bool,
    pub stable: bool,
    pub verdict: Verdict,
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.len() < 3 {
        return Err(Error::Schedule(format!("need at least 3 radii, got {}", schedule.len())));
    }
    if schedule.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return Err(Error::Schedule("radii must lie in (0, 1)".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Schedule("radii must be strictly increasing".into()));
    }
    Ok(())
}

/// Linear extrapolation to `r = 1` in `u = -ln r` through two samples.
///
/// `I(r)` is affine in `ln r` once `r` exceeds every zero modulus of a finite
/// factor, so the two-term model is exact there.
fn extrapolate(r1: f64, v1: f64, r2: f64, v2: f64) -> f64 {
    let (u1, u2) = (-r1.ln(), -r2.ln());
    (u1 * v2 - u2 * v1) / (u1 - u2)
}

/// Evaluates `I(r)` on the schedule, checks monotonicity, extrapolates the
/// limit and classifies `f`.
pub fn criteria_report(f: &dyn InnerFunction, r_schedule: &[f64], quad_tol: f64) -> Result<CriteriaReport> {
    check_schedule(r_schedule)?;
    let quads: Vec<Quadrature> =
        r_schedule.par_iter().map(|&r| radial_log_integral_with_error(f, r, quad_tol)).collect::<Result<_>>()?;
    let integrals: Vec<f64> = quads.iter().map(|q| q.value).collect();
    let n = integrals.len();
    let monotone = integrals.windows(2).all(|w| w[1] >= w[0] - 2.0 * quad_tol);
    let limit_estimate = extrapolate(r_schedule[n - 2], integrals[n - 2], r_schedule[n - 1], integrals[n - 1]);
    let previous = extrapolate(r_schedule[n - 3], integrals[n - 3], r_schedule[n - 2], integrals[n - 2]);
    let threshold = 10.0 * quad_tol;
    let stable = (limit_estimate - previous).abs() <= 0.05 * limit_estimate.abs() + threshold;
    let verdict = if limit_estimate.abs() < threshold {
        Verdict::Blaschke
    } else if limit_estimate < -threshold && stable {
        Verdict::NotBlaschke
    } else {
        Verdict::Inconclusive
    };
    Ok(CriteriaReport {
        r_schedule: r_schedule.to_vec(),
        integrals,
        err_estimates: quads.iter().map(|q| q.err).collect(),
        limit_estimate,
        singular_mass: -limit_estimate / TAU,
        monotone,
        stable,
        verdict,
    })
}

/// Value at `z0` of the least harmonic majorant of `log|f|`: Poisson
/// integrals over the circles of the schedule, extrapolated to `r = 1`.
pub fn harmonic_majorant_at(f: &dyn InnerFunction, z0: C64, r_schedule: &[f64], quad_tol: f64) -> Result<f64> {
    if r_schedule.len() < 2 {
        return Err(Error::Schedule("need at least 2 radii".into()));
    }
    if r_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Schedule("radii must be strictly increasing".into()));
    }
    let inner_radius = r_schedule[0];
    if !(z0.norm() < inner_radius) {
        return Err(Error::Domain(format!("|z0| = {} must be below the smallest radius", z0.norm())));
    }
    let values: Vec<f64> = r_schedule
        .par_iter()
        .map(|&r| {
            let poisson = |t: f64| (r * r - z0.norm_sqr()) / (C64::from_polar(r, t) - z0).norm_sqr();
            weighted_integral(f, r, quad_tol, poisson).map(|q| q.value / TAU)
        })
        .collect::<Result<_>>()?;
    let n = values.len();
    Ok(extrapolate(r_schedule[n - 2], values[n - 2], r_schedule[n - 1], values[n - 1]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    /// Smallest `|z| - |B(z)|` over the grid.
    pub schwarz_slack: f64,
    pub r_schedule: Vec<f64>,
    pub composite_integrals: Vec<f64>,
    pub inner_integrals: Vec<f64>,
    /// `I_C(r) + quad_tol - I_{B∘C}(r)` per radius.
    pub lower_slacks: Vec<f64>,
    /// `quad_tol - I_C(r)` per radius.
    pub upper_slacks: Vec<f64>,
}

/// Checks `|B(z)| <= |z|` and `I_{B∘C}(r) <= I_C(r) <= 0` for `B(0) = 0`.
pub fn schwarz_sandwich_check(
    outer: &InnerModel,
    inner: &dyn InnerFunction,
    r_schedule: &[f64],
    quad_tol: f64,
) -> Result<SandwichReport> {
    let tol = quad_tol / 10.0;
    let at_origin = outer.value(C64::new(0.0, 0.0), tol)?.norm();
    if !(at_origin < 1e-9) {
        return Err(Error::InvalidParameter(format!("outer function has |B(0)| = {at_origin:e}")));
    }
    let mut schwarz_slack = f64::INFINITY;
    for k in 0..200 {
        let radius = 0.05 + 0.945 * (k / 20) as f64 / 9.0;
        let z = C64::from_polar(radius, TAU * (k % 20) as f64 / 20.0 + 0.1 * (k / 20) as f64);
        let slack = z.norm() - outer.value(z, tol)?.norm();
        if slack < -1e-9 {
            return Err(Error::SandwichViolation(format!("|B(z)| > |z| at z = {z}")));
        }
        schwarz_slack = schwarz_slack.min(slack);
    }
    let composite = Composite { outer, inner };
    let pairs: Vec<(f64, f64)> = r_schedule
        .par_iter()
        .map(|&r| Ok((radial_log_integral(&composite, r, quad_tol)?, radial_log_integral(inner, r, quad_tol)?)))
        .collect::<Result<_>>()?;
    let mut report = SandwichReport {
        schwarz_slack,
        r_schedule: r_schedule.to_vec(),
        composite_integrals: Vec::new(),
        inner_integrals: Vec::new(),
        lower_slacks: Vec::new(),
        upper_slacks: Vec::new(),
    };
    for (&r, &(comp, inn)) in r_schedule.iter().zip(&pairs) {
        let lower = inn + quad_tol - comp;
        let upper = quad_tol - inn;
        if lower < 0.0 || upper < 0.0 {
            return Err(Error::SandwichViolation(format!("at r = {r}: I_BC = {comp}, I_C = {inn}, tol = {quad_tol}")));
        }
        report.composite_integrals.push(comp);
        report.inner_integrals.push(inn);
        report.lower_slacks.push(lower);
        report.upper_slacks.push(upper);
    }
    Ok(report)
}
