//! Infinite Blaschke products given by zero-sequence rules, evaluated by
//! truncation with a rigorous bound on the log-modulus error.
//!
//! For a factor with zero `a` and `|z| < 1`,
//! `1 - |beta_a(z)|^2 = (1 - |a|^2)(1 - |z|^2) / |1 - conj(a) z|^2`, so
//! `1 - |beta_a(z)| <= (1 - |a|^2)(1 + |z|)/(1 - |z|)`. With
//! `-log(1 - x) <= 2x` for `x <= 1/2` the neglected factors contribute at most
//! `2 (1 + |z|)/(1 - |z|) * sum_{n > N} (1 - |a_n|^2)` to `|log|B(z)||`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::disk::{check_unimodular, BoundaryPoint};
use crate::{Error, FiniteBlaschke, Result, C64};

/// Default ceiling on the number of factors used by truncated evaluation.
pub const DEFAULT_MAX_FACTORS: usize = 1_000_000;
/// Running-sum cap above which an explicit list is rejected as non-Blaschke.
pub const DIVERGENCE_CAP: f64 = 1e4;

/// Truncation ceiling, overridable through `BLASCHKE_MAX_FACTORS`.
pub fn max_factors() -> usize {
    static CEILING: OnceLock<usize> = OnceLock::new();
    *CEILING.get_or_init(|| {
        std::env::var("BLASCHKE_MAX_FACTORS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&n| n > 0)
            .unwrap_or(DEFAULT_MAX_FACTORS)
    })
}

/// A Blaschke zero sequence `(a_n)_{n >= 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZeroSequenceRule {
    ExplicitList {
        #[serde(with = "crate::serde_complex::vec")]
        points: Vec<C64>,
    },
    /// `a_n = (1 - c n^{-p}) * direction`, `0 < c < 2`, `p > 1`.
    RadialPower { c: f64, p: f64, direction: BoundaryPoint },
    /// `a_n = (1 - c q^n) * direction`, `0 < c, q < 1`.
    Geometric { c: f64, q: f64, direction: BoundaryPoint },
}

impl ZeroSequenceRule {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        match *self {
            Self::ExplicitList { ref points } => {
                if points.is_empty() {
                    return bad("explicit zero list is empty");
                }
                if let Some(z) = points.iter().find(|z| !(z.norm() < 1.0)) {
                    return Err(Error::Domain(format!("zero {z} is not interior")));
                }
                blaschke_sum(self, points.len()).map(|_| ())
            }
            Self::RadialPower { c, p, .. } => {
                if !(c > 0.0 && c < 2.0) {
                    return bad("radial_power needs 0 < c < 2");
                }
                if !(p > 1.0) {
                    return bad("radial_power needs p > 1");
                }
                Ok(())
            }
            Self::Geometric { c, q, .. } => {
                if !(c > 0.0 && c < 1.0 && q > 0.0 && q < 1.0) {
                    return bad("geometric needs 0 < c < 1 and 0 < q < 1");
                }
                Ok(())
            }
        }
    }

    /// Number of zeros, `None` for infinite rules.
    pub fn explicit_len(&self) -> Option<usize> {
        match self {
            Self::ExplicitList { points } => Some(points.len()),
            _ => None,
        }
    }

    /// The zero `a_n`, `n >= 1`.
    pub fn zero(&self, n: usize) -> C64 {
        match *self {
            Self::ExplicitList { ref points } => points[n - 1],
            Self::RadialPower { c, p, direction } => direction.value() * (1.0 - c * (n as f64).powf(-p)),
            Self::Geometric { c, q, direction } => direction.value() * (1.0 - c * q.powi(n as i32)),
        }
    }

    /// `1 - |a_n|`, computed without cancellation for parametric rules.
    pub fn gap(&self, n: usize) -> f64 {
        match *self {
            Self::ExplicitList { ref points } => 1.0 - points[n - 1].norm(),
            Self::RadialPower { c, p, .. } => {
                let d = c * (n as f64).powf(-p);
                if d <= 1.0 {
                    d
                } else {
                    2.0 - d
                }
            }
            Self::Geometric { c, q, .. } => c * q.powi(n as i32),
        }
    }

    /// Upper bound on `sum_{n > level} (1 - |a_n|)`.
    pub fn tail_bound(&self, level: usize) -> f64 {
        match *self {
            Self::ExplicitList { ref points } => (level + 1..=points.len()).map(|n| self.gap(n)).sum(),
            // integral comparison: sum_{n>N} n^{-p} <= int_N^inf x^{-p} dx
            Self::RadialPower { c, p, .. } => c * (level as f64).powf(1.0 - p) / (p - 1.0),
            Self::Geometric { c, q, .. } => c * q.powi(level as i32 + 1) / (1.0 - q),
        }
    }

    fn clamp(&self, level: usize) -> usize {
        self.explicit_len().map_or(level, |len| level.min(len))
    }
}

/// `(sum_{n <= level} (1 - |a_n|), bound on the remaining tail)`.
pub fn blaschke_sum(rule: &ZeroSequenceRule, level: usize) -> Result<(f64, f64)> {
    if level == 0 {
        return Err(Error::InvalidParameter("level must be at least 1".into()));
    }
    let top = rule.clamp(level);
    let mut partial = 0.0;
    for n in 1..=top {
        partial += rule.gap(n);
        if rule.explicit_len().is_some() && partial > DIVERGENCE_CAP {
            return Err(Error::Divergence { cap: DIVERGENCE_CAP });
        }
    }
    Ok((partial, rule.tail_bound(level)))
}

/// `log|B(z)|` with the level at which it was computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogModulus {
    Finite {
        value: f64,
        err: f64,
        level: usize,
    },
    /// `z` is one of the listed zeros.
    AtZero {
        level: usize,
    },
}

impl LogModulus {
    /// The log-modulus, with `-inf` at a zero.
    pub fn value(&self) -> f64 {
        match *self {
            Self::Finite { value, .. } => value,
            Self::AtZero { .. } => f64::NEG_INFINITY,
        }
    }

    pub fn level(&self) -> usize {
        match *self {
            Self::Finite { level, .. } | Self::AtZero { level } => level,
        }
    }
}

/// An infinite Blaschke product `eta * prod_n beta_{a_n}` carried with a
/// nominal truncation level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTruncated")]
pub struct TruncatedBlaschke {
    rule: ZeroSequenceRule,
    level: usize,
    #[serde(with = "crate::serde_complex")]
    eta: C64,
}

#[derive(Deserialize)]
struct RawTruncated {
    rule: ZeroSequenceRule,
    level: usize,
    #[serde(with = "crate::serde_complex")]
    eta: C64,
}

impl TryFrom<RawTruncated> for TruncatedBlaschke {
    type Error = Error;

    fn try_from(raw: RawTruncated) -> Result<Self> {
        TruncatedBlaschke::new(raw.rule, raw.level, raw.eta)
    }
}

/// `log|beta_a(z)|` given `1 - |a|` precomputed.
fn log_factor(a: C64, gap: f64, z: C64) -> f64 {
    let den = 1.0 - a.conj() * z;
    let zn = z.norm();
    let x = gap * (2.0 - gap) * (1.0 - zn) * (1.0 + zn) / den.norm_sqr();
    if x < 0.5 {
        0.5 * (-x).ln_1p()
    } else {
        ((z - a).norm() / den.norm()).ln()
    }
}

impl TruncatedBlaschke {
    pub fn new(rule: ZeroSequenceRule, level: usize, eta: C64) -> Result<Self> {
        rule.validate()?;
        check_unimodular(eta)?;
        if level == 0 {
            return Err(Error::InvalidParameter("truncation level must be at least 1".into()));
        }
        Ok(Self { rule, level, eta: eta / eta.norm() })
    }

    pub fn rule(&self) -> &ZeroSequenceRule {
        &self.rule
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn eta(&self) -> C64 {
        self.eta
    }

    pub fn with_level(&self, level: usize) -> Result<Self> {
        Self::new(self.rule.clone(), level, self.eta)
    }

    /// The first `level` zeros (all zeros for short explicit lists).
    pub fn zeros(&self, level: usize) -> Vec<C64> {
        (1..=self.rule.clamp(level)).map(|n| self.rule.zero(n)).collect()
    }

    /// Bound on `|log|B(z)| - log|B_level(z)||`; infinite where the
    /// per-factor estimate does not apply yet.
    pub fn tail_error(&self, z: C64, level: usize) -> f64 {
        let zn = z.norm();
        if zn >= 1.0 {
            return f64::INFINITY;
        }
        let growth = (1.0 + zn) / (1.0 - zn);
        // 1 - |a|^2 <= 2 (1 - |a|)
        let tail_sq = 2.0 * self.rule.tail_bound(level);
        if tail_sq == 0.0 {
            return 0.0;
        }
        if growth * tail_sq > 0.5 {
            return f64::INFINITY;
        }
        2.0 * growth * tail_sq
    }

    /// `log|B_level(z)|` together with its tail bound.
    pub fn log_modulus_at_level(&self, z: C64, level: usize) -> LogModulus {
        let top = self.rule.clamp(level);
        let mut value = 0.0;
        for n in 1..=top {
            let a = self.rule.zero(n);
            if z == a {
                return LogModulus::AtZero { level: top };
            }
            value += log_factor(a, self.rule.gap(n), z);
        }
        if value == f64::NEG_INFINITY {
            return LogModulus::AtZero { level: top };
        }
        LogModulus::Finite { value, err: self.tail_error(z, level), level: top }
    }

    /// `log|B(z)|` to within `tol`, raising the level from `self.level()`
    /// until the tail bound meets `tol`.
    pub fn log_modulus(&self, z: C64, tol: f64) -> Result<LogModulus> {
        self.log_modulus_with_ceiling(z, tol, max_factors())
    }

    pub fn log_modulus_with_ceiling(&self, z: C64, tol: f64, ceiling: usize) -> Result<LogModulus> {
        if !(z.norm() < 1.0) {
            return Err(Error::Domain(format!("{z} is not interior")));
        }
        let level = self.level_for(z, tol, ceiling)?;
        Ok(self.log_modulus_at_level(z, level))
    }

    /// Smallest doubling of the nominal level whose tail bound meets `tol`.
    pub fn level_for(&self, z: C64, tol: f64, ceiling: usize) -> Result<usize> {
        let mut level = self.rule.clamp(self.level.min(ceiling).max(1));
        loop {
            let err = self.tail_error(z, level);
            if err <= tol {
                return Ok(level);
            }
            if level >= ceiling || self.rule.explicit_len().is_some_and(|len| level >= len) {
                return Err(Error::Tol { ceiling, err, tol });
            }
            level = (2 * level).min(ceiling);
        }
    }

    /// `eta * prod_{n <= level} beta_{a_n}(z)`; approximate, with modulus
    /// error controlled by [`TruncatedBlaschke::tail_error`].
    pub fn evaluate(&self, z: C64) -> C64 {
        self.evaluate_at_level(z, self.level)
    }

    pub fn evaluate_at_level(&self, z: C64, level: usize) -> C64 {
        self.zeros(level).into_iter().fold(self.eta, |acc, a| {
            if a == C64::new(0.0, 0.0) {
                acc * z
            } else {
                acc * (-a.conj() / a.norm()) * (z - a) / (1.0 - a.conj() * z)
            }
        })
    }

    /// The finite product formed by the first `level` factors.
    pub fn to_finite(&self, level: usize) -> Result<FiniteBlaschke> {
        FiniteBlaschke::new(self.eta, self.zeros(level))
    }
}
