//! Points of the unit disk and the automorphism group Aut(D).

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Tolerance for all disk-membership and unimodularity tests.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// A point with `|z| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct UnitDiskPoint(C64);

impl UnitDiskPoint {
    pub fn new(z: C64) -> Result<Self> {
        if z.norm() < 1.0 && z.is_finite() {
            Ok(Self(z))
        } else {
            Err(Error::Domain(format!("{z} is not an interior point")))
        }
    }

    pub fn value(self) -> C64 {
        self.0
    }
}

/// A point on the unit circle, `| |z| - 1 | <= BOUNDARY_TOL`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct BoundaryPoint(C64);

impl BoundaryPoint {
    pub fn new(z: C64) -> Result<Self> {
        if (z.norm() - 1.0).abs() <= BOUNDARY_TOL {
            Ok(Self(z / z.norm()))
        } else {
            Err(Error::Domain(format!("{z} is not on the unit circle")))
        }
    }

    /// The boundary point `e^{i theta}`.
    pub fn from_angle(theta: f64) -> Self {
        Self(C64::from_polar(1.0, theta))
    }

    pub fn value(self) -> C64 {
        self.0
    }
}

impl TryFrom<[f64; 2]> for UnitDiskPoint {
    type Error = Error;

    fn try_from([re, im]: [f64; 2]) -> Result<Self> {
        Self::new(C64::new(re, im))
    }
}

impl From<UnitDiskPoint> for [f64; 2] {
    fn from(p: UnitDiskPoint) -> Self {
        [p.0.re, p.0.im]
    }
}

impl TryFrom<[f64; 2]> for BoundaryPoint {
    type Error = Error;

    fn try_from([re, im]: [f64; 2]) -> Result<Self> {
        Self::new(C64::new(re, im))
    }
}

impl From<BoundaryPoint> for [f64; 2] {
    fn from(p: BoundaryPoint) -> Self {
        [p.0.re, p.0.im]
    }
}

pub(crate) fn check_closed_disk(z: C64) -> Result<()> {
    if z.norm() > 1.0 + BOUNDARY_TOL || !z.is_finite() {
        Err(Error::Domain(format!("|{z}| > 1")))
    } else {
        Ok(())
    }
}

pub(crate) fn check_unimodular(eta: C64) -> Result<()> {
    if (eta.norm() - 1.0).abs() > BOUNDARY_TOL {
        Err(Error::InvalidParameter(format!("|eta| = {} != 1", eta.norm())))
    } else {
        Ok(())
    }
}

/// The disk automorphism `z -> eta (z - a) / (1 - conj(a) z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMoebius")]
pub struct MoebiusMap {
    #[serde(with = "crate::serde_complex")]
    a: C64,
    #[serde(with = "crate::serde_complex")]
    eta: C64,
}

#[derive(Deserialize)]
struct RawMoebius {
    #[serde(with = "crate::serde_complex")]
    a: C64,
    #[serde(with = "crate::serde_complex")]
    eta: C64,
}

impl TryFrom<RawMoebius> for MoebiusMap {
    type Error = Error;

    fn try_from(raw: RawMoebius) -> Result<Self> {
        Self::new(raw.a, raw.eta)
    }
}

impl MoebiusMap {
    pub fn new(a: C64, eta: C64) -> Result<Self> {
        UnitDiskPoint::new(a)?;
        check_unimodular(eta)?;
        Ok(Self { a, eta: eta / eta.norm() })
    }

    pub fn identity() -> Self {
        Self { a: C64::new(0.0, 0.0), eta: C64::new(1.0, 0.0) }
    }

    /// The Frostman map `w -> (w - a) / (1 - conj(a) w)`.
    pub fn frostman(a: C64) -> Result<Self> {
        Self::new(a, C64::new(1.0, 0.0))
    }

    pub fn rotation(eta: C64) -> Result<Self> {
        Self::new(C64::new(0.0, 0.0), eta)
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn eta(&self) -> C64 {
        self.eta
    }

    pub fn apply(&self, z: C64) -> Result<C64> {
        check_closed_disk(z)?;
        Ok(self.apply_unchecked(z))
    }

    #[inline]
    pub(crate) fn apply_unchecked(&self, z: C64) -> C64 {
        self.eta * (z - self.a) / (1.0 - self.a.conj() * z)
    }

    /// `self ∘ inner`, in closed form.
    pub fn compose(&self, inner: &MoebiusMap) -> MoebiusMap {
        let (a1, e1) = (self.a, self.eta);
        let (a2, e2) = (inner.a, inner.eta);
        // eta1 (eta2 (z - a2) - a1 (1 - conj(a2) z)) / ((1 - conj(a2) z) - conj(a1) eta2 (z - a2))
        let lead = e2 + a1 * a2.conj();
        let den0 = 1.0 + a1.conj() * e2 * a2;
        let a = (e2 * a2 + a1) / lead;
        let eta = e1 * lead / den0;
        MoebiusMap { a, eta: eta / eta.norm() }
    }

    pub fn invert(&self) -> MoebiusMap {
        MoebiusMap { a: -self.eta * self.a, eta: self.eta.conj() }
    }
}

/// Pseudo-hyperbolic distance `|z - w| / |1 - conj(w) z|`.
pub fn pseudo_hyperbolic(z: C64, w: C64) -> Result<f64> {
    UnitDiskPoint::new(z)?;
    UnitDiskPoint::new(w)?;
    Ok(rho(z, w))
}

#[inline]
pub(crate) fn rho(z: C64, w: C64) -> f64 {
    let num = (z - w).norm();
    if num == 0.0 {
        return 0.0;
    }
    (num / (1.0 - w.conj() * z).norm()).min(1.0)
}
