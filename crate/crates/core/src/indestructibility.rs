//! McLaughlin's characterization of indestructible Blaschke products.
//!
//! For an inner `F` with `F(z) = F(0) + b_n z^n + ...`, `F` is an
//! indestructible Blaschke product iff
//!
//! * (m1) `|phi_a(F(0))| = prod_j |xi_j(F; a)|` for every `a != F(0)`, where
//!   `xi_j(F; a)` are the solutions of `F(z) = a`, and
//! * (m2) `|b_n| / (1 - |F(0)|^2) = prod_j |z_j(F)|` over the nonzero
//!   solutions `z_j(F)` of `F(z) = F(0)`.
//!
//! This module reports the residuals of both conditions. For finite products
//! both sides are computed exactly up to root-finding error; for truncated
//! infinite products the left-hand sides use a deeper reference truncation
//! and the residuals are approximate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{criteria_report, InnerModel, Verdict};
use crate::disk::{rho, MoebiusMap};
use crate::infinite::max_factors;
use crate::{Error, FiniteBlaschke, Result, TruncatedBlaschke, C64};

/// Default certificate tolerance on the exact (finite) path.
pub const CERT_TOL: f64 = 1e-7;
/// Grid points within this pseudo-hyperbolic distance of `F(0)` are skipped.
pub const EXCLUSION_RADIUS: f64 = 1e-8;

const ZERO: C64 = C64::new(0.0, 0.0);

/// The product whose conditions are checked.
#[derive(Debug, Clone, Copy)]
pub enum Source<'a> {
    Finite(&'a FiniteBlaschke),
    Truncated(&'a TruncatedBlaschke),
}

impl<'a> From<&'a FiniteBlaschke> for Source<'a> {
    fn from(b: &'a FiniteBlaschke) -> Self {
        Source::Finite(b)
    }
}

impl<'a> From<&'a TruncatedBlaschke> for Source<'a> {
    fn from(t: &'a TruncatedBlaschke) -> Self {
        Source::Truncated(t)
    }
}

impl Source<'_> {
    pub fn is_exact(&self) -> bool {
        matches!(self, Source::Finite(_))
    }

    /// The product whose level sets are solved for.
    fn working(&self) -> Result<FiniteBlaschke> {
        match self {
            Source::Finite(b) => Ok((*b).clone()),
            Source::Truncated(t) => t.to_finite(t.level()),
        }
    }

    /// The product used for `F(0)` and Taylor data.
    fn reference(&self) -> Result<FiniteBlaschke> {
        match self {
            Source::Finite(b) => Ok((*b).clone()),
            Source::Truncated(t) => {
                let ceiling = max_factors();
                let mut deep = t.level_for(ZERO, 1e-14, ceiling).unwrap_or(ceiling).max(4 * t.level()).min(ceiling);
                if let Some(len) = t.rule().explicit_len() {
                    deep = deep.min(len);
                }
                // keep the reference zeros resolvable in double precision
                while deep > t.level() && t.rule().gap(deep) < 1e-9 {
                    deep = (deep / 2).max(t.level());
                }
                t.to_finite(deep)
            }
        }
    }

    pub fn value_at_origin(&self) -> Result<C64> {
        Ok(self.reference()?.value(ZERO))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    /// False for truncated inputs.
    pub exact: bool,
}

fn m1_with(working: &FiniteBlaschke, f0: C64, a: C64, exact: bool) -> Result<Residual> {
    if !(a.norm() < 1.0) {
        return Err(Error::Domain(format!("{a} is not interior")));
    }
    if rho(a, f0) <= EXCLUSION_RADIUS {
        return Err(Error::TargetCoincides);
    }
    let lhs = ((f0 - a) / (1.0 - a.conj() * f0)).norm();
    let rhs = working.preimages(a)?.modulus_product();
    Ok(Residual { value: (lhs - rhs).abs(), exact })
}

/// `| |phi_a(F(0))| - prod_j |xi_j(F; a)| |`.
pub fn m1_residual<'a>(f: impl Into<Source<'a>>, a: C64) -> Result<Residual> {
    let f = f.into();
    m1_with(&f.working()?, f.value_at_origin()?, a, f.is_exact())
}

/// `| |b_n| / (1 - |F(0)|^2) - prod_j |z_j(F)| |`.
pub fn m2_residual<'a>(f: impl Into<Source<'a>>) -> Result<Residual> {
    let f = f.into();
    let working = f.working()?;
    let (n, b_n) = working.first_nonconstant_index()?;
    let (b_n, f0) = match f {
        Source::Finite(_) => (b_n, working.value(ZERO)),
        Source::Truncated(_) => {
            let reference = f.reference()?;
            (reference.taylor_coeffs(n)[n], reference.value(ZERO))
        }
    };
    let lhs = b_n.norm() / (1.0 - f0.norm_sqr());
    let rhs: f64 = working.nonzero_level_points()?.iter().map(|z| z.norm()).product();
    Ok(Residual { value: (lhs - rhs).abs(), exact: f.is_exact() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateVerdict {
    Certified,
    Refuted,
    Approximate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridResidual {
    #[serde(with = "crate::serde_complex")]
    pub a: C64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub m1_grid: Vec<GridResidual>,
    pub m1_max: f64,
    pub m2_residual: f64,
    pub exact: bool,
    pub verdict: CertificateVerdict,
}

/// Evaluates both conditions over `a_grid` (points near `F(0)` are skipped).
pub fn certify_indestructible<'a>(f: impl Into<Source<'a>>, a_grid: &[C64], tol: f64) -> Result<CertificateReport> {
    if a_grid.is_empty() {
        return Err(Error::Grid);
    }
    let f = f.into();
    let working = f.working()?;
    let f0 = f.value_at_origin()?;
    let exact = f.is_exact();
    let m1_grid: Vec<GridResidual> = a_grid
        .par_iter()
        .filter(|a| rho(**a, f0) > EXCLUSION_RADIUS)
        .map(|&a| m1_with(&working, f0, a, exact).map(|r| GridResidual { a, residual: r.value }))
        .collect::<Result<_>>()?;
    if m1_grid.is_empty() {
        return Err(Error::Grid);
    }
    let m1_max = m1_grid.iter().map(|g| g.residual).fold(0.0, f64::max);
    let m2 = m2_residual(f)?.value;
    let verdict = if !exact {
        CertificateVerdict::Approximate
    } else if m1_max < tol && m2 < tol {
        CertificateVerdict::Certified
    } else if m1_max > 100.0 * tol || m2 > 100.0 * tol {
        CertificateVerdict::Refuted
    } else {
        CertificateVerdict::Approximate
    };
    Ok(CertificateReport { m1_grid, m1_max, m2_residual: m2, exact, verdict })
}

/// Points on concentric rings; a ring of radius 0 contributes the origin.
pub fn grid_from_rings(rings: &[(f64, usize)]) -> Vec<C64> {
    let mut out = Vec::new();
    for (i, &(radius, count)) in rings.iter().enumerate() {
        if radius == 0.0 {
            if count > 0 {
                out.push(ZERO);
            }
            continue;
        }
        let offset = 0.37 * (i + 1) as f64;
        out.extend(
            (0..count).map(|k| C64::from_polar(radius, std::f64::consts::TAU * k as f64 / count as f64 + offset)),
        );
    }
    out
}

/// 56 points on the rings 0.35 and 0.7 plus 8 points at pseudo-hyperbolic
/// distance 0.05 from `f0`.
pub fn default_grid(f0: C64) -> Vec<C64> {
    let mut grid = grid_from_rings(&[(0.35, 28), (0.7, 28)]);
    let recenter = MoebiusMap::frostman(-f0).expect("F(0) is interior");
    grid.extend(
        (0..8).map(|k| recenter.apply_unchecked(C64::from_polar(0.05, std::f64::consts::FRAC_PI_4 * k as f64))),
    );
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeEntry {
    #[serde(with = "crate::serde_complex")]
    pub a: C64,
    pub singular_mass: f64,
    pub verdict: Verdict,
}

/// Estimated singular mass of `phi_a ∘ F` over a grid of shifts `a`.
pub fn destructibility_probe(
    model: &InnerModel,
    a_grid: &[C64],
    r_schedule: &[f64],
    quad_tol: f64,
) -> Result<Vec<ProbeEntry>> {
    if a_grid.is_empty() {
        return Err(Error::Grid);
    }
    a_grid
        .iter()
        .map(|&a| {
            let shifted = model.post_composed(&MoebiusMap::frostman(a)?);
            let report = criteria_report(&shifted, r_schedule, quad_tol)?;
            Ok(ProbeEntry { a, singular_mass: report.singular_mass, verdict: report.verdict })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::AtomicSingular;
    use crate::disk::BoundaryPoint;
    use crate::infinite::ZeroSequenceRule;
    use crate::sampling::{random_disk_point, random_finite};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn m1_examples() {
        let sq = FiniteBlaschke::monomial(2).unwrap();
        assert!(m1_residual(&sq, c(0.25, 0.0)).unwrap().value < 1e-15);
        let b = FiniteBlaschke::from_zeros(vec![ZERO, c(0.5, 0.0)]).unwrap();
        for a in [c(0.3, 0.1), c(-0.6, 0.2), c(0.0, -0.8)] {
            assert!(m1_residual(&b, a).unwrap().value < 1e-12);
        }
        assert!(matches!(m1_residual(&b, ZERO), Err(Error::TargetCoincides)));
    }

    #[test]
    fn m1_random_degree_six() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let b = random_finite(&mut rng, 6, 0.8);
        let worst =
            (0..50).map(|_| m1_residual(&b, random_disk_point(&mut rng, 0.95)).unwrap().value).fold(0.0, f64::max);
        assert!(worst < 1e-8);
    }

    #[test]
    fn m2_examples() {
        for k in 1..5 {
            assert!(m2_residual(&FiniteBlaschke::monomial(k).unwrap()).unwrap().value < 1e-15);
        }
        let b = FiniteBlaschke::from_zeros(vec![ZERO, c(0.5, 0.0)]).unwrap();
        assert!(m2_residual(&b).unwrap().value < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..10 {
            let b = random_finite(&mut rng, 5, 0.8);
            assert!(m2_residual(&b).unwrap().value < 1e-8);
        }
    }

    #[test]
    fn finite_products_are_certified() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for deg in 1..7 {
            let b = random_finite(&mut rng, deg, 0.8);
            let grid = default_grid(b.value(ZERO));
            assert_eq!(grid.len(), 64);
            let report = certify_indestructible(&b, &grid, CERT_TOL).unwrap();
            assert_eq!(report.verdict, CertificateVerdict::Certified, "{report:?}");
            assert!(report.exact);
        }
    }

    #[test]
    fn compositions_of_certified_products_are_certified() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = random_finite(&mut rng, 3, 0.8);
        let inner = random_finite(&mut rng, 2, 0.8);
        let a = b.compose(&inner).unwrap();
        let report = certify_indestructible(&a, &default_grid(a.value(ZERO)), CERT_TOL).unwrap();
        assert_eq!(report.verdict, CertificateVerdict::Certified);
    }

    #[test]
    fn truncated_products_are_approximate_and_improve_with_level() {
        let rule = ZeroSequenceRule::Geometric { c: 0.5, q: 0.6, direction: BoundaryPoint::from_angle(0.4) };
        let grid = grid_from_rings(&[(0.3, 6), (0.6, 6)]);
        let mut profile = Vec::new();
        for level in [4, 8, 16] {
            let t = TruncatedBlaschke::new(rule.clone(), level, c(1.0, 0.0)).unwrap();
            let report = certify_indestructible(&t, &grid, CERT_TOL).unwrap();
            assert_eq!(report.verdict, CertificateVerdict::Approximate);
            assert!(!report.exact);
            profile.push(report.m1_max);
        }
        assert!(profile[0] > profile[1] && profile[1] > profile[2], "{profile:?}");
    }

    #[test]
    fn empty_grid_is_an_error() {
        assert!(matches!(certify_indestructible(&FiniteBlaschke::identity(), &[], CERT_TOL), Err(Error::Grid)));
    }

    #[test]
    fn grid_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let b = random_finite(&mut rng, 4, 0.8);
        let big = default_grid(b.value(ZERO));
        let small = &big[..20];
        let r_small = certify_indestructible(&b, small, CERT_TOL).unwrap();
        let r_big = certify_indestructible(&b, &big, CERT_TOL).unwrap();
        assert!(r_big.m1_max >= r_small.m1_max);
    }

    #[test]
    fn probe_recovers_inverse_pair_mass() {
        let schedule = [0.5, 0.9, 0.99, 0.999];
        let a0 = c(0.3, -0.2);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let base = InnerModel::from(random_finite(&mut rng, 3, 0.8))
            .times(AtomicSingular::new(1.0, BoundaryPoint::from_angle(2.0)).unwrap())
            .unwrap();
        let synthetic = base.post_composed(&MoebiusMap::frostman(-a0).unwrap());
        let entries = destructibility_probe(&synthetic, &[a0], &schedule, 1e-9).unwrap();
        assert!((entries[0].singular_mass - 1.0).abs() < 1e-2);
    }

    #[test]
    fn probe_on_finite_products_finds_no_mass() {
        let schedule = [0.5, 0.9, 0.99, 0.999];
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        let b = random_finite(&mut rng, 3, 0.8);
        let grid = grid_from_rings(&[(0.0, 1), (0.5, 4)]);
        let entries = destructibility_probe(&InnerModel::from(b.clone()), &grid, &schedule, 1e-9).unwrap();
        assert_eq!(entries[0].a, ZERO);
        for e in entries {
            assert!(e.singular_mass.abs() < 1e-3, "{e:?}");
            // m1 holds at the same shifts
            if rho(e.a, b.value(ZERO)) > EXCLUSION_RADIUS {
                assert!(m1_residual(&b, e.a).unwrap().value < 1e-8);
            }
        }
    }
}
