//! Numerical checks of the composition closure argument for indestructible
//! products `A = B ∘ C`.
//!
//! Each identity is evaluated along two independent paths: one side from
//! series composition or direct root solves of `A`, the other from products
//! of preimage moduli of the factors.

use serde::{Deserialize, Serialize};

use crate::disk::rho;
use crate::finite::SERIES_TOL;
use crate::indestructibility::{certify_indestructible, CertificateVerdict};
use crate::matching::multiset_distance;
use crate::{series, Error, FiniteBlaschke, Result, C64};

/// Pseudo-hyperbolic radius for identifying `C(0)` with a preimage of `B`.
pub const MATCH_RADIUS: f64 = 1e-6;
/// `|C(0)|` above which Case IIa applies.
pub const IIA_MIN_ORIGIN: f64 = 1e-8;
/// `|C(0)|` below which Case IIb applies.
pub const IIB_MAX_ORIGIN: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    I,
    IIa,
    IIb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub b: FiniteBlaschke,
    pub c: FiniteBlaschke,
    #[serde(with = "crate::serde_complex")]
    pub a: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case_tag: CaseTag,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matching_distance: Option<f64>,
    /// Vanishing order of `A - a` at the origin (Cases IIa and IIb).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub order: Option<usize>,
    /// `|a_coef - printed|` for the coefficient formula stated alongside the
    /// identity; informational only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub printed_coefficient_residual: Option<f64>,
    pub witness: Witness,
}

fn phi_modulus(a: C64, w: C64) -> f64 {
    ((w - a) / (1.0 - a.conj() * w)).norm()
}

/// First index `n >= 1` with a coefficient above `SERIES_TOL`.
fn vanishing_order(coeffs: &[C64]) -> Result<(usize, C64)> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, c)| c.norm() > SERIES_TOL)
        .map(|(n, c)| (n, *c))
        .ok_or(Error::SeriesResolution { max_index: coeffs.len().saturating_sub(1) })
}

/// Case I: preimages of `A = B ∘ C` at `a` against the union of preimages of
/// `C` over the preimages of `B`, plus the modulus identity at `A(0)`.
pub fn preimage_decomposition_check(b: &FiniteBlaschke, c: &FiniteBlaschke, a: C64) -> Result<CaseReport> {
    if !(a.norm() < 1.0) {
        return Err(Error::Domain(format!("{a} is not interior")));
    }
    let a0 = b.value(c.value(ZERO));
    if rho(a, a0) < 1e-8 {
        return Err(Error::CaseMismatch(format!("a = {a} coincides with A(0)")));
    }
    let composite = b.compose(c)?;
    let lhs_points = composite.preimages(a)?.points;
    let mut rhs_points = Vec::with_capacity(lhs_points.len());
    for xi in b.preimages(a)?.points {
        rhs_points.extend(c.preimages(xi)?.points);
    }
    let lhs = phi_modulus(a, a0);
    let rhs: f64 = rhs_points.iter().map(|z| z.norm()).product();
    Ok(CaseReport {
        case_tag: CaseTag::I,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        matching_distance: Some(multiset_distance(&lhs_points, &rhs_points)),
        order: None,
        printed_coefficient_residual: None,
        witness: Witness { b: b.clone(), c: c.clone(), a },
    })
}

/// Case IIa (`C(0) != 0`, `a = A(0)`): the leading coefficient identity.
pub fn case2a_check(b: &FiniteBlaschke, c: &FiniteBlaschke) -> Result<CaseReport> {
    let c0 = c.value(ZERO);
    if !(c0.norm() > IIA_MIN_ORIGIN) {
        return Err(Error::CaseMismatch(format!("|C(0)| = {:e} is too small for case IIa", c0.norm())));
    }
    let a = b.value(c0);
    let xis = b.preimages(a)?.points;
    let (matched, rest): (Vec<C64>, Vec<C64>) = xis.into_iter().partition(|xi| rho(*xi, c0) < MATCH_RADIUS);
    match matched.len() {
        1 => {}
        0 => return Err(Error::CaseMismatch("C(0) is not a preimage of A(0) under B".into())),
        count => return Err(Error::Multiplicity { count }),
    }

    let len = b.degree() * c.degree() + 1;
    let outer = b.taylor_coeffs_at(c0, len);
    let mut inner = c.taylor_coeffs(len);
    inner[0] = ZERO;
    let (order, a_n) = vanishing_order(&series::compose(&outer, &inner, len + 1))?;
    let (c_order, c_n) = vanishing_order(&inner)?;
    if order != c_order {
        return Err(Error::CaseMismatch(format!("order {order} of A - a differs from order {c_order} of C - C(0)")));
    }

    let lhs = a_n.norm() / (1.0 - a.norm_sqr());
    let mut rhs: f64 = c.nonzero_level_points()?.iter().map(|z| z.norm()).product();
    for xi in rest {
        rhs *= c.preimages(xi)?.modulus_product();
    }
    let printed = printed_case2a(b, c0, order, c_n)?;
    Ok(CaseReport {
        case_tag: CaseTag::IIa,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        matching_distance: None,
        order: Some(order),
        printed_coefficient_residual: Some((a_n - printed).norm()),
        witness: Witness { b: b.clone(), c: c.clone(), a },
    })
}

/// `N c_N b_M C(0)^(N-1)` with `b_M` the first nonconstant Maclaurin
/// coefficient of `B`.
fn printed_case2a(b: &FiniteBlaschke, c0: C64, n: usize, c_n: C64) -> Result<C64> {
    let (_, b_m) = b.first_nonconstant_index()?;
    Ok(n as f64 * c_n * b_m * c0.powi(n as i32 - 1))
}

/// Case IIb (`C(0) = 0`, `a = B(0)`): both forms of the leading coefficient
/// identity; the larger residual is reported.
pub fn case2b_check(b: &FiniteBlaschke, c: &FiniteBlaschke) -> Result<CaseReport> {
    let c0 = c.value(ZERO);
    if !(c0.norm() < IIB_MAX_ORIGIN) {
        return Err(Error::CaseMismatch(format!("|C(0)| = {:e} is too large for case IIb", c0.norm())));
    }
    let a = b.value(ZERO);
    let len = b.degree() * c.degree() + 1;
    let outer = b.taylor_coeffs(len);
    let mut inner = c.taylor_coeffs(len);
    inner[0] = ZERO;
    let (order, a_nm) = vanishing_order(&series::compose(&outer, &inner, len + 1))?;
    let (n, b_n) = vanishing_order(&outer)?;
    let (m, c_m) = vanishing_order(&inner)?;
    if order != n * m {
        return Err(Error::CaseMismatch(format!("order {order} of A - a differs from N*M = {}", n * m)));
    }

    let lhs = a_nm.norm() / (1.0 - a.norm_sqr());
    let zb = b.nonzero_level_points()?;
    let rhs7 = c_m.norm().powi(n as i32) * zb.iter().map(|z| z.norm()).product::<f64>();
    let zc: f64 = c.nonzero_level_points()?.iter().map(|z| z.norm()).product();
    let mut rhs8 = zc.powi(n as i32);
    for z in zb {
        rhs8 *= c.preimages(z)?.modulus_product();
    }
    let (rhs, residual) = [rhs7, rhs8]
        .into_iter()
        .map(|r| (r, (lhs - r).abs()))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("two candidates");
    Ok(CaseReport {
        case_tag: CaseTag::IIb,
        lhs,
        rhs,
        residual,
        matching_distance: None,
        order: Some(order),
        printed_coefficient_residual: Some((a_nm - b_n * c_m).norm()),
        witness: Witness { b: b.clone(), c: c.clone(), a },
    })
}

/// Whether `B ∘ C` is certified over `grid`.
pub fn theorem1_regression(b: &FiniteBlaschke, c: &FiniteBlaschke, grid: &[C64], tol: f64) -> Result<bool> {
    let composite = b.compose(c)?;
    Ok(certify_indestructible(&composite, grid, tol)?.verdict == CertificateVerdict::Certified)
}
