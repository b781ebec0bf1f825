//! Numerical toolkit for Blaschke products on the unit disk.
//!
//! The crate covers the automorphism group of the disk, exact algebra of
//! finite Blaschke products (evaluation, Taylor data, preimages, critical
//! points, composition, Frostman shifts), truncated infinite products with
//! rigorous log-modulus tail bounds, the radial log-integral / harmonic
//! majorant criteria for Blaschke products, McLaughlin-type
//! indestructibility residuals, numerical checks of the composition
//! identities for indestructible products, and the maximal Blaschke product
//! with a prescribed finite critical set.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod composition;
pub mod criteria;
pub mod disk;
mod error;
pub mod finite;
pub mod indestructibility;
pub mod infinite;
pub mod matching;
pub mod maximal;
pub mod poly;
pub mod quadrature;
pub mod sampling;
pub mod serde_complex;
pub mod series;

pub use error::{Error, Result};

/// Complex double used throughout the crate.
pub type C64 = num_complex::Complex64;

pub use composition::{
    case2a_check, case2b_check, preimage_decomposition_check, theorem1_regression, CaseReport, CaseTag, Witness,
};
pub use criteria::{
    criteria_report, harmonic_majorant_at, radial_log_integral, schwarz_sandwich_check, AtomicSingular, Composite,
    CriteriaReport, Factor, InnerFunction, InnerModel, SandwichReport, Verdict,
};
pub use disk::{pseudo_hyperbolic, BoundaryPoint, MoebiusMap, UnitDiskPoint, BOUNDARY_TOL};
pub use finite::{FiniteBlaschke, PreimageSet};
pub use indestructibility::{
    certify_indestructible, default_grid, destructibility_probe, grid_from_rings, m1_residual, m2_residual,
    CertificateReport, CertificateVerdict, GridResidual, ProbeEntry, Residual, Source,
};
pub use infinite::{blaschke_sum, LogModulus, TruncatedBlaschke, ZeroSequenceRule};
pub use maximal::{solve_maximal, verify_maximal, CriticalSet, MaximalReport};
