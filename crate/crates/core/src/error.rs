use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point outside the closed unit disk: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("refined root escaped to |z| = {modulus} (numerical breakdown)")]
    RootEscape { modulus: f64 },
    #[error("root refinement did not converge: residual {residual:e}")]
    Convergence { residual: f64 },
    #[error("no Taylor coefficient above tolerance up to index {max_index}")]
    SeriesResolution { max_index: usize },
    #[error("no probe point with nonvanishing value among {candidates} candidates")]
    Probe { candidates: usize },
    #[error("zero sequence sum exceeded cap {cap} (not a Blaschke sequence)")]
    Divergence { cap: f64 },
    #[error("truncation ceiling {ceiling} reached before log-modulus error {err:e} met tolerance {tol:e}")]
    Tol { ceiling: usize, err: f64, tol: f64 },
    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tol:e}")]
    Quad { estimate: f64, tol: f64 },
    #[error("invalid radius schedule: {0}")]
    Schedule(String),
    #[error("Schwarz sandwich violated: {0}")]
    SandwichViolation(String),
    #[error("target coincides with F(0); use the m2 condition instead")]
    TargetCoincides,
    #[error("empty parameter grid")]
    Grid,
    #[error("case hypothesis not met: {0}")]
    CaseMismatch(String),
    #[error("C(0) matches {count} preimage clusters of B (multiple zero of B - a at C(0))")]
    Multiplicity { count: usize },
    #[error("continuation step underflow at s = {s}")]
    ContinuationStall { s: f64 },
    #[error("critical points mismatch: matching distance {distance:e} exceeds {tol:e}")]
    CriticalMismatch { distance: f64, tol: f64 },
}
