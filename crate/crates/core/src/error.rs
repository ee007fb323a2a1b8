//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by kernel evaluation, geometry assembly, path
/// integration and root localization.
#[derive(Debug, Clone, Error)]
pub enum BergmanError {
    #[error("point is not in the domain: {0}")]
    NotInDomain(String),

    #[error("invalid domain parameter: {0}")]
    InvalidDomain(String),

    #[error("series tail bound {tail:.3e} not below {tol:.3e} within {terms} terms")]
    SeriesTruncationFailure { tail: f64, tol: f64, terms: usize },

    #[error("|t| = {t_abs:.6e} within {margin:.1e} of the singular locus {{1, r^2}}")]
    NearSingularLocus { t_abs: f64, margin: f64 },

    #[error("metric eigenvalue {0:.3e} is not positive (numerical breakdown)")]
    NonPositiveMetric(f64),

    #[error("quadrature did not converge: last refinement changed the value by {0:.3e}")]
    QuadratureNotConverged(f64),

    #[error("kernel vanishes at the base pair (|K| = {0:.3e}); representative coordinates undefined")]
    KernelZeroAtBasePair(f64),

    #[error("no sign change on the bracket: f({lo}) = {flo:.6e}, f({hi}) = {fhi:.6e}")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("contour passes through (or too close to) a zero after {0} grid perturbations")]
    ContourThroughZero(usize),

    #[error("Newton refinement diverged at {0}")]
    NewtonDiverged(String),

    #[error("no branch combination validated the closed-form root; best residual {0:.3e}")]
    BranchAmbiguity(f64),

    #[error("point is not on the kernel zero set: |K| = {0:.3e} exceeds tolerance {1:.3e}")]
    NotOnZeroSet(f64, f64),

    #[error("combinatorial cap exceeded: {0}")]
    TooLarge(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, BergmanError>;
