//! Numerical Bergman geometry on explicit planar domains.
//!
//! The library evaluates Bergman kernels and their derivative jets on the
//! unit disk, circular annuli and finite products of those, assembles the
//! Bergman metric, its Ricci form and the associated positive form
//! `(n+1)T − Ric`, integrates path lengths and optimizes two-point
//! distances with certified arccos lower bounds, and localizes zeros of
//! the kernel and of the representative-coordinate Jacobian.
//!
//! Everything is plain double precision. Series evaluations carry explicit
//! geometric tail bounds, so a returned value certifies its truncation
//! error. All operations are pure functions of immutable inputs and can be
//! called concurrently.

pub mod domain;
pub mod error;
pub mod geodesics;
pub mod geometry;
pub mod grassmann;
pub mod kernel;
pub mod loci;
pub mod quad;

pub use domain::{DomainSpec, Point};
pub use error::BergmanError;
pub use geodesics::{distance, paper_path_thm4, paper_path_thm5, path_length, DistanceOpts, DistanceResult, ParamPath, Segment};
pub use geometry::{
    bergman_metric, ricci_ratio_min, ricci_tensor, skwarczynski_bound, tilde_bound, tilde_metric,
    vector_length, MetricKind, MetricSample, SamplingBox,
};
pub use grassmann::{cauchy_binet_check, fs_pullback_fd_check, grassmann_inverse_identity, MatrixSample};
pub use kernel::{
    admissible_point, check_smallness, eval_kernel_jet, laurent_kernel_oracle, KernelJet,
    SmallnessReport, Truncation, TruncationCertificate,
};
pub use loci::{
    complex_roots_region, immersion_defect, kernel_zero_bisection, rank1_inclusion_check,
    rep_jacobian_det, representative_coordinates, thm5_reference_root, Rect, RepCoordResult,
    RootEvidence, RootReport,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
