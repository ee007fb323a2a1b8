//! Shared helpers for the integration suites: random admissible points
//! and finite-difference oracles, independent of the jet assembly they
//! validate.

use bergman_core::{DomainSpec, Point, C64};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random point of a 1-D factor, kept away from the boundary circles.
pub fn random_factor_point(factor: &DomainSpec, rng: &mut ChaCha8Rng) -> C64 {
    let (lo, hi) = match factor {
        DomainSpec::UnitDisk => (0.0, 0.93),
        DomainSpec::Annulus { r } => (r + 0.05 * (1.0 - r), 0.93),
        DomainSpec::Product { .. } => unreachable!(),
    };
    let rho = rng.gen_range(lo..hi);
    let th = rng.gen_range(0.0..std::f64::consts::TAU);
    C64::from_polar(rho, th)
}

pub fn random_point(domain: &DomainSpec, rng: &mut ChaCha8Rng) -> Point {
    Point::new(
        domain
            .factors()
            .iter()
            .map(|f| random_factor_point(f, rng))
            .collect(),
    )
}

/// Central difference of a complex-valued function along a real step in
/// the given complex direction.
pub fn central_diff<F: Fn(C64) -> C64>(f: F, z: C64, dir: C64, h: f64) -> C64 {
    (f(z + dir * h) - f(z - dir * h)) / (2.0 * h * dir)
}

/// Second mixed derivative d^2/dz dzbar of a real-valued function by the
/// 5-point Laplacian stencil (1/4 of the Laplacian).
pub fn mixed_second_diff<F: Fn(C64) -> f64>(f: F, z: C64, h: f64) -> f64 {
    let i = C64::new(0.0, 1.0);
    (f(z + h) + f(z - h) + f(z + i * h) + f(z - i * h) - 4.0 * f(z)) / (4.0 * h * h)
}

/// Relative error with an absolute floor.
pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}
