//! Finite-dimensional verification of the matrix identities behind the
//! Grassmannian/Pluecker isometry argument: the inverse identity
//! `I - Z*(I+ZZ*)^{-1} Z = (I+Z*Z)^{-1}`, the Cauchy-Binet expansion of
//! `det(I+ZZ*)`, and the Fubini-Study pullback metric.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{BergmanError, Result};
use crate::C64;

/// A local Grassmannian coordinate: an `n x m` complex matrix with a
/// reproducible seed. Entries stay bounded by 10 in magnitude.
#[derive(Debug, Clone)]
pub struct MatrixSample {
    pub z: DMatrix<C64>,
    pub seed: u64,
}

impl MatrixSample {
    /// Random sample with entries uniform in the unit square, scaled by
    /// `scale` (clamped so magnitudes stay at most 10).
    pub fn random(n: usize, m: usize, seed: u64, scale: f64) -> Self {
        let scale = scale.min(10.0 / std::f64::consts::SQRT_2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = DMatrix::from_fn(n, m, |_, _| {
            C64::new(
                scale * rng.gen_range(-1.0..1.0),
                scale * rng.gen_range(-1.0..1.0),
            )
        });
        MatrixSample { z, seed }
    }
}

fn identity(n: usize) -> DMatrix<C64> {
    DMatrix::identity(n, n)
}

/// Max-norm residual of `(I - Z*(I+ZZ*)^{-1}Z)(I+Z*Z) - I`.
///
/// The identity is exact; the residual is pure roundoff and scales with
/// the squared condition number of `I + ZZ*`.
pub fn grassmann_inverse_identity(z: &DMatrix<C64>) -> f64 {
    let n = z.nrows();
    let m = z.ncols();
    let zst = z.adjoint();
    let a = identity(n) + z * &zst;
    let a_inv = a.try_inverse().expect("I + ZZ* is positive definite");
    let lhs = (identity(m) - &zst * a_inv * z) * (identity(m) + &zst * z) - identity(m);
    lhs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Result of the Cauchy-Binet comparison.
#[derive(Debug, Clone, Copy)]
pub struct CauchyBinet {
    pub det_side: f64,
    pub minor_side: f64,
    pub residual: f64,
}

/// Compare `det(I+ZZ*)` with `1 + sum |minor|^2` over all non-leading
/// n-column minors of `(I_n, Z)` (the squared Pluecker coordinates).
pub fn cauchy_binet_check(z: &DMatrix<C64>) -> Result<CauchyBinet> {
    let n = z.nrows();
    let m = z.ncols();
    if n > 4 || m > 9 {
        return Err(BergmanError::TooLarge(format!(
            "cauchy_binet_check caps at n <= 4, m <= 9 (got {n} x {m})"
        )));
    }
    let zst = z.adjoint();
    let det_side = (identity(n) + z * zst).determinant().re;

    // all n-column minors of (I_n, Z); the leading identity minor gives 1
    let total = n + m;
    let mut minor_side = 0.0;
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let mut minor = DMatrix::<C64>::zeros(n, n);
        for (col, &j) in subset.iter().enumerate() {
            for row in 0..n {
                minor[(row, col)] = if j < n {
                    if row == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
                } else {
                    z[(row, j - n)]
                };
            }
        }
        minor_side += minor.determinant().norm_sqr();

        // next n-combination of {0..total-1} in lexicographic order
        let mut i = n;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if subset[i] < i + total - n {
                subset[i] += 1;
                for k in i + 1..n {
                    subset[k] = subset[k - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }

    let residual = (det_side - minor_side).abs() / det_side;
    Ok(CauchyBinet {
        det_side,
        minor_side,
        residual,
    })
}

fn log_det_ipzz(z: &DMatrix<C64>) -> f64 {
    let n = z.nrows();
    (identity(n) + z * z.adjoint()).determinant().re.ln()
}

/// Compare the mixed second derivative of `phi(Z) = log det(I+ZZ*)` in the
/// direction pair `(E, conj F)` -- by central differences with complex
/// polarization -- against `Tr((I+ZZ*)^{-1} E (I+Z*Z)^{-1} F*)`. Returns
/// the relative mismatch.
pub fn fs_pullback_fd_check(
    z: &DMatrix<C64>,
    e: &DMatrix<C64>,
    f: &DMatrix<C64>,
    h: f64,
) -> Result<f64> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(BergmanError::InvalidArgument(format!(
            "step h must lie in [1e-6, 1e-3], got {h}"
        )));
    }
    let n = z.nrows();
    let m = z.ncols();

    // q(V) = d^2/ds dsbar phi(Z + sV) at s = 0, 4-point central stencil
    let q = |v: &DMatrix<C64>| -> f64 {
        let phi0 = log_det_ipzz(z);
        let re = log_det_ipzz(&(z + v * C64::new(h, 0.0))) + log_det_ipzz(&(z - v * C64::new(h, 0.0)));
        let im = log_det_ipzz(&(z + v * C64::new(0.0, h))) + log_det_ipzz(&(z - v * C64::new(0.0, h)));
        (re + im - 4.0 * phi0) / (4.0 * h * h)
    };

    // sesquilinear polarization: g(E,F) = 1/4 sum_k i^k q(E + i^k F)
    let i = C64::new(0.0, 1.0);
    let mut fd = C64::new(0.0, 0.0);
    let mut ik = C64::new(1.0, 0.0);
    for _ in 0..4 {
        let v = e + f * ik;
        fd += ik * q(&v);
        ik *= i;
    }
    fd /= 4.0;

    let a = (identity(n) + z * z.adjoint())
        .try_inverse()
        .expect("I + ZZ* is positive definite");
    let b = (identity(m) + z.adjoint() * z)
        .try_inverse()
        .expect("I + Z*Z is positive definite");
    let analytic = (a * e * b * f.adjoint()).trace();

    Ok((fd - analytic).norm() / (1.0 + analytic.norm()))
}
