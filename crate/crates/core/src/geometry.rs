//! Bergman metric tensor, Ricci form, the positive form `(n+1)T - Ric`,
//! vector lengths and the two arccos distance lower bounds.
//!
//! On the model domains all tensors are diagonal (products of rotation
//! invariant one-dimensional factors), and every entry is assembled
//! analytically from kernel jets; no nested numerical differentiation.

use nalgebra::DMatrix;

use crate::domain::{DomainSpec, Point};
use crate::error::{BergmanError, Result};
use crate::kernel::{eval_kernel_jet_internal, Truncation};
use crate::C64;

/// Which metric tensor an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Bergman,
    Tilde,
}

/// Point sample of the metric data: Bergman tensor `T`, its determinant
/// `g`, the Ricci tensor and `Ttilde = (n+1) T - Ric`.
#[derive(Debug, Clone)]
pub struct MetricSample {
    pub z: Point,
    pub t: DMatrix<C64>,
    pub g: f64,
    pub ric: DMatrix<C64>,
    pub ttilde: DMatrix<C64>,
}

impl MetricSample {
    pub fn tensor(&self, kind: MetricKind) -> &DMatrix<C64> {
        match kind {
            MetricKind::Bergman => &self.t,
            MetricKind::Tilde => &self.ttilde,
        }
    }
}

/// Diagonal metric data of a one-dimensional factor, with holomorphic
/// z-derivatives of the two tensors (for path-energy gradients).
#[derive(Debug, Clone, Copy)]
pub(crate) struct FactorScalars {
    pub t: f64,
    pub ric: f64,
    pub ttilde: f64,
    pub dt_dz: C64,
    pub dttilde_dz: C64,
}

impl FactorScalars {
    pub fn metric(&self, kind: MetricKind) -> f64 {
        match kind {
            MetricKind::Bergman => self.t,
            MetricKind::Tilde => self.ttilde,
        }
    }

    pub fn metric_grad(&self, kind: MetricKind) -> C64 {
        match kind {
            MetricKind::Bergman => self.dt_dz,
            MetricKind::Tilde => self.dttilde_dz,
        }
    }
}

/// All metric scalars of a 1-D factor at a diagonal point, from jets up
/// to order (3,2).
///
/// With `P = K K_{11} - K_{10} K_{01}` (numeric jet orders `(a,b)`):
/// `T = P/K^2`, `Ttilde = (P P_{11} - P_1 P_{1b})/P^2` (the mixed log
/// derivative of `P`), and for one factor `Ric = 2T - Ttilde`.
pub(crate) fn factor_scalars(factor: &DomainSpec, z: C64, trunc: &Truncation) -> Result<FactorScalars> {
    let zp = Point::scalar(z);
    let jet = eval_kernel_jet_internal(factor, &zp, &zp, (3, 2), trunc)?;
    let d = |a: usize, b: usize| jet.scalar_entry(a, b);

    let k = d(0, 0);
    let p = k * d(1, 1) - d(1, 0) * d(0, 1);
    let p1 = k * d(2, 1) - d(2, 0) * d(0, 1);
    let p1b = k * d(1, 2) - d(1, 0) * d(0, 2);
    let p11b = k * d(2, 2) - d(2, 0) * d(0, 2);

    let t = (p / (k * k)).re;
    if !(t > 0.0) {
        return Err(BergmanError::NonPositiveMetric(t));
    }
    let ttilde_c = (p * p11b - p1 * p1b) / (p * p);
    let ttilde = ttilde_c.re;
    let ric = 2.0 * t - ttilde;

    // dT/dz = P_1/K^2 - 2 K_{10} P / K^3
    let dt_dz = p1 / (k * k) - 2.0 * d(1, 0) * p / (k * k * k);

    // dTtilde/dz = [d(P P_{11}) - d(P_1 P_{1b})]/P^2 - 2 Ttilde P_1 / P
    let dp11b = d(1, 0) * d(2, 2) + k * d(3, 2) - d(3, 0) * d(0, 2) - d(2, 0) * d(1, 2);
    let dp1 = d(1, 0) * d(2, 1) + k * d(3, 1) - d(3, 0) * d(0, 1) - d(2, 0) * d(1, 1);
    let dttilde_dz =
        (p1 * p11b + p * dp11b - dp1 * p1b - p1 * p11b) / (p * p) - 2.0 * ttilde_c * p1 / p;

    Ok(FactorScalars {
        t,
        ric,
        ttilde,
        dt_dz,
        dttilde_dz,
    })
}

fn assemble_sample(domain: &DomainSpec, z: &Point, trunc: &Truncation) -> Result<MetricSample> {
    domain.require_member(z, "z")?;
    let n = domain.dimension();
    let mut t = DMatrix::<C64>::zeros(n, n);
    let mut ric = DMatrix::<C64>::zeros(n, n);
    let mut ttilde = DMatrix::<C64>::zeros(n, n);
    let mut g = 1.0;
    let mut factor_t = Vec::with_capacity(n);
    let mut factor_ric = Vec::with_capacity(n);
    for (i, f) in domain.factors().iter().enumerate() {
        let s = factor_scalars(f, z.coords[i], trunc)?;
        factor_t.push(s.t);
        factor_ric.push(s.ric);
        g *= s.t;
    }
    // Ric of a product is the direct sum of the factor Ricci scalars;
    // Ttilde picks up the product dimension through (n+1)T - Ric.
    for i in 0..n {
        t[(i, i)] = C64::new(factor_t[i], 0.0);
        ric[(i, i)] = C64::new(factor_ric[i], 0.0);
        ttilde[(i, i)] = C64::new((n as f64 + 1.0) * factor_t[i] - factor_ric[i], 0.0);
    }
    Ok(MetricSample {
        z: z.clone(),
        t,
        g,
        ric,
        ttilde,
    })
}

/// Bergman metric tensor and determinant at `z`.
pub fn bergman_metric(domain: &DomainSpec, z: &Point, trunc: &Truncation) -> Result<MetricSample> {
    assemble_sample(domain, z, trunc)
}

/// Ricci tensor `-ddbar log g` at `z`, assembled analytically from jets.
pub fn ricci_tensor(domain: &DomainSpec, z: &Point, trunc: &Truncation) -> Result<MetricSample> {
    assemble_sample(domain, z, trunc)
}

/// The tensor `Ttilde = (n+1) T - Ric` at `z`.
pub fn tilde_metric(domain: &DomainSpec, z: &Point, trunc: &Truncation) -> Result<MetricSample> {
    assemble_sample(domain, z, trunc)
}

/// Direct expansion of `ddbar log(K^2 T)` for one-dimensional domains from
/// the jet entries, with denominator `D = K K_{11} - K_{10} K_{01}`. Used
/// to cross-check the assembly route.
///
/// The first term of the expansion carries a minus sign (the product-rule
/// expansion of `(D D_{11} - D_1 D_{1b})/D^2`).
pub fn tilde_direct_1d(domain: &DomainSpec, z: &Point, trunc: &Truncation) -> Result<f64> {
    if domain.dimension() != 1 {
        return Err(BergmanError::InvalidArgument(
            "tilde_direct_1d requires a one-dimensional domain".into(),
        ));
    }
    domain.require_member(z, "z")?;
    let jet = eval_kernel_jet_internal(domain, z, z, (2, 2), trunc)?;
    let d = |a: usize, b: usize| jet.scalar_entry(a, b);
    let (k, k1, kb) = (d(0, 0), d(1, 0), d(0, 1));
    let (k11, kbb, k1b) = (d(2, 0), d(0, 2), d(1, 1));
    let (k11b, k1bb, k11bb) = (d(2, 1), d(1, 2), d(2, 2));
    let dd = k * k1b - k1 * kb;
    let v = -k1 * kb * k11 * kbb / (dd * dd) - k11 * kbb / dd
        + k * kb * k1bb * k11 / (dd * dd)
        + k * k1 * k11b * kbb / (dd * dd)
        - k * k * k1bb * k11b / (dd * dd)
        + k * k11bb / dd;
    Ok(v.re)
}

/// Length of the vector `X` in the requested metric at the sample point:
/// `sqrt(sum_ij tensor_ij X_i conj(X_j))`.
pub fn vector_length(sample: &MetricSample, x: &[C64], kind: MetricKind) -> f64 {
    let tensor = sample.tensor(kind);
    let n = tensor.nrows();
    assert_eq!(x.len(), n);
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            s += tensor[(i, j)] * x[i] * x[j].conj();
        }
    }
    s.re.max(0.0).sqrt()
}

fn clamped_arccos(ratio: f64) -> f64 {
    if ratio > 1.0 {
        log::debug!("arccos argument {ratio:.17} clamped to 1");
    }
    ratio.clamp(0.0, 1.0).acos()
}

/// Skwarczynski lower bound for the Bergman distance:
/// `arccos(|K(z,zeta)| / sqrt(K(z,z) K(zeta,zeta)))`, in `[0, pi/2]`.
pub fn skwarczynski_bound(
    domain: &DomainSpec,
    z: &Point,
    zeta: &Point,
    trunc: &Truncation,
) -> Result<f64> {
    let kzw = eval_kernel_jet_internal(domain, z, zeta, (0, 0), trunc)?.value();
    let kzz = eval_kernel_jet_internal(domain, z, z, (0, 0), trunc)?.value().re;
    let kww = eval_kernel_jet_internal(domain, zeta, zeta, (0, 0), trunc)?.value().re;
    Ok(clamped_arccos(kzw.norm() / (kzz * kww).sqrt()))
}

/// Matrix `N_ij = K d^2 K/dz_i dzetabar_j - dK/dz_i dK/dzetabar_j` at the
/// pair `(z, zeta)`: the entries of `K^2 ddbar log K` as polynomials in
/// jets, well defined where `K = 0`.
pub(crate) fn defect_matrix(
    domain: &DomainSpec,
    z: &Point,
    zeta: &Point,
    trunc: &Truncation,
) -> Result<DMatrix<C64>> {
    let n = domain.dimension();
    let jet = eval_kernel_jet_internal(domain, z, zeta, (1, 1), trunc)?;
    let k = jet.value();
    let unit = |i: usize| {
        let mut v = vec![0usize; n];
        v[i] = 1;
        v
    };
    let zero = vec![0usize; n];
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let kij = jet.entry(&unit(i), &unit(j));
            let ki = jet.entry(&unit(i), &zero);
            let kj = jet.entry(&zero, &unit(j));
            m[(i, j)] = k * kij - ki * kj;
        }
    }
    Ok(m)
}

pub(crate) fn defect_det(
    domain: &DomainSpec,
    z: &Point,
    zeta: &Point,
    trunc: &Truncation,
) -> Result<C64> {
    Ok(defect_matrix(domain, z, zeta, trunc)?.determinant())
}

/// Lower bound for the `Ttilde` distance:
/// `arccos(|det N(z,zeta)| / sqrt(det N(z,z) det N(zeta,zeta)))` where
/// `det N(x,x) = K(x,x)^{2n} g(x)`.
pub fn tilde_bound(domain: &DomainSpec, z: &Point, zeta: &Point, trunc: &Truncation) -> Result<f64> {
    let num = defect_det(domain, z, zeta, trunc)?.norm();
    let dz = defect_det(domain, z, z, trunc)?.re;
    let dw = defect_det(domain, zeta, zeta, trunc)?.re;
    Ok(clamped_arccos(num / (dz * dw).sqrt()))
}

/// Rectangular sampling box, applied per coordinate.
#[derive(Debug, Clone, Copy)]
pub struct SamplingBox {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

/// Grid estimate of the infimum of `Ric(X,X)/T(X,X)` over the box: the
/// hypothesis constant `c` of the comparison theorems. For the diagonal
/// tensors of the model domains the generalized Rayleigh quotient is
/// minimized over coordinate directions.
pub fn ricci_ratio_min(
    domain: &DomainSpec,
    region: &SamplingBox,
    grid: (usize, usize),
    trunc: &Truncation,
) -> Result<f64> {
    if grid.0 < 2 || grid.1 < 2 {
        return Err(BergmanError::InvalidArgument("grid must be at least 2 x 2".into()));
    }
    let n = domain.dimension();
    let mut min = f64::INFINITY;
    for a in 0..grid.0 {
        for b in 0..grid.1 {
            let re = region.re.0 + (region.re.1 - region.re.0) * a as f64 / (grid.0 - 1) as f64;
            let im = region.im.0 + (region.im.1 - region.im.0) * b as f64 / (grid.1 - 1) as f64;
            let z = Point::new(vec![C64::new(re, im); n]);
            domain.require_member(&z, "grid point")?;
            for (i, f) in domain.factors().iter().enumerate() {
                let s = factor_scalars(f, z.coords[i], trunc)?;
                min = min.min(s.ric / s.t);
            }
        }
    }
    Ok(min)
}
