//! Bergman kernel evaluation with certified series truncation.
//!
//! For the disk and the annulus the kernel is a univariate analytic
//! function of `t = z * conj(zeta)`; derivative jets in `(z, conj(zeta))`
//! are assembled from `d^m/dt^m` by the bilinear chain rule. Product
//! kernels factor coordinatewise.

use crate::domain::{DomainSpec, Point};
use crate::error::{BergmanError, Result};
use crate::C64;

/// Series truncation policy. A returned evaluation certifies that the
/// geometric tail bound of the dropped terms is below `tol_abs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub tol_abs: f64,
    pub max_terms: usize,
    pub boundary_margin: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            tol_abs: 1e-14,
            max_terms: 1_000_000,
            boundary_margin: 1e-9,
        }
    }
}

/// Echo of the truncation policy plus what the evaluation actually used.
#[derive(Debug, Clone, Copy)]
pub struct TruncationCertificate {
    pub trunc: Truncation,
    pub terms_used: usize,
    pub tail_bound: f64,
}

/// `log(r^2)` computed as `2 ln r`, so it stays finite when `r^2`
/// underflows (r down to the double-precision floor).
pub fn log_r2(r: f64) -> f64 {
    2.0 * r.ln()
}

const FACTORIALS: [f64; 8] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0];

/// Derivatives `k^(m)(t)`, m = 0..=max_m, of the annulus kernel
/// `k(t) = -1/(pi t log r^2)
///        + (1/pi) sum_j [ r^{2+2j}/(t - r^{2+2j})^2 + r^{2j}/(1 - r^{2j} t)^2 ]`.
///
/// Stops as soon as the geometric majorant of the dropped tail is below
/// `trunc.tol_abs`, and reports that bound in the certificate.
pub(crate) fn annulus_k_derivs(
    t: C64,
    r: f64,
    max_m: usize,
    trunc: &Truncation,
) -> Result<(Vec<C64>, TruncationCertificate)> {
    assert!(max_m + 2 < FACTORIALS.len());
    let margin = trunc.boundary_margin;
    let r2 = r * r;
    let t_abs = t.norm();
    if (t - C64::new(1.0, 0.0)).norm() < margin || (t - C64::new(r2, 0.0)).norm() < margin {
        return Err(BergmanError::NearSingularLocus { t_abs, margin });
    }

    let lr2 = log_r2(r);
    let mut out = vec![C64::new(0.0, 0.0); max_m + 1];
    // log term: -1/(pi lr2) * (-1)^m m! / t^{m+1}
    let mut tpow = t; // t^{m+1}
    for (m, o) in out.iter_mut().enumerate() {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        *o += -1.0 / (std::f64::consts::PI * lr2) * sign * FACTORIALS[m] / tpow;
        tpow *= t;
    }

    let mut aj = r2; // r^{2+2j}
    let mut bj = 1.0; // r^{2j}
    let mut terms = 0usize;
    let mut tail = f64::INFINITY;
    let mut j = 0usize;
    loop {
        if terms >= trunc.max_terms {
            return Err(BergmanError::SeriesTruncationFailure {
                tail,
                tol: trunc.tol_abs,
                terms,
            });
        }
        for (m, o) in out.iter_mut().enumerate() {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let da = (t - aj).powi(-(m as i32) - 2);
            let db = (C64::new(1.0, 0.0) - bj * t).powi(-(m as i32) - 2);
            let fac = FACTORIALS[m + 1] / std::f64::consts::PI;
            *o += fac * (sign * aj * da + bj.powi(m as i32 + 1) * db);
        }
        terms += 1;
        // tail after the terms up to index j: a_{j+1} = aj*r^2, b_{j+1} = bj*r^2
        let an = aj * r2;
        let bn = bj * r2;
        tail = 0.0;
        let geo = 1.0 / (1.0 - r2);
        for m in 0..=max_m {
            let da = t_abs - an; // > 0 since |t| > r^2 >= a_{j+1}
            let db = 1.0 - bn * t_abs;
            let bound = FACTORIALS[m + 1] / std::f64::consts::PI
                * geo
                * (an / da.powi(m as i32 + 2) + bn.powi(m as i32 + 1) / db.powi(m as i32 + 2));
            tail = tail.max(bound);
        }
        if tail < trunc.tol_abs {
            break;
        }
        aj = an;
        bj = bn;
        j += 1;
        let _ = j;
    }

    Ok((
        out,
        TruncationCertificate {
            trunc: *trunc,
            terms_used: terms,
            tail_bound: tail,
        },
    ))
}

/// Derivatives of the disk kernel `k(t) = 1/(pi (1-t)^2)`:
/// `k^(m)(t) = (m+1)!/(pi (1-t)^{m+2})`. Closed form, zero tail.
pub(crate) fn disk_k_derivs(
    t: C64,
    max_m: usize,
    trunc: &Truncation,
) -> Result<(Vec<C64>, TruncationCertificate)> {
    assert!(max_m + 2 < FACTORIALS.len());
    let one = C64::new(1.0, 0.0);
    if (one - t).norm() < trunc.boundary_margin {
        return Err(BergmanError::NearSingularLocus {
            t_abs: t.norm(),
            margin: trunc.boundary_margin,
        });
    }
    let out = (0..=max_m)
        .map(|m| FACTORIALS[m + 1] / std::f64::consts::PI * (one - t).powi(-(m as i32) - 2))
        .collect();
    Ok((
        out,
        TruncationCertificate {
            trunc: *trunc,
            terms_used: 1,
            tail_bound: 0.0,
        },
    ))
}

fn falling(a: usize, i: usize) -> f64 {
    (0..i).map(|q| (a - q) as f64).product()
}

fn binom(b: usize, i: usize) -> f64 {
    FACTORIALS[b] / (FACTORIALS[i] * FACTORIALS[b - i])
}

/// Jet table for one coordinate: entries `D(a,b) = d^a/dz^a d^b/dzbar^b K`
/// assembled from the univariate derivatives by
/// `D(a,b) = sum_i C(b,i) (a)_i w^{a-i} z^{b-i} k^{(a+b-i)}(t)`, `w = conj(zeta)`.
#[derive(Debug, Clone)]
pub struct FactorJet {
    table: Vec<Vec<C64>>,
}

impl FactorJet {
    pub fn entry(&self, a: usize, b: usize) -> C64 {
        self.table[a][b]
    }

    pub fn order(&self) -> (usize, usize) {
        (self.table.len() - 1, self.table[0].len() - 1)
    }
}

pub(crate) fn factor_jet(
    factor: &DomainSpec,
    z: C64,
    zeta: C64,
    amax: usize,
    bmax: usize,
    trunc: &Truncation,
) -> Result<(FactorJet, TruncationCertificate)> {
    let w = zeta.conj();
    let t = z * w;
    let (kd, cert) = match factor {
        DomainSpec::UnitDisk => disk_k_derivs(t, amax + bmax, trunc)?,
        DomainSpec::Annulus { r } => annulus_k_derivs(t, *r, amax + bmax, trunc)?,
        DomainSpec::Product { .. } => unreachable!("factors are one-dimensional"),
    };
    let mut table = vec![vec![C64::new(0.0, 0.0); bmax + 1]; amax + 1];
    for (a, row) in table.iter_mut().enumerate() {
        for (b, e) in row.iter_mut().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..=a.min(b) {
                s += binom(b, i) * falling(a, i) * w.powu((a - i) as u32) * z.powu((b - i) as u32)
                    * kd[a + b - i];
            }
            *e = s;
        }
    }
    Ok((FactorJet { table }, cert))
}

/// Table of mixed kernel derivatives at a pair of points, per coordinate,
/// with the truncation certificate of the underlying series evaluations.
#[derive(Debug, Clone)]
pub struct KernelJet {
    pub domain: DomainSpec,
    pub z: Point,
    pub zeta: Point,
    factors: Vec<FactorJet>,
    pub certificate: TruncationCertificate,
}

impl KernelJet {
    /// Entry for multi-orders `a`, `b` (one order per coordinate):
    /// the product over factors of the per-factor entries.
    pub fn entry(&self, a: &[usize], b: &[usize]) -> C64 {
        assert_eq!(a.len(), self.factors.len());
        assert_eq!(b.len(), self.factors.len());
        self.factors
            .iter()
            .zip(a.iter().zip(b.iter()))
            .map(|(f, (&ai, &bi))| f.entry(ai, bi))
            .product()
    }

    /// Entry of a one-dimensional jet.
    pub fn scalar_entry(&self, a: usize, b: usize) -> C64 {
        debug_assert_eq!(self.factors.len(), 1);
        self.factors[0].entry(a, b)
    }

    /// The kernel value `K(z, zeta)` itself.
    pub fn value(&self) -> C64 {
        self.factors.iter().map(|f| f.entry(0, 0)).product()
    }

    pub fn factor(&self, i: usize) -> &FactorJet {
        &self.factors[i]
    }
}

/// Evaluate the kernel jet up to derivative order `order = (a, b)` per
/// coordinate (both at most 2 on the public surface).
pub fn eval_kernel_jet(
    domain: &DomainSpec,
    z: &Point,
    zeta: &Point,
    order: (usize, usize),
    trunc: &Truncation,
) -> Result<KernelJet> {
    if order.0 > 2 || order.1 > 2 {
        return Err(BergmanError::InvalidArgument(format!(
            "jet orders are capped at 2 per coordinate, got {:?}",
            order
        )));
    }
    eval_kernel_jet_internal(domain, z, zeta, order, trunc)
}

/// Internal variant without the public order cap (geometry needs third
/// z-derivatives of the metric potential).
pub(crate) fn eval_kernel_jet_internal(
    domain: &DomainSpec,
    z: &Point,
    zeta: &Point,
    order: (usize, usize),
    trunc: &Truncation,
) -> Result<KernelJet> {
    domain.require_member(z, "z")?;
    domain.require_member(zeta, "zeta")?;
    let mut factors = Vec::with_capacity(domain.dimension());
    let mut terms = 0usize;
    let mut tail: f64 = 0.0;
    for (i, f) in domain.factors().iter().enumerate() {
        let (fj, cert) = factor_jet(f, z.coords[i], zeta.coords[i], order.0, order.1, trunc)?;
        terms += cert.terms_used;
        tail = tail.max(cert.tail_bound);
        factors.push(fj);
    }
    Ok(KernelJet {
        domain: domain.clone(),
        z: z.clone(),
        zeta: zeta.clone(),
        factors,
        certificate: TruncationCertificate {
            trunc: *trunc,
            terms_used: terms,
            tail_bound: tail,
        },
    })
}

/// Independent route to the annulus kernel: the orthonormal Laurent basis
/// sum `K = sum_k t^k / c_k` with squared norms
/// `c_k = pi (1 - r^{2k+2})/(k+1)` for `k != -1` and `c_{-1} = 2 pi log(1/r)`.
///
/// Shares no code with [`eval_kernel_jet`]; used as a cross-validation
/// oracle for the series route.
pub fn laurent_kernel_oracle(r: f64, z: &Point, zeta: &Point, trunc: &Truncation) -> Result<C64> {
    let domain = DomainSpec::annulus(r)?;
    domain.require_member(z, "z")?;
    domain.require_member(zeta, "zeta")?;
    let t = z.as_scalar() * zeta.as_scalar().conj();
    let t_abs = t.norm();
    let pi = std::f64::consts::PI;

    // k = -1 term: c_{-1} = 2 pi log(1/r) = -pi log(r^2)
    let mut sum = 1.0 / (-pi * log_r2(r)) / t;
    let mut terms = 1usize;

    // k >= 0: (k+1) t^k / (pi (1 - r^{2k+2}))
    let r2 = r * r;
    let mut tk = C64::new(1.0, 0.0);
    let mut r2k2 = r2;
    let mut k = 0usize;
    let mut tail;
    loop {
        sum += (k as f64 + 1.0) * tk / (pi * (1.0 - r2k2));
        terms += 1;
        tk *= t;
        r2k2 *= r2;
        // tail: sum_{j>k} (j+1)|t|^j <= |t|^{k+1} [(k+2)/(1-|t|) + |t|/(1-|t|)^2]
        let x = t_abs;
        tail = tk.norm() * ((k as f64 + 2.0) / (1.0 - x) + x / (1.0 - x).powi(2))
            / (pi * (1.0 - r2));
        if tail < 0.5 * trunc.tol_abs {
            break;
        }
        if terms >= trunc.max_terms {
            return Err(BergmanError::SeriesTruncationFailure {
                tail,
                tol: trunc.tol_abs,
                terms,
            });
        }
        k += 1;
    }

    // k = -m-2, m >= 0: (m+1) r^{2(m+1)} / (pi (1 - r^{2(m+1)})) * t^{-m-2}
    let x = r2 / t_abs; // < 1 since |t| > r^2
    let mut r2m2 = r2; // r^{2(m+1)}
    let mut tneg = t.powi(-2); // t^{-m-2}
    let mut m = 0usize;
    loop {
        sum += (m as f64 + 1.0) * r2m2 / (pi * (1.0 - r2m2)) * tneg;
        terms += 1;
        r2m2 *= r2;
        tneg /= t;
        // tail: sum_{j>m} (j+1) x^{j+1} / |t| <= x^{m+2} [(m+3)/(1-x) + x/(1-x)^2] / |t|
        let tail_neg = x.powi(m as i32 + 2) * ((m as f64 + 3.0) / (1.0 - x) + x / (1.0 - x).powi(2))
            / (pi * (1.0 - r2) * t_abs);
        if tail_neg < 0.5 * trunc.tol_abs {
            break;
        }
        if terms >= trunc.max_terms {
            return Err(BergmanError::SeriesTruncationFailure {
                tail: tail_neg,
                tol: trunc.tol_abs,
                terms,
            });
        }
        m += 1;
    }

    Ok(sum)
}

/// Which of the three smallness inequalities hold for the pair `(r, eps)`:
/// `|1/log r^2| < eps^2`, `|r log r^2| < eps`, `r^2/(1-r^2) < eps^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmallnessReport {
    pub inv_log_below_eps_sq: bool,
    pub r_log_below_eps: bool,
    pub radius_ratio_below_eps_sq: bool,
    pub all: bool,
}

pub fn check_smallness(r: f64, eps: f64) -> Result<SmallnessReport> {
    if !(r > 0.0 && r < 1.0) || !(eps > 0.0 && eps < 1.0) {
        return Err(BergmanError::InvalidArgument(format!(
            "need 0 < r < 1 and 0 < eps < 1, got r = {r}, eps = {eps}"
        )));
    }
    let lr2 = log_r2(r);
    let a = (1.0 / lr2).abs() < eps * eps;
    let b = (r * lr2).abs() < eps;
    let c = r * r / (1.0 - r * r) < eps * eps;
    Ok(SmallnessReport {
        inv_log_below_eps_sq: a,
        r_log_below_eps: b,
        radius_ratio_below_eps_sq: c,
        all: a && b && c,
    })
}

/// True iff `z` lies in the open domain.
pub fn admissible_point(domain: &DomainSpec, z: &Point) -> bool {
    domain.contains(z)
}
