//! Zero sets of the kernel and of the representative-coordinate Jacobian.
//!
//! Roots come with evidence: a certified sign bracket, a winding count
//! from contour integration of `f'/f`, or a Newton trace.

use nalgebra::DMatrix;

use crate::domain::{DomainSpec, Point};
use crate::error::{BergmanError, Result};
use crate::geometry::{self, defect_det, defect_matrix};
use crate::kernel::{eval_kernel_jet_internal, log_r2, Truncation};
use crate::C64;

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn center(&self) -> C64 {
        C64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }

    fn size(&self) -> f64 {
        (self.x1 - self.x0).min(self.y1 - self.y0)
    }
}

/// How a root was certified.
#[derive(Debug, Clone)]
pub enum RootEvidence {
    SignBracket {
        interval: (f64, f64),
        endpoint_values: (f64, f64),
    },
    Winding {
        cell: Rect,
        count: i32,
    },
    NewtonTrace {
        iterations: usize,
        final_step: f64,
    },
}

/// A localized zero. For bracketed one-dimensional searches `location`
/// holds the real parameter (s or xi) as a complex number with zero
/// imaginary part.
#[derive(Debug, Clone)]
pub struct RootReport {
    pub location: C64,
    pub residual: f64,
    pub evidence: RootEvidence,
}

/// Representative coordinates of `z` with base point `z0`, their Jacobian
/// determinant (the unnormalized mixed log-derivative determinant) and
/// the normalized Jacobian matrix, which is the identity at `z = z0`.
#[derive(Debug, Clone)]
pub struct RepCoordResult {
    pub z0: Point,
    pub z: Point,
    pub w: Vec<C64>,
    pub jac_det: C64,
    pub tinv_at_z0: DMatrix<C64>,
    pub w_jacobian: DMatrix<C64>,
}

/// Mixed log-derivative matrix `L_kj = d_{z_k} d_{zetabar_j} log K(z, zeta)`
/// at `zeta = z0`, equal to `N_kj / K^2`.
fn log_mixed_matrix(
    domain: &DomainSpec,
    z: &Point,
    z0: &Point,
    trunc: &Truncation,
) -> Result<DMatrix<C64>> {
    let k = eval_kernel_jet_internal(domain, z, z0, (0, 0), trunc)?.value();
    let n = defect_matrix(domain, z, z0, trunc)?;
    Ok(n / (k * k))
}

fn base_pair_kernel_checked(
    domain: &DomainSpec,
    z: &Point,
    z0: &Point,
    trunc: &Truncation,
) -> Result<C64> {
    let kz = eval_kernel_jet_internal(domain, z, z0, (0, 0), trunc)?.value();
    let kzz = eval_kernel_jet_internal(domain, z, z, (0, 0), trunc)?.value().re;
    let k00 = eval_kernel_jet_internal(domain, z0, z0, (0, 0), trunc)?.value().re;
    let scale = (kzz * k00).sqrt();
    if kz.norm() <= 1e-13 * scale {
        return Err(BergmanError::KernelZeroAtBasePair(kz.norm()));
    }
    Ok(kz)
}

/// Bergman representative coordinates
/// `w_i(z) = sum_j T^{jbar i}(z0) [d_{zetabar_j} K(z,zeta)/K(z,zeta)
///                                - d_{zetabar_j} K(zeta,zeta)/K(zeta,zeta)]`
/// at `zeta = z0`, from off-diagonal (0,1) jets.
pub fn representative_coordinates(
    domain: &DomainSpec,
    z0: &Point,
    z: &Point,
    trunc: &Truncation,
) -> Result<RepCoordResult> {
    domain.require_member(z0, "z0")?;
    domain.require_member(z, "z")?;
    let n = domain.dimension();
    let kz = base_pair_kernel_checked(domain, z, z0, trunc)?;

    let jet_z = eval_kernel_jet_internal(domain, z, z0, (0, 1), trunc)?;
    let jet_0 = eval_kernel_jet_internal(domain, z0, z0, (0, 1), trunc)?;
    let k00 = jet_0.value();

    let unit = |i: usize| {
        let mut v = vec![0usize; n];
        v[i] = 1;
        v
    };
    let zero = vec![0usize; n];

    let sample = geometry::bergman_metric(domain, z0, trunc)?;
    let tinv = sample
        .t
        .clone()
        .try_inverse()
        .ok_or(BergmanError::NonPositiveMetric(0.0))?;

    // log-derivative differences per coordinate
    let mut diffs = Vec::with_capacity(n);
    for j in 0..n {
        let a = jet_z.entry(&zero, &unit(j)) / kz;
        let b = jet_0.entry(&zero, &unit(j)) / k00;
        diffs.push(a - b);
    }
    // w_i = sum_j T^{jbar i} diff_j ; with S = T^{-1} as a matrix this is
    // w_i = sum_j S[j][i] diff_j
    let mut w = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        for j in 0..n {
            w[i] += tinv[(j, i)] * diffs[j];
        }
    }

    let l = log_mixed_matrix(domain, z, z0, trunc)?;
    let jac_det = l.determinant();
    // dw_i/dz_k = sum_j S[j][i] L[k][j]  =>  J = (L S)^T
    let w_jacobian = (&l * &tinv).transpose();

    Ok(RepCoordResult {
        z0: z0.clone(),
        z: z.clone(),
        w,
        jac_det,
        tinv_at_z0: tinv,
        w_jacobian,
    })
}

/// Determinant of the unnormalized representative Jacobian,
/// `det(d_{z_i} d_{zetabar_j} log K(z, zeta))` at `zeta = z0`.
pub fn rep_jacobian_det(domain: &DomainSpec, z0: &Point, z: &Point, trunc: &Truncation) -> Result<C64> {
    domain.require_member(z0, "z0")?;
    domain.require_member(z, "z")?;
    base_pair_kernel_checked(domain, z, z0, trunc)?;
    Ok(log_mixed_matrix(domain, z, z0, trunc)?.determinant())
}

/// The immersion defect `det(K dzdzetabar K - dz K dzetabar K)` at
/// `(z, z0)`: a polynomial in jets, well defined where `K = 0`. For one
/// dimension this is `K K_{11} - K_{10} K_{01}`.
pub fn immersion_defect(domain: &DomainSpec, z0: &Point, z: &Point, trunc: &Truncation) -> Result<C64> {
    domain.require_member(z0, "z0")?;
    domain.require_member(z, "z")?;
    defect_det(domain, z, z0, trunc)
}

/// Locate the kernel zero on the paper's real bracket: `z0 = sigma/sqrt L`,
/// `zeta(s) = -1/(s sqrt L)`, `K(z0, zeta(s))` real with opposite signs at
/// the bracket endpoints; bisection refines `s` to 1e-13.
pub fn kernel_zero_bisection(
    r: f64,
    z0_scale: f64,
    s_range: (f64, f64),
    trunc: &Truncation,
) -> Result<RootReport> {
    let domain = DomainSpec::annulus(r)?;
    let l = log_r2(r).abs();
    let z0 = Point::from(z0_scale / l.sqrt());
    domain.require_member(&z0, "z0")?;
    let f = |s: f64| -> Result<f64> {
        let zeta = Point::from(-1.0 / (s * l.sqrt()));
        domain.require_member(&zeta, "zeta(s)")?;
        let k = eval_kernel_jet_internal(&domain, &z0, &zeta, (0, 0), trunc)?.value();
        debug_assert!(k.im.abs() <= 1e-14 * (1.0 + k.re.abs()), "kernel not real on bracket");
        Ok(k.re)
    };
    let (mut lo, mut hi) = s_range;
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(BergmanError::NoSignChange { lo, hi, flo, fhi });
    }
    let (mut vlo, mut vhi) = (flo, fhi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm > 0.0 {
            lo = mid;
            vlo = fm;
        } else {
            hi = mid;
            vhi = fm;
        }
        if hi - lo <= 1e-13 * lo.abs().max(1.0) {
            break;
        }
    }
    let s = 0.5 * (lo + hi);
    let residual = f(s)?.abs();
    Ok(RootReport {
        location: C64::new(s, 0.0),
        residual,
        evidence: RootEvidence::SignBracket {
            interval: (lo, hi),
            endpoint_values: (vlo, vhi),
        },
    })
}

/// The point `zeta(s) = -1/(s sqrt|log r^2|)` of the bisection bracket.
pub fn thm4_zero_point(r: f64, s: f64) -> Point {
    Point::from(-1.0 / (s * log_r2(r).abs().sqrt()))
}

fn winding_on_rect<F>(f: &mut F, rect: &Rect, nside: usize, h: f64) -> Result<C64>
where
    F: FnMut(C64) -> Result<C64>,
{
    let mut pts = Vec::with_capacity(4 * nside);
    for k in 0..nside {
        let s = k as f64 / nside as f64;
        pts.push(C64::new(rect.x0 + (rect.x1 - rect.x0) * s, rect.y0));
    }
    for k in 0..nside {
        let s = k as f64 / nside as f64;
        pts.push(C64::new(rect.x1, rect.y0 + (rect.y1 - rect.y0) * s));
    }
    for k in 0..nside {
        let s = k as f64 / nside as f64;
        pts.push(C64::new(rect.x1 - (rect.x1 - rect.x0) * s, rect.y1));
    }
    for k in 0..nside {
        let s = k as f64 / nside as f64;
        pts.push(C64::new(rect.x0, rect.y1 - (rect.y1 - rect.y0) * s));
    }
    let mut ratio = Vec::with_capacity(pts.len());
    for &p in &pts {
        let fp = f(p)?;
        if fp.norm() == 0.0 {
            return Err(BergmanError::ContourThroughZero(0));
        }
        let d = (f(p + h)? - f(p - h)?) / (2.0 * h);
        ratio.push(d / fp);
    }
    let mut total = C64::new(0.0, 0.0);
    let m = pts.len();
    for i in 0..m {
        let j = (i + 1) % m;
        let dz = pts[j] - pts[i];
        total += 0.5 * (ratio[i] + ratio[j]) * dz;
    }
    Ok(total / C64::new(0.0, 2.0 * std::f64::consts::PI))
}

fn winding_count<F>(f: &mut F, rect: &Rect, h: f64) -> Result<i32>
where
    F: FnMut(C64) -> Result<C64>,
{
    let mut nside = 64;
    let mut prev: Option<i32> = None;
    while nside <= 2048 {
        let w = winding_on_rect(f, rect, nside, h)?;
        let rounded = w.re.round();
        if (w.re - rounded).abs() < 0.2 && w.im.abs() < 0.2 {
            let c = rounded as i32;
            if prev == Some(c) {
                return Ok(c);
            }
            prev = Some(c);
        } else {
            prev = None;
        }
        nside *= 2;
    }
    Err(BergmanError::ContourThroughZero(3))
}

fn newton_refine<F>(f: &mut F, start: C64, region: &Rect, h: f64) -> Result<(C64, usize, f64)>
where
    F: FnMut(C64) -> Result<C64>,
{
    let mut x = start;
    for it in 0..100 {
        let fx = f(x)?;
        let d = (f(x + h)? - f(x - h)?) / (2.0 * h);
        if d.norm() == 0.0 {
            return Err(BergmanError::NewtonDiverged(format!("{x}")));
        }
        let step = fx / d;
        x -= step;
        let last_step = step.norm();
        let margin = 0.5 * region.size();
        if x.re < region.x0 - margin
            || x.re > region.x1 + margin
            || x.im < region.y0 - margin
            || x.im > region.y1 + margin
        {
            return Err(BergmanError::NewtonDiverged(format!("{x}")));
        }
        if last_step < 1e-13 * (1.0 + x.norm()) {
            return Ok((x, it + 1, last_step));
        }
    }
    Err(BergmanError::NewtonDiverged(format!("{x}")))
}

/// Localize the zeros of an analytic function on a rectangle: winding
/// number per grid cell by trapezoidal contour integration of `f'/f`
/// (`f'` by central differences), then Newton refinement per flagged
/// cell. The per-cell counts must add up to the winding of the whole
/// region boundary.
pub fn complex_roots_region<F>(mut f: F, region: &Rect, grid: (usize, usize)) -> Result<Vec<RootReport>>
where
    F: FnMut(C64) -> Result<C64>,
{
    if grid.0 == 0 || grid.1 == 0 {
        return Err(BergmanError::InvalidArgument("grid must be nonzero".into()));
    }
    let cell_size = ((region.x1 - region.x0) / grid.0 as f64).min((region.y1 - region.y0) / grid.1 as f64);
    let h = 1e-6 * cell_size;

    let mut attempt = 0usize;
    'attempts: loop {
        // enlarge the region asymmetrically on retries so every grid line
        // (including interior ones) actually moves
        let jitter = attempt as f64 * 0.37 * cell_size / 16.0;
        let outer = Rect {
            x0: region.x0 - jitter,
            x1: region.x1,
            y0: region.y0 - jitter,
            y1: region.y1,
        };
        let total = match winding_count(&mut f, &outer, h) {
            Ok(t) => t,
            Err(BergmanError::ContourThroughZero(_)) if attempt < 3 => {
                attempt += 1;
                continue 'attempts;
            }
            Err(e) => return Err(e),
        };

        let mut reports = Vec::new();
        let mut sum = 0i32;
        for a in 0..grid.0 {
            for b in 0..grid.1 {
                let cell = Rect {
                    x0: outer.x0 + (outer.x1 - outer.x0) * a as f64 / grid.0 as f64,
                    x1: outer.x0 + (outer.x1 - outer.x0) * (a + 1) as f64 / grid.0 as f64,
                    y0: outer.y0 + (outer.y1 - outer.y0) * b as f64 / grid.1 as f64,
                    y1: outer.y0 + (outer.y1 - outer.y0) * (b + 1) as f64 / grid.1 as f64,
                };
                let count = match winding_count(&mut f, &cell, h) {
                    Ok(c) => c,
                    Err(BergmanError::ContourThroughZero(_)) if attempt < 3 => {
                        attempt += 1;
                        continue 'attempts;
                    }
                    Err(e) => return Err(e),
                };
                if count > 0 {
                    sum += count;
                    let (root, iters, step) = newton_refine(&mut f, cell.center(), &cell, h)?;
                    let residual = f(root)?.norm();
                    let _ = iters;
                    let _ = step;
                    reports.push(RootReport {
                        location: root,
                        residual,
                        evidence: RootEvidence::Winding { cell, count },
                    });
                }
            }
        }
        if sum != total {
            if attempt < 3 {
                attempt += 1;
                continue 'attempts;
            }
            return Err(BergmanError::ContourThroughZero(attempt));
        }
        return Ok(reports);
    }
}

/// The paper's closed-form reference root of
/// `2 / (1 - i/(xi c))^3 = 2 xi^2`, `c = sqrt|2 log r^2|`:
/// `i/c + (1+i sqrt3) c^3 / cbrt(12 (-9ic^8 + sqrt3 sqrt(-27c^16-4c^18)))
///      + (1-i sqrt3) cbrt(-9ic^8 + sqrt3 sqrt(-27c^16-4c^18)) / (2 c^3 cbrt18)`.
///
/// Principal branches first; if the cubic residual exceeds 1e-6 all
/// cube-root branch combinations (and both square-root signs) are tried,
/// and the best validated combination is returned.
pub fn thm5_reference_root(r: f64) -> Result<C64> {
    let c = (2.0 * log_r2(r).abs()).sqrt();
    let residual = |xi: C64| -> f64 {
        let lhs = 2.0 / (C64::new(1.0, 0.0) - C64::new(0.0, 1.0) / (xi * c)).powi(3);
        (lhs - 2.0 * xi * xi).norm()
    };
    let i = C64::new(0.0, 1.0);
    let sqrt3 = 3f64.sqrt();
    let c3 = c.powi(3);
    let c8 = c.powi(8);
    let c16 = c.powi(16);
    let c18 = c.powi(18);
    let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);

    let mut best: Option<(f64, C64)> = None;
    for sqrt_sign in [1.0, -1.0] {
        let sq = sqrt_sign * C64::new(-27.0 * c16 - 4.0 * c18, 0.0).sqrt();
        let inner = -9.0 * i * c8 + sqrt3 * sq;
        for b1 in 0..3 {
            for b2 in 0..3 {
                let cbrt_12inner = (12.0 * inner).powf(1.0 / 3.0) * omega.powu(b1);
                let cbrt_inner = inner.powf(1.0 / 3.0) * omega.powu(b2);
                let xi = i / c
                    + (1.0 + i * sqrt3) * c3 / cbrt_12inner
                    + (1.0 - i * sqrt3) * cbrt_inner / (2.0 * c3 * 18f64.powf(1.0 / 3.0));
                let res = residual(xi);
                // the principal-branch combination comes first; keep the
                // first combination that validates
                if res < 1e-6 {
                    return Ok(xi);
                }
                if best.map_or(true, |(b, _)| res < b) {
                    best = Some((res, xi));
                }
            }
        }
    }
    Err(BergmanError::BranchAmbiguity(best.map(|(b, _)| b).unwrap_or(f64::NAN)))
}

/// Magnitude of the immersion-defect determinant at a point of the
/// kernel zero set of a product domain (Remark-2.2 inclusion): must
/// vanish to tolerance because the matrix has rank 1 there.
pub fn rank1_inclusion_check(
    domain: &DomainSpec,
    z0: &Point,
    z: &Point,
    trunc: &Truncation,
) -> Result<f64> {
    if domain.dimension() < 2 {
        return Err(BergmanError::InvalidArgument(
            "rank-1 inclusion requires dimension n >= 2".into(),
        ));
    }
    domain.require_member(z0, "z0")?;
    domain.require_member(z, "z")?;
    let kz = eval_kernel_jet_internal(domain, z, z0, (0, 0), trunc)?.value();
    let kzz = eval_kernel_jet_internal(domain, z, z, (0, 0), trunc)?.value().re;
    let k00 = eval_kernel_jet_internal(domain, z0, z0, (0, 0), trunc)?.value().re;
    let scale = (kzz * k00).sqrt();
    if kz.norm() > 1e-10 * scale {
        return Err(BergmanError::NotOnZeroSet(kz.norm(), 1e-10 * scale));
    }
    Ok(defect_det(domain, z, z0, trunc)?.norm())
}
