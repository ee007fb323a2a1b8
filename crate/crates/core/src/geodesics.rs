//! Parametric paths, length integration and two-point distances.
//!
//! Distances are computed variationally: the discrete energy of a
//! free-node polyline is minimized with L-BFGS using analytic tensor
//! gradients from kernel jets, and the reported upper bound is sandwiched
//! against the arccos lower bound of the corresponding metric.

use crate::domain::{DomainSpec, Point};
use crate::error::{BergmanError, Result};
use crate::geometry::{self, MetricKind};
use crate::kernel::{log_r2, Truncation};
use crate::quad::gauss_legendre;
use crate::C64;

/// One path primitive. Arcs are centered at the origin and only make
/// sense for one-dimensional domains.
#[derive(Debug, Clone)]
pub enum Segment {
    Line { from: Point, to: Point },
    Arc { radius: f64, angle_start: f64, angle_end: f64 },
    Polyline { nodes: Vec<Point> },
}

impl Segment {
    pub fn start(&self) -> Point {
        match self {
            Segment::Line { from, .. } => from.clone(),
            Segment::Arc { radius, angle_start, .. } => {
                Point::scalar(C64::from_polar(*radius, *angle_start))
            }
            Segment::Polyline { nodes } => nodes[0].clone(),
        }
    }

    pub fn end(&self) -> Point {
        match self {
            Segment::Line { to, .. } => to.clone(),
            Segment::Arc { radius, angle_end, .. } => Point::scalar(C64::from_polar(*radius, *angle_end)),
            Segment::Polyline { nodes } => nodes[nodes.len() - 1].clone(),
        }
    }

    /// Position and velocity at local parameter `s` in [0, 1].
    fn eval(&self, s: f64) -> (Vec<C64>, Vec<C64>) {
        match self {
            Segment::Line { from, to } => {
                let pos = from
                    .coords
                    .iter()
                    .zip(&to.coords)
                    .map(|(a, b)| a + (b - a) * s)
                    .collect();
                let vel = from.coords.iter().zip(&to.coords).map(|(a, b)| b - a).collect();
                (pos, vel)
            }
            Segment::Arc { radius, angle_start, angle_end } => {
                let span = angle_end - angle_start;
                let th = angle_start + span * s;
                let z = C64::from_polar(*radius, th);
                (vec![z], vec![z * C64::new(0.0, span)])
            }
            Segment::Polyline { nodes } => {
                let m = nodes.len() - 1;
                let x = (s * m as f64).min(m as f64 - 1e-12).max(0.0);
                let k = x.floor() as usize;
                let frac = x - k as f64;
                let pos = nodes[k]
                    .coords
                    .iter()
                    .zip(&nodes[k + 1].coords)
                    .map(|(a, b)| a + (b - a) * frac)
                    .collect();
                let vel = nodes[k]
                    .coords
                    .iter()
                    .zip(&nodes[k + 1].coords)
                    .map(|(a, b)| (b - a) * m as f64)
                    .collect();
                (pos, vel)
            }
        }
    }

    /// Euclidean arc length, used only for parameter weighting.
    fn euclidean_len(&self) -> f64 {
        match self {
            Segment::Line { from, to } => from
                .coords
                .iter()
                .zip(&to.coords)
                .map(|(a, b)| (b - a).norm_sqr())
                .sum::<f64>()
                .sqrt(),
            Segment::Arc { radius, angle_start, angle_end } => radius * (angle_end - angle_start).abs(),
            Segment::Polyline { nodes } => nodes
                .windows(2)
                .map(|w| {
                    w[0].coords
                        .iter()
                        .zip(&w[1].coords)
                        .map(|(a, b)| (b - a).norm_sqr())
                        .sum::<f64>()
                        .sqrt()
                })
                .sum(),
        }
    }
}

/// Piecewise path on [0, 1], parametrized proportionally to Euclidean
/// arc length across segments. Consecutive segments must join.
#[derive(Debug, Clone)]
pub struct ParamPath {
    pub segments: Vec<Segment>,
}

impl ParamPath {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(BergmanError::InvalidArgument("path needs at least one segment".into()));
        }
        for w in segments.windows(2) {
            let e = w[0].end();
            let s = w[1].start();
            let gap: f64 = e
                .coords
                .iter()
                .zip(&s.coords)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if gap > 1e-9 {
                return Err(BergmanError::InvalidArgument(format!(
                    "consecutive segments do not join: gap {gap:.3e}"
                )));
            }
        }
        Ok(ParamPath { segments })
    }

    pub fn line(from: Point, to: Point) -> Self {
        ParamPath {
            segments: vec![Segment::Line { from, to }],
        }
    }

    pub fn start(&self) -> Point {
        self.segments[0].start()
    }

    pub fn end(&self) -> Point {
        self.segments[self.segments.len() - 1].end()
    }

    /// Position and velocity (d/dt of the global parameter) at `t`.
    pub fn eval(&self, t: f64) -> (Point, Vec<C64>) {
        let lens: Vec<f64> = self.segments.iter().map(|s| s.euclidean_len()).collect();
        let total: f64 = lens.iter().sum();
        if total == 0.0 {
            let (p, v) = self.segments[0].eval(0.0);
            return (Point::new(p), v);
        }
        let x = t.clamp(0.0, 1.0) * total;
        let mut acc = 0.0;
        for (seg, len) in self.segments.iter().zip(&lens) {
            if x <= acc + len || std::ptr::eq(seg, self.segments.last().unwrap()) {
                if *len == 0.0 {
                    let (p, v) = seg.eval(0.0);
                    return (Point::new(p), v);
                }
                let s = ((x - acc) / len).clamp(0.0, 1.0);
                let (p, v) = seg.eval(s);
                let scale = total / len;
                return (Point::new(p), v.into_iter().map(|c| c * scale).collect());
            }
            acc += len;
        }
        unreachable!()
    }
}

fn speed_at(
    domain: &DomainSpec,
    pos: &[C64],
    vel: &[C64],
    kind: MetricKind,
    trunc: &Truncation,
) -> Result<f64> {
    let mut s = 0.0;
    for (i, f) in domain.factors().iter().enumerate() {
        let sc = geometry::factor_scalars(f, pos[i], trunc)?;
        s += sc.metric(kind) * vel[i].norm_sqr();
    }
    Ok(s.sqrt())
}

/// Length of one segment by composite Gauss-Legendre quadrature, with the
/// number of panels doubled until the value is stable to `tol`.
fn segment_length(
    domain: &DomainSpec,
    seg: &Segment,
    kind: MetricKind,
    quad_order: usize,
    tol: f64,
    trunc: &Truncation,
) -> Result<f64> {
    let (x, w) = gauss_legendre(quad_order);
    let mut prev = f64::NAN;
    let mut panels = 4usize;
    loop {
        let mut total = 0.0;
        for p in 0..panels {
            let a = p as f64 / panels as f64;
            let b = (p + 1) as f64 / panels as f64;
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for (xi, wi) in x.iter().zip(&w) {
                let s = mid + half * xi;
                let (pos, vel) = seg.eval(s);
                total += wi * half * speed_at(domain, &pos, &vel, kind, trunc)?;
            }
        }
        if (total - prev).abs() <= tol * (1.0 + total.abs()) {
            return Ok(total);
        }
        prev = total;
        panels *= 2;
        if panels > 1 << 14 {
            return Err(BergmanError::QuadratureNotConverged((total - prev).abs()));
        }
    }
}

/// Path length in the requested metric: composite Gauss-Legendre
/// quadrature of `sqrt(tensor(gamma)) |gamma'|` per segment, refined
/// until stable to 1e-8.
pub fn path_length(
    domain: &DomainSpec,
    path: &ParamPath,
    kind: MetricKind,
    quad_order: usize,
    trunc: &Truncation,
) -> Result<f64> {
    if quad_order < 2 {
        return Err(BergmanError::InvalidArgument("quad_order must be >= 2".into()));
    }
    let mut total = 0.0;
    for seg in &path.segments {
        if seg.euclidean_len() == 0.0 {
            continue;
        }
        total += segment_length(domain, seg, kind, quad_order, 1e-8, trunc)?;
    }
    Ok(total)
}

/// Options for the variational distance solver.
#[derive(Debug, Clone, Copy)]
pub struct DistanceOpts {
    /// Number of polyline edges (nodes - 1).
    pub nodes: usize,
    pub quad_order: usize,
    /// Stop when the energy decrease falls below this, relatively.
    pub tol_energy: f64,
    pub max_iters: usize,
}

impl Default for DistanceOpts {
    fn default() -> Self {
        DistanceOpts {
            nodes: 64,
            quad_order: 8,
            tol_energy: 1e-10,
            max_iters: 5000,
        }
    }
}

/// Answer to a two-point distance query: certified lower bound, best path
/// length found (upper bound) and the witnessing path.
#[derive(Debug, Clone)]
pub struct DistanceResult {
    pub lower: f64,
    pub upper: f64,
    pub path: ParamPath,
    pub iterations: usize,
    pub converged: bool,
}

struct EnergyModel<'a> {
    domain: &'a DomainSpec,
    kind: MetricKind,
    trunc: &'a Truncation,
    endpoints: (Vec<C64>, Vec<C64>),
    edges: usize,
    dim: usize,
}

impl EnergyModel<'_> {
    fn nodes_of(&self, interior: &[C64]) -> Vec<Vec<C64>> {
        let mut nodes = Vec::with_capacity(self.edges + 1);
        nodes.push(self.endpoints.0.clone());
        for k in 0..self.edges - 1 {
            nodes.push(interior[k * self.dim..(k + 1) * self.dim].to_vec());
        }
        nodes.push(self.endpoints.1.clone());
        nodes
    }

    /// Discrete energy `M sum_k T(mid_k)|d_k|^2` and its Wirtinger
    /// gradient with respect to the conjugated interior coordinates.
    /// Returns None when a midpoint leaves the domain (infinite energy).
    fn energy_grad(&self, interior: &[C64]) -> Option<(f64, Vec<C64>)> {
        let nodes = self.nodes_of(interior);
        let m = self.edges as f64;
        let mut energy = 0.0;
        let mut grad = vec![C64::new(0.0, 0.0); (self.edges - 1) * self.dim];
        for k in 0..self.edges {
            for (i, f) in self.domain.factors().iter().enumerate() {
                let a = nodes[k][i];
                let b = nodes[k + 1][i];
                let midp = 0.5 * (a + b);
                if !f.contains(&Point::scalar(midp)) {
                    return None;
                }
                let sc = geometry::factor_scalars(f, midp, self.trunc).ok()?;
                let t = sc.metric(self.kind);
                let dt = sc.metric_grad(self.kind);
                let d = b - a;
                energy += m * t * d.norm_sqr();
                let common = dt.conj() * (0.5 * d.norm_sqr()) * m;
                if k >= 1 {
                    grad[(k - 1) * self.dim + i] += common - m * t * d;
                }
                if k + 1 <= self.edges - 1 {
                    grad[k * self.dim + i] += common + m * t * d;
                }
            }
        }
        Some((energy, grad))
    }
}

/// L-BFGS two-loop recursion over the real view of the interior nodes.
fn minimize(model: &EnergyModel, start: Vec<C64>, opts: &DistanceOpts) -> (Vec<C64>, usize, bool) {
    let n = start.len();
    let to_real = |v: &[C64]| -> Vec<f64> {
        let mut r = Vec::with_capacity(2 * n);
        for c in v {
            r.push(c.re);
            r.push(c.im);
        }
        r
    };
    let to_complex = |v: &[f64]| -> Vec<C64> {
        v.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
    };
    // real gradient from the Wirtinger one: (2 Re gbar, 2 Im gbar)
    let real_grad = |g: &[C64]| -> Vec<f64> {
        let mut r = Vec::with_capacity(2 * n);
        for c in g {
            r.push(2.0 * c.re);
            r.push(2.0 * c.im);
        }
        r
    };

    let mut x = to_real(&start);
    let (mut e, mut g) = match model.energy_grad(&start) {
        Some(eg) => (eg.0, real_grad(&eg.1)),
        None => return (start, 0, false),
    };

    const HIST: usize = 10;
    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut rho: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut iters = 0;

    for it in 0..opts.max_iters {
        iters = it + 1;
        // two-loop recursion
        let mut q = g.clone();
        let mut alpha = vec![0.0; s_hist.len()];
        for i in (0..s_hist.len()).rev() {
            alpha[i] = rho[i] * dot(&s_hist[i], &q);
            axpy(&mut q, -alpha[i], &y_hist[i]);
        }
        if let (Some(s), Some(y)) = (s_hist.last(), y_hist.last()) {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|v| *v *= gamma);
        }
        for i in 0..s_hist.len() {
            let beta = rho[i] * dot(&y_hist[i], &q);
            axpy(&mut q, alpha[i] - beta, &s_hist[i]);
        }
        let mut p: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut gp = dot(&g, &p);
        if gp >= 0.0 {
            p = g.iter().map(|v| -v).collect();
            gp = dot(&g, &p);
        }
        // Armijo backtracking
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let xt: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + step * b).collect();
            if let Some((et, gt)) = model.energy_grad(&to_complex(&xt)) {
                if et <= e + 1e-4 * step * gp {
                    let gt = real_grad(&gt);
                    let s: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
                    let y: Vec<f64> = gt.iter().zip(&g).map(|(a, b)| a - b).collect();
                    let sy = dot(&s, &y);
                    if sy > 1e-16 {
                        s_hist.push(s);
                        y_hist.push(y);
                        rho.push(1.0 / sy);
                        if s_hist.len() > HIST {
                            s_hist.remove(0);
                            y_hist.remove(0);
                            rho.remove(0);
                        }
                    }
                    let decrease = e - et;
                    x = xt;
                    g = gt;
                    e = et;
                    accepted = true;
                    if decrease <= opts.tol_energy * e.abs().max(1.0) {
                        converged = true;
                    }
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            converged = true; // no admissible descent left at machine scale
            break;
        }
        if converged {
            break;
        }
    }
    (to_complex(&x), iters, converged)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(v: &mut [f64], a: f64, w: &[f64]) {
    v.iter_mut().zip(w).for_each(|(x, y)| *x += a * y);
}

/// Seed node chains from `z` to `w` with `edges + 1` nodes.
fn seeds(domain: &DomainSpec, z: &Point, w: &Point, edges: usize) -> Vec<Vec<C64>> {
    let n = domain.dimension();
    let chord = |a: C64, b: C64, s: f64| a + (b - a) * s;
    let mut out: Vec<Vec<C64>> = Vec::new();

    // per-coordinate straight chord
    let mut straight = Vec::with_capacity((edges + 1) * n);
    let mut straight_ok = true;
    for k in 0..=edges {
        let s = k as f64 / edges as f64;
        for i in 0..n {
            let c = chord(z.coords[i], w.coords[i], s);
            if !domain.factors()[i].contains(&Point::scalar(c)) {
                straight_ok = false;
            }
            straight.push(c);
        }
    }
    if straight_ok {
        out.push(straight);
    }

    // radial-arc-radial composites for annulus coordinates, both windings
    for extra_turn in [0.0, 1.0, -1.0] {
        let mut nodes = Vec::with_capacity((edges + 1) * n);
        let mut differs = false;
        for k in 0..=edges {
            let s = k as f64 / edges as f64;
            for i in 0..n {
                let (a, b) = (z.coords[i], w.coords[i]);
                match domain.factors()[i] {
                    DomainSpec::Annulus { .. } => {
                        let (ra, rb) = (a.norm(), b.norm());
                        let tha = a.arg();
                        let mut thb = b.arg();
                        let mut dth = thb - tha;
                        while dth > std::f64::consts::PI {
                            dth -= 2.0 * std::f64::consts::PI;
                        }
                        while dth < -std::f64::consts::PI {
                            dth += 2.0 * std::f64::consts::PI;
                        }
                        thb = tha + dth + extra_turn * 2.0 * std::f64::consts::PI;
                        if (thb - tha).abs() > 1e-12 || (extra_turn != 0.0) {
                            differs = true;
                        }
                        let rr = ra + (rb - ra) * s;
                        let th = tha + (thb - tha) * s;
                        nodes.push(C64::from_polar(rr, th));
                    }
                    _ => nodes.push(chord(a, b, s)),
                }
            }
        }
        if differs || out.is_empty() {
            out.push(nodes);
        }
        if n == 0 {
            break;
        }
    }
    out
}

/// Two-point distance in the requested metric: multi-seed polyline energy
/// minimization for the upper bound, arccos formula for the lower bound.
pub fn distance(
    domain: &DomainSpec,
    z: &Point,
    w: &Point,
    kind: MetricKind,
    opts: &DistanceOpts,
    trunc: &Truncation,
) -> Result<DistanceResult> {
    domain.require_member(z, "z")?;
    domain.require_member(w, "w")?;
    let lower = match kind {
        MetricKind::Bergman => geometry::skwarczynski_bound(domain, z, w, trunc)?,
        MetricKind::Tilde => geometry::tilde_bound(domain, z, w, trunc)?,
    };
    if z == w {
        return Ok(DistanceResult {
            lower: 0.0,
            upper: 0.0,
            path: ParamPath::line(z.clone(), w.clone()),
            iterations: 0,
            converged: true,
        });
    }

    let edges = opts.nodes.max(2);
    let model = EnergyModel {
        domain,
        kind,
        trunc,
        endpoints: (z.coords.clone(), w.coords.clone()),
        edges,
        dim: domain.dimension(),
    };

    let mut best: Option<(f64, Vec<Vec<C64>>, usize, bool)> = None;
    for seed in seeds(domain, z, w, edges) {
        let interior = seed[model.dim..seed.len() - model.dim].to_vec();
        if model.energy_grad(&interior).is_none() {
            continue;
        }
        let (xopt, iters, conv) = minimize(&model, interior, opts);
        let nodes = model.nodes_of(&xopt);
        let mut len = 0.0;
        let mut ok = true;
        for k in 0..edges {
            let seg = Segment::Line {
                from: Point::new(nodes[k].clone()),
                to: Point::new(nodes[k + 1].clone()),
            };
            match segment_length(domain, &seg, kind, opts.quad_order, 1e-10, trunc) {
                Ok(l) => len += l,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        match &best {
            Some((l, ..)) if *l <= len => {}
            _ => best = Some((len, nodes, iters, conv)),
        }
    }

    let (upper, nodes, iterations, converged) = best.ok_or_else(|| {
        BergmanError::InvalidArgument("no admissible seed path between the endpoints".into())
    })?;
    let path = ParamPath {
        segments: vec![Segment::Polyline {
            nodes: nodes.into_iter().map(Point::new).collect(),
        }],
    };
    Ok(DistanceResult {
        lower,
        upper,
        path,
        iterations,
        converged,
    })
}

/// The explicit path of the annulus kernel-zero experiment: a segment
/// from `-1/(s sqrt|log r^2|)` to `-1/sqrt|log r^2|`, then the upper
/// half-circle of radius `1/sqrt|log r^2|` from angle pi to 0.
pub fn paper_path_thm4(r: f64, s: f64) -> Result<ParamPath> {
    let domain = DomainSpec::annulus(r)?;
    let l = log_r2(r).abs();
    let rho = 1.0 / l.sqrt();
    let seg_from = Point::scalar(C64::new(-rho / s, 0.0));
    let seg_to = Point::scalar(C64::new(-rho, 0.0));
    domain.require_member(&seg_from, "path start")?;
    domain.require_member(&seg_to, "half-circle start")?;
    ParamPath::new(vec![
        Segment::Line { from: seg_from, to: seg_to },
        Segment::Arc {
            radius: rho,
            angle_start: std::f64::consts::PI,
            angle_end: 0.0,
        },
    ])
}

/// The explicit path of the immersion-defect experiment: a segment from
/// `i/(xi (2|log r^2|)^{1/4})` to `i (2|log r^2|)^{-1/4}`, then the
/// quarter-arc of radius `(2|log r^2|)^{-1/4}` from angle pi/2 to 0.
pub fn paper_path_thm5(r: f64, xi: C64) -> Result<ParamPath> {
    let domain = DomainSpec::annulus(r)?;
    let q = (2.0 * log_r2(r).abs()).powf(0.25);
    let i = C64::new(0.0, 1.0);
    let from = Point::scalar(i / (xi * q));
    let to = Point::scalar(i / q);
    domain.require_member(&from, "path start")?;
    domain.require_member(&to, "arc start")?;
    ParamPath::new(vec![
        Segment::Line { from, to },
        Segment::Arc {
            radius: 1.0 / q,
            angle_start: std::f64::consts::FRAC_PI_2,
            angle_end: 0.0,
        },
    ])
}
