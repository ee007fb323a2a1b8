//! Distance invariants: the sandwich property, symmetry, the triangle
//! inequality with optimizer slack, and refinement monotonicity.

mod common;

use bergman_core::{distance, path_length, DistanceOpts, DomainSpec, MetricKind, ParamPath, Point, Truncation};
use common::{random_point, rng};

#[test]
fn sandwich_and_symmetry() {
    let trunc = Truncation::default();
    let mut rng = rng(31);
    let dom = DomainSpec::annulus(0.2).unwrap();
    let opts = DistanceOpts {
        nodes: 32,
        ..DistanceOpts::default()
    };
    for _ in 0..10 {
        let z = random_point(&dom, &mut rng);
        let w = random_point(&dom, &mut rng);
        let fwd = distance(&dom, &z, &w, MetricKind::Bergman, &opts, &trunc).unwrap();
        let bwd = distance(&dom, &w, &z, MetricKind::Bergman, &opts, &trunc).unwrap();
        assert!(fwd.lower <= fwd.upper + 1e-9, "sandwich: {} vs {}", fwd.lower, fwd.upper);
        assert!(
            (fwd.upper - bwd.upper).abs() <= 1e-6,
            "symmetry: {} vs {}",
            fwd.upper,
            bwd.upper
        );
    }
}

#[test]
fn triangle_inequality_with_slack() {
    let trunc = Truncation::default();
    let mut rng = rng(32);
    let dom = DomainSpec::annulus(0.2).unwrap();
    let opts = DistanceOpts {
        nodes: 32,
        ..DistanceOpts::default()
    };
    for _ in 0..5 {
        let z = random_point(&dom, &mut rng);
        let v = random_point(&dom, &mut rng);
        let w = random_point(&dom, &mut rng);
        let zw = distance(&dom, &z, &w, MetricKind::Bergman, &opts, &trunc).unwrap().upper;
        let zv = distance(&dom, &z, &v, MetricKind::Bergman, &opts, &trunc).unwrap().upper;
        let vw = distance(&dom, &v, &w, MetricKind::Bergman, &opts, &trunc).unwrap().upper;
        assert!(zw <= zv + vw + 5e-3, "triangle: {zw} vs {zv} + {vw}");
    }
}

#[test]
fn refinement_monotonicity() {
    // doubling polyline nodes never increases the upper bound beyond 1e-9
    let trunc = Truncation::default();
    let dom = DomainSpec::annulus(0.2).unwrap();
    let z = Point::scalar(bergman_core::C64::new(0.5, 0.2));
    let w = Point::scalar(bergman_core::C64::new(-0.6, -0.1));
    let mut prev = f64::INFINITY;
    for nodes in [16, 32, 64] {
        let opts = DistanceOpts {
            nodes,
            ..DistanceOpts::default()
        };
        let res = distance(&dom, &z, &w, MetricKind::Bergman, &opts, &trunc).unwrap();
        assert!(
            res.upper <= prev + 1e-9,
            "refinement increased the bound: {} after {}",
            res.upper,
            prev
        );
        prev = res.upper;
    }
}

#[test]
fn tilde_distance_sandwich() {
    let trunc = Truncation::default();
    let mut rng = rng(33);
    let dom = DomainSpec::annulus(0.2).unwrap();
    let opts = DistanceOpts {
        nodes: 32,
        ..DistanceOpts::default()
    };
    for _ in 0..5 {
        let z = random_point(&dom, &mut rng);
        let w = random_point(&dom, &mut rng);
        let res = distance(&dom, &z, &w, MetricKind::Tilde, &opts, &trunc).unwrap();
        assert!(res.lower <= res.upper + 1e-9, "tilde sandwich: {} vs {}", res.lower, res.upper);
    }
}

#[test]
fn optimizer_beats_or_matches_explicit_paths() {
    // the optimized distance between the thm4 endpoints is no longer than
    // the paper's composite path
    let trunc = Truncation::default();
    let r = 1e-8;
    let dom = DomainSpec::annulus(r).unwrap();
    let rep = bergman_core::kernel_zero_bisection(r, 1.0, (0.9, 1.1), &trunc).unwrap();
    let s = rep.location.re;
    let path = bergman_core::paper_path_thm4(r, s).unwrap();
    let explicit = path_length(&dom, &path, MetricKind::Bergman, 8, &trunc).unwrap();
    let l = (r * r).ln().abs();
    let z0 = Point::from(1.0 / l.sqrt());
    let zeta = bergman_core::loci::thm4_zero_point(r, s);
    let res = distance(&dom, &z0, &zeta, MetricKind::Bergman, &DistanceOpts::default(), &trunc).unwrap();
    assert!(
        res.upper <= explicit + 1e-6,
        "optimizer {} should not exceed explicit {}",
        res.upper,
        explicit
    );
    // lower bound is pi/2 at the kernel zero
    assert!((res.lower - std::f64::consts::FRAC_PI_2).abs() <= 1e-12);
}

#[test]
fn product_domain_distance() {
    let trunc = Truncation::default();
    let dom = DomainSpec::product(vec![DomainSpec::annulus(0.2).unwrap(), DomainSpec::UnitDisk]).unwrap();
    let z = Point::new(vec![
        bergman_core::C64::new(0.5, 0.0),
        bergman_core::C64::new(0.1, 0.1),
    ]);
    let w = Point::new(vec![
        bergman_core::C64::new(0.4, 0.3),
        bergman_core::C64::new(-0.2, 0.4),
    ]);
    let opts = DistanceOpts {
        nodes: 24,
        ..DistanceOpts::default()
    };
    let res = distance(&dom, &z, &w, MetricKind::Bergman, &opts, &trunc).unwrap();
    assert!(res.lower <= res.upper + 1e-9);
    assert!(res.upper > 0.0 && res.converged);
}

#[test]
fn path_eval_concatenation() {
    // global parametrization traverses segments in order with matching ends
    let p = ParamPath::new(vec![
        bergman_core::Segment::Line {
            from: Point::from(0.0),
            to: Point::from(0.5),
        },
        bergman_core::Segment::Arc {
            radius: 0.5,
            angle_start: 0.0,
            angle_end: std::f64::consts::FRAC_PI_2,
        },
    ])
    .unwrap();
    let (start, _) = p.eval(0.0);
    let (end, _) = p.eval(1.0);
    assert!((start.as_scalar() - bergman_core::C64::new(0.0, 0.0)).norm() < 1e-12);
    assert!((end.as_scalar() - bergman_core::C64::new(0.0, 0.5)).norm() < 1e-12);
}
