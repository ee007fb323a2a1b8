//! Geometry invariants: positive definiteness, the assembly identity and
//! its direct-expansion cross-check, finite-difference agreement of the
//! Ricci tensor, the comparison inequality, and bound symmetries.

mod common;

use bergman_core::geometry::tilde_direct_1d;
use bergman_core::{
    bergman_metric, ricci_ratio_min, ricci_tensor, skwarczynski_bound, tilde_bound, tilde_metric,
    DomainSpec, Point, SamplingBox, Truncation,
};
use common::{mixed_second_diff, random_point, rng};

fn domains_1d() -> Vec<DomainSpec> {
    vec![
        DomainSpec::UnitDisk,
        DomainSpec::annulus(0.2).unwrap(),
        DomainSpec::annulus(0.6).unwrap(),
    ]
}

#[test]
fn positive_definiteness_500_points() {
    let trunc = Truncation::default();
    let mut rng = rng(21);
    let prod = DomainSpec::product(vec![DomainSpec::annulus(0.2).unwrap(), DomainSpec::UnitDisk]).unwrap();
    for dom in domains_1d().into_iter().chain([prod]) {
        for _ in 0..500 {
            let z = random_point(&dom, &mut rng);
            let s = bergman_metric(&dom, &z, &trunc).unwrap();
            for i in 0..dom.dimension() {
                assert!(s.t[(i, i)].re > 0.0, "T not positive on {dom} at {z}");
            }
            assert!(s.g > 0.0);
        }
    }
}

#[test]
fn tilde_assembly_vs_finall_expansion() {
    // the direct 6-term expansion agrees with (n+1)T - Ric to 1e-9 relative
    let trunc = Truncation::default();
    let mut rng = rng(22);
    for dom in domains_1d() {
        for _ in 0..50 {
            let z = random_point(&dom, &mut rng);
            let s = tilde_metric(&dom, &z, &trunc).unwrap();
            let direct = tilde_direct_1d(&dom, &z, &trunc).unwrap();
            let assembled = 2.0 * s.t[(0, 0)].re - s.ric[(0, 0)].re;
            assert!(
                (assembled - direct).abs() <= 1e-9 * direct.abs().max(1.0),
                "{dom} at {z}: assembled {assembled} vs direct {direct}"
            );
            assert!((s.ttilde[(0, 0)].re - assembled).abs() <= 1e-12 * assembled.abs());
        }
    }
}

#[test]
fn ricci_matches_finite_differences_of_log_g() {
    // Ric = -ddbar log g, checked with the 5-point stencil at 1e-4
    let trunc = Truncation::default();
    let mut rng = rng(23);
    for dom in domains_1d() {
        for _ in 0..10 {
            let z = random_point(&dom, &mut rng);
            let s = ricci_tensor(&dom, &z, &trunc).unwrap();
            let fd = -mixed_second_diff(
                |w| bergman_metric(&dom, &Point::scalar(w), &trunc).unwrap().g.ln(),
                z.as_scalar(),
                1e-4,
            );
            assert!(
                (s.ric[(0, 0)].re - fd).abs() <= 1e-5 * (1.0 + fd.abs()),
                "{dom} at {z}: ric {} vs fd {fd}",
                s.ric[(0, 0)].re
            );
        }
    }
}

#[test]
fn tilde_matches_finite_differences_of_potential() {
    // Ttilde = ddbar log(K^2 T): validates the (3,2)-jet expansion
    let trunc = Truncation::default();
    let mut rng = rng(24);
    let dom = DomainSpec::annulus(0.3).unwrap();
    for _ in 0..10 {
        let z = random_point(&dom, &mut rng);
        let s = tilde_metric(&dom, &z, &trunc).unwrap();
        let fd = mixed_second_diff(
            |w| {
                let zz = Point::scalar(w);
                let m = bergman_metric(&dom, &zz, &trunc).unwrap();
                let k = bergman_core::eval_kernel_jet(&dom, &zz, &zz, (0, 0), &trunc)
                    .unwrap()
                    .value()
                    .re;
                (k * k * m.t[(0, 0)].re).ln()
            },
            z.as_scalar(),
            1e-4,
        );
        assert!(
            (s.ttilde[(0, 0)].re - fd).abs() <= 1e-5 * (1.0 + fd.abs()),
            "at {z}: ttilde {} vs fd {fd}",
            s.ttilde[(0, 0)].re
        );
    }
}

#[test]
fn comparison_inequality_with_ratio_min() {
    // with c = min Ric/T over a grid, (n+1-c) T - Ttilde is PSD on the grid
    let trunc = Truncation::default();
    for (dom, box_) in [
        (
            DomainSpec::UnitDisk,
            SamplingBox { re: (-0.6, 0.6), im: (-0.6, 0.6) },
        ),
        (
            DomainSpec::annulus(0.2).unwrap(),
            SamplingBox { re: (0.3, 0.8), im: (0.05, 0.4) },
        ),
    ] {
        let n = dom.dimension() as f64;
        let c = ricci_ratio_min(&dom, &box_, (6, 6), &trunc).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                let re = box_.re.0 + (box_.re.1 - box_.re.0) * a as f64 / 5.0;
                let im = box_.im.0 + (box_.im.1 - box_.im.0) * b as f64 / 5.0;
                let z = Point::scalar(bergman_core::C64::new(re, im));
                let s = tilde_metric(&dom, &z, &trunc).unwrap();
                for i in 0..dom.dimension() {
                    let lhs = (n + 1.0 - c) * s.t[(i, i)].re - s.ttilde[(i, i)].re;
                    assert!(lhs >= -1e-10, "comparison fails on {dom} at {z}: {lhs}");
                }
            }
        }
    }
}

#[test]
fn ratio_min_grid_refinement_monotone() {
    let trunc = Truncation::default();
    let dom = DomainSpec::annulus(0.2).unwrap();
    let box_ = SamplingBox { re: (0.3, 0.8), im: (0.05, 0.4) };
    let coarse = ricci_ratio_min(&dom, &box_, (3, 3), &trunc).unwrap();
    let fine = ricci_ratio_min(&dom, &box_, (5, 5), &trunc).unwrap();
    // the 5x5 grid contains the 3x3 grid points
    assert!(fine <= coarse + 1e-14);
}

#[test]
fn ratio_min_rotation_symmetry() {
    // equal values on each circle |z| = const
    let trunc = Truncation::default();
    let dom = DomainSpec::annulus(0.2).unwrap();
    let mut vals = Vec::new();
    for th in [0.0f64, 1.0, 2.2] {
        let z = bergman_core::C64::from_polar(0.55, th);
        let s_t = bergman_metric(&dom, &Point::scalar(z), &trunc).unwrap();
        let s_r = ricci_tensor(&dom, &Point::scalar(z), &trunc).unwrap();
        vals.push(s_r.ric[(0, 0)].re / s_t.t[(0, 0)].re);
    }
    assert!((vals[0] - vals[1]).abs() <= 1e-12 * vals[0].abs());
    assert!((vals[0] - vals[2]).abs() <= 1e-12 * vals[0].abs());
}

#[test]
fn bounds_symmetric_and_vanish_on_diagonal() {
    let trunc = Truncation::default();
    let mut rng = rng(25);
    let prod = DomainSpec::product(vec![DomainSpec::annulus(0.2).unwrap(), DomainSpec::UnitDisk]).unwrap();
    for dom in domains_1d().into_iter().chain([prod]) {
        for _ in 0..20 {
            let z = random_point(&dom, &mut rng);
            let w = random_point(&dom, &mut rng);
            let s1 = skwarczynski_bound(&dom, &z, &w, &trunc).unwrap();
            let s2 = skwarczynski_bound(&dom, &w, &z, &trunc).unwrap();
            assert!((s1 - s2).abs() <= 1e-12);
            let t1 = tilde_bound(&dom, &z, &w, &trunc).unwrap();
            let t2 = tilde_bound(&dom, &w, &z, &trunc).unwrap();
            assert!((t1 - t2).abs() <= 1e-12);
            assert!(skwarczynski_bound(&dom, &z, &z, &trunc).unwrap() <= 1e-7);
            assert!(tilde_bound(&dom, &z, &z, &trunc).unwrap() <= 1e-6);
        }
    }
}

#[test]
fn product_tilde_bound_at_factor_kernel_zero() {
    // at a zero of one factor kernel the determinant vanishes by rank 1,
    // so the tilde bound is pi/2
    let trunc = Truncation::default();
    let r = 1e-8;
    let prod = DomainSpec::product(vec![DomainSpec::annulus(r).unwrap(), DomainSpec::UnitDisk]).unwrap();
    let rep = bergman_core::kernel_zero_bisection(r, 1.0, (0.9, 1.1), &trunc).unwrap();
    let zeta_star = bergman_core::loci::thm4_zero_point(r, rep.location.re).as_scalar();
    let l = (r * r).ln().abs();
    let z0 = Point::new(vec![
        bergman_core::C64::new(1.0 / l.sqrt(), 0.0),
        bergman_core::C64::new(0.1, 0.2),
    ]);
    let z = Point::new(vec![zeta_star, bergman_core::C64::new(0.3, 0.0)]);
    let b = tilde_bound(&prod, &z0, &z, &trunc).unwrap();
    assert!(
        (b - std::f64::consts::FRAC_PI_2).abs() <= 1e-10,
        "tilde bound at rank-1 zero: {b}"
    );
}
