//! Kernel invariants: Hermitian symmetry, oracle equivalence, jet
//! consistency against finite differences, diagonal positivity and the
//! Cauchy-Schwarz inequality.

mod common;

use bergman_core::{eval_kernel_jet, laurent_kernel_oracle, DomainSpec, Point, Truncation, C64};
use common::{central_diff, random_point, rng};
use proptest::prelude::*;

fn domains() -> Vec<DomainSpec> {
    vec![
        DomainSpec::UnitDisk,
        DomainSpec::annulus(0.1).unwrap(),
        DomainSpec::annulus(0.5).unwrap(),
        DomainSpec::product(vec![DomainSpec::annulus(0.2).unwrap(), DomainSpec::UnitDisk]).unwrap(),
    ]
}

#[test]
fn hermitian_symmetry_200_pairs() {
    let trunc = Truncation::default();
    let mut rng = rng(11);
    for dom in domains() {
        for _ in 0..200 {
            let z = random_point(&dom, &mut rng);
            let w = random_point(&dom, &mut rng);
            let a = eval_kernel_jet(&dom, &z, &w, (0, 0), &trunc).unwrap().value();
            let b = eval_kernel_jet(&dom, &w, &z, (0, 0), &trunc).unwrap().value();
            assert!(
                (a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()),
                "hermitian symmetry violated on {dom}: {a} vs conj {b}"
            );
        }
    }
}

#[test]
fn laurent_oracle_equivalence() {
    // measured relative to the Cauchy-Schwarz scale sqrt(K(z,z) K(w,w));
    // plain relative error is not achievable when a random pair lands
    // near a kernel zero (both routes cancel to ~1e-12 absolute there)
    let trunc = Truncation::default();
    let mut rng = rng(12);
    for r in [0.1, 0.5] {
        let dom = DomainSpec::annulus(r).unwrap();
        for _ in 0..50 {
            let z = random_point(&dom, &mut rng);
            let w = random_point(&dom, &mut rng);
            let a = eval_kernel_jet(&dom, &z, &w, (0, 0), &trunc).unwrap().value();
            let b = laurent_kernel_oracle(r, &z, &w, &trunc).unwrap();
            let kzz = eval_kernel_jet(&dom, &z, &z, (0, 0), &trunc).unwrap().value().re;
            let kww = eval_kernel_jet(&dom, &w, &w, (0, 0), &trunc).unwrap().value().re;
            let scale = (kzz * kww).sqrt();
            assert!(
                (a - b).norm() <= 1e-10 * scale,
                "series vs laurent at r={r}: {a} vs {b}, scale {scale}"
            );
        }
    }
}

#[test]
fn jet_entries_match_finite_differences() {
    // every analytic derivative entry vs central differences of the
    // lower-order entry, relative error <= 1e-5 with step 1e-5
    let trunc = Truncation::default();
    let mut rng = rng(13);
    let dom = DomainSpec::annulus(0.3).unwrap();
    let h = 1e-5;
    for _ in 0..25 {
        let z = random_point(&dom, &mut rng);
        let w = random_point(&dom, &mut rng);
        let jet = eval_kernel_jet(&dom, &z, &w, (2, 2), &trunc).unwrap();
        // d/dz of entry (a,b) is entry (a+1,b)
        for a in 0..2usize {
            for b in 0..3usize {
                let num = central_diff(
                    |zz| {
                        eval_kernel_jet(&dom, &Point::scalar(zz), &w, (2, 2), &trunc)
                            .unwrap()
                            .scalar_entry(a, b)
                    },
                    z.as_scalar(),
                    C64::new(1.0, 0.0),
                    h * z.as_scalar().norm().max(0.1),
                );
                let ana = jet.scalar_entry(a + 1, b);
                assert!(
                    (num - ana).norm() <= 1e-5 * (1.0 + ana.norm()),
                    "d/dz of ({a},{b}): fd {num} vs jet {ana}"
                );
            }
        }
        // d/dzetabar of entry (a,b) is entry (a,b+1); moving zeta by a real
        // step h moves zetabar by h
        for a in 0..3usize {
            for b in 0..2usize {
                let num = central_diff(
                    |ww| {
                        eval_kernel_jet(&dom, &z, &Point::scalar(ww), (2, 2), &trunc)
                            .unwrap()
                            .scalar_entry(a, b)
                    },
                    w.as_scalar(),
                    C64::new(1.0, 0.0),
                    h * w.as_scalar().norm().max(0.1),
                );
                let ana = jet.scalar_entry(a, b + 1);
                assert!(
                    (num - ana).norm() <= 1e-5 * (1.0 + ana.norm()),
                    "d/dzetabar of ({a},{b}): fd {num} vs jet {ana}"
                );
            }
        }
    }
}

#[test]
fn diagonal_positivity_and_cauchy_schwarz() {
    let trunc = Truncation::default();
    let mut rng = rng(14);
    for dom in domains() {
        for _ in 0..100 {
            let z = random_point(&dom, &mut rng);
            let w = random_point(&dom, &mut rng);
            let kzz = eval_kernel_jet(&dom, &z, &z, (0, 0), &trunc).unwrap().value();
            let kww = eval_kernel_jet(&dom, &w, &w, (0, 0), &trunc).unwrap().value();
            let kzw = eval_kernel_jet(&dom, &z, &w, (0, 0), &trunc).unwrap().value();
            assert!(kzz.re > 0.0 && kww.re > 0.0, "diagonal not positive on {dom}");
            assert!(
                kzw.norm_sqr() <= kzz.re * kww.re * (1.0 + 1e-12),
                "Cauchy-Schwarz violated on {dom}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // K(z, zeta) = conj(K(zeta, z)) as a property over the annulus
    #[test]
    fn prop_hermitian_annulus(rho1 in 0.25f64..0.9, th1 in 0.0f64..6.28,
                              rho2 in 0.25f64..0.9, th2 in 0.0f64..6.28) {
        let dom = DomainSpec::annulus(0.2).unwrap();
        let trunc = Truncation::default();
        let z = Point::scalar(C64::from_polar(rho1, th1));
        let w = Point::scalar(C64::from_polar(rho2, th2));
        let a = eval_kernel_jet(&dom, &z, &w, (0, 0), &trunc).unwrap().value();
        let b = eval_kernel_jet(&dom, &w, &z, (0, 0), &trunc).unwrap().value();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    // rotation invariance of the diagonal kernel on the annulus
    #[test]
    fn prop_rotation_invariant_diagonal(rho in 0.25f64..0.9, th in 0.0f64..6.28) {
        let dom = DomainSpec::annulus(0.2).unwrap();
        let trunc = Truncation::default();
        let z = Point::from(rho);
        let w = Point::scalar(C64::from_polar(rho, th));
        let a = eval_kernel_jet(&dom, &z, &z, (0, 0), &trunc).unwrap().value().re;
        let b = eval_kernel_jet(&dom, &w, &w, (0, 0), &trunc).unwrap().value().re;
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }
}
