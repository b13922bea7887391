mod common;

use common::{full_suite, random_element, rng, SEED};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use qsphere_core::algebra::{del_k, Element};
use qsphere_core::scalars::{qnum, HalfInt, QRat};

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases: 128,
            ..Config::default()
        },
        TestRng::from_seed(RngAlgorithm::ChaCha, &[7; 32]),
    )
}

#[test]
fn exact_algebra_suite() {
    for l in full_suite(SEED) {
        assert!(l.passed(), "{}: {:?}", l.name, l.failures);
        assert!(l.cases > 0, "{}", l.name);
    }
}

#[test]
fn star_is_an_antimultiplicative_involution() {
    let mut r = rng(SEED + 10);
    for _ in 0..100 {
        let x = random_element(&mut r, 4);
        let y = random_element(&mut r, 4);
        assert_eq!(x.star().star(), x);
        assert_eq!(x.mul_ref(&y).star(), y.star().mul_ref(&x.star()));
    }
}

#[test]
fn haar_is_invariant_under_theta_and_star() {
    let mut r = rng(SEED + 11);
    for _ in 0..100 {
        let x = random_element(&mut r, 6);
        assert_eq!(x.theta().haar(), x.haar());
        assert_eq!(x.star().haar(), x.haar());
        if x.is_zero() {
            continue;
        }
        let norm = x.star().mul_ref(&x).haar().eval_f64(0.5);
        assert!(norm > 0.0, "{x}: h(x* x) = {norm}");
    }
}

#[test]
fn del_k_is_multiplicative_and_grading_adds() {
    let mut r = rng(SEED + 12);
    for _ in 0..100 {
        let x = random_element(&mut r, 4);
        let y = random_element(&mut r, 4);
        assert_eq!(del_k(&x.mul_ref(&y)), del_k(&x).mul_ref(&del_k(&y)));
    }
    let mut r = rng(SEED + 13);
    for _ in 0..100 {
        let x = Element::<QRat>::monomial(common::random_monomial(&mut r, 5));
        let y = Element::<QRat>::monomial(common::random_monomial(&mut r, 5));
        let (gx, gy) = (
            x.homogeneous_bigrade().unwrap(),
            y.homogeneous_bigrade().unwrap(),
        );
        let p = x.mul_ref(&y);
        if !p.is_zero() {
            assert_eq!(p.homogeneous_bigrade(), Some((gx.0 + gy.0, gx.1 + gy.1)));
        }
    }
}

#[test]
fn q_number_identities() {
    // [a][b] = sum of [a + b - 1 - 2k], [2a] = [a]([a+1] - [a-1]) and [a] → a as q → 1
    runner()
        .run(&(-6i64..=6, -6i64..=6), |(a2, b2)| {
            let a = HalfInt::from_twice(2 * a2);
            let b = HalfInt::from_twice(2 * b2.abs().max(1));
            let lhs = &qnum(a) * &qnum(b);
            let mut rhs = QRat::zero();
            for k in 0..b.to_int().unwrap() {
                rhs = &rhs + &qnum(a + b - HalfInt::ONE - HalfInt::from_int(2 * k));
            }
            prop_assert_eq!(lhs, rhs);
            let one = HalfInt::ONE;
            prop_assert_eq!(qnum(a + a), &qnum(a) * &(&qnum(a + one) - &qnum(a - one)));
            prop_assert_eq!(qnum(-a), -qnum(a));
            let near = qnum(a).eval_f64(0.999_999);
            prop_assert!((near - a.to_f64()).abs() < 1e-4 * (1.0 + a.to_f64().abs()));
            Ok(())
        })
        .unwrap();
}

#[test]
fn half_integer_text_round_trip() {
    runner()
        .run(&(-400i64..=400), |t| {
            let h = HalfInt::from_twice(t);
            prop_assert_eq!(h.to_string().parse::<HalfInt>().unwrap(), h);
            Ok(())
        })
        .unwrap();
}
