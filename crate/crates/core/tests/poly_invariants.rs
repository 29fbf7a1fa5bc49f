use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

use wwlab::poly::{faulhaber, PolyReal};
use wwlab::phase::PhaseStream;

/// `frac(p(n)·t)` by exact rational arithmetic.
fn exact_phase(coeffs: &[i64], t: f64, n: i64) -> f64 {
    let t = BigRational::from_float(t).unwrap();
    let n = BigInt::from(n);
    let value = coeffs
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, &c| acc * &n + BigInt::from(c));
    let x = BigRational::from_integer(value) * t;
    let frac = x.numer().mod_floor(x.denom());
    BigRational::new(frac, x.denom().clone()).to_f64().unwrap()
}

fn circular(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

proptest! {
    #[test]
    fn difference_is_exact(coeffs in prop::collection::vec(-20i64..=20, 1..=7),
                           h in prop_oneof![-5i64..=-1, 1i64..=5],
                           n in -100i64..=100) {
        let p = PolyReal::from_integers(&coeffs);
        let d = p.difference(h);
        prop_assert_eq!(d.eval(n), p.eval(n + h) - p.eval(n));
    }

    #[test]
    fn shift_and_scale_compose(coeffs in prop::collection::vec(-20i64..=20, 1..=6),
                               h in -5i64..=5, a in -4i64..=4, n in -50i64..=50) {
        let p = PolyReal::from_integers(&coeffs);
        prop_assert_eq!(p.shift(h).eval_i128(n), p.eval_i128(n + h));
        prop_assert_eq!(p.compose_scale(a).eval_i128(n), p.eval_i128(a * n));
    }
}

#[test]
fn faulhaber_matches_literal_sums() {
    for q in 0..=8u32 {
        let s = faulhaber(q).unwrap();
        let mut literal = BigInt::zero();
        for n in 0..=10_000i64 {
            assert_eq!(
                s.eval_exact(&BigInt::from(n)),
                BigRational::from_integer(literal.clone()),
                "q = {q}, n = {n}"
            );
            literal += BigInt::from(n).pow(q);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn phase_stream_matches_exact_oracle(coeffs in prop::collection::vec(-9i64..=9, 1..=5), t in 0.0f64..1.0) {
        let p = PolyReal::from_integers(&coeffs);
        for (n, phase) in PhaseStream::new(&p, t, 0).take(100_001).enumerate() {
            if n % 997 == 0 || n == 100_000 {
                let expected = exact_phase(&coeffs, t, n as i64);
                prop_assert!(circular(phase.value(), expected) <= 1e-9, "n = {}", n);
            }
        }
    }

    #[test]
    fn phase_stream_from_negative_start(coeffs in prop::collection::vec(-9i64..=9, 1..=5), t in 0.0f64..1.0,
                                         start in -1_000i64..0) {
        let p = PolyReal::from_integers(&coeffs);
        for (i, phase) in PhaseStream::new(&p, t, start).take(2_000).enumerate() {
            let n = start + i as i64;
            prop_assert!(circular(phase.value(), exact_phase(&coeffs, t, n)) <= 1e-12);
        }
    }
}
