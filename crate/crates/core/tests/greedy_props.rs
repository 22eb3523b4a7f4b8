use betadd::greedy::{
    expand_golden, golden_digit, golden_orbit, golden_step, golden_step_f64, partial_sum,
    Violation,
};
use betadd::{cylinders, DigitSet, Family, GoldenDigit, QBeta};
use num_traits::{One, Zero};
use proptest::prelude::*;

/// A point of `[0, 2)` with a small denominator.
fn point() -> impl Strategy<Value = QBeta> {
    (-400i64..400, -400i64..400, 1i64..300)
        .prop_map(|(a, b, d)| QBeta::from_ints(a, b) * QBeta::ratio(1, d))
        .prop_filter("in [0, 2)", |x| !x.is_negative() && *x < QBeta::integer(2))
}

proptest! {
    #[test]
    fn remainder_identity(x in point(), n in 0usize..40) {
        let orbit = golden_orbit(&x, n).unwrap();
        let tail = &orbit.iterates[n];
        prop_assert!(!tail.is_negative() && *tail < QBeta::integer(2));
        let lhs = &x - partial_sum(&orbit.digits);
        prop_assert_eq!(&lhs, &(tail * QBeta::beta_pow(-(n as i32))));
        prop_assert!(lhs < QBeta::integer(2) * QBeta::beta_pow(-(n as i32)));
    }

    #[test]
    fn greedy_digit_is_the_largest_admissible(x in point()) {
        // the chosen digit j leaves βx - j in [0, 2) and no larger digit does
        let (d, next) = golden_step(&x).unwrap();
        prop_assert!(!next.is_negative());
        if let Some(bigger) = d.successor() {
            prop_assert!((x.mul_beta() - bigger.as_qbeta()).is_negative());
        }
        prop_assert_eq!(d, golden_digit(&x).unwrap());
    }

    #[test]
    fn float_step_agrees_away_from_breakpoints(x in 0.0f64..2.0) {
        let cuts = [2.0 / betadd::qbeta::BETA_F64, 3.0 / betadd::qbeta::BETA_F64];
        prop_assume!(cuts.iter().all(|c| (x - c).abs() > 1e-9));
        let exact = QBeta::ratio((x * 1e9).round() as i64, 1_000_000_000);
        prop_assume!(exact < QBeta::integer(2));
        let (d, _) = golden_step(&exact).unwrap();
        let (df, _) = golden_step_f64(exact.to_f64());
        prop_assert_eq!(d.value(), df);
    }

    #[test]
    fn validation_matches_the_conditions(
        gaps in prop::collection::vec(-1.0f64..6.0, 1..5),
        first in prop_oneof![Just(0.0f64), -1.0f64..2.0],
        base in 0.5f64..4.0,
    ) {
        let mut digits = vec![first];
        for g in &gaps {
            let last = *digits.last().unwrap();
            digits.push(last + g);
        }
        let ds = DigitSet::unchecked(digits.clone(), base);
        let top = *digits.last().unwrap();
        let max_gap = digits.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let expected_ok = base > 1.0
            && first == 0.0
            && digits.windows(2).all(|w| w[1] > w[0])
            && max_gap <= top / (base - 1.0);
        prop_assert_eq!(ds.validate().is_ok(), expected_ok);
        prop_assert_eq!(DigitSet::new(digits, base).is_ok(), expected_ok);
    }

    #[test]
    fn classical_orbits_stay_in_the_domain(base in 1.05f64..5.0, t in 0.0f64..1.0) {
        let ds = DigitSet::classical(base).unwrap();
        let end = ds.domain_end();
        let orbit = ds.orbit(t * end, 200).unwrap();
        for (x, d) in orbit.iterates.iter().zip(&orbit.digits) {
            prop_assert!(*x >= 0.0 && *x <= end);
            prop_assert!(ds.digits().contains(d));
        }
    }
}

#[test]
fn exact_orbits_keep_bounded_coefficients() {
    // x = (a + bβ)/d stays in [0, 2) with denominator d, and a conjugate that
    // contracts, so the numerators stay bounded for as long as we iterate
    let mut x = QBeta::from_ints(17, -5) * QBeta::ratio(1, 11);
    let bound = QBeta::integer(1000);
    for _ in 0..100_000 {
        x = golden_step(&x).unwrap().1;
        let a = x.a();
        let b = x.b();
        assert!(QBeta::rational(a.clone()).abs() < bound, "a = {a}");
        assert!(QBeta::rational(b.clone()).abs() < bound, "b = {b}");
    }
}

#[test]
fn left_endpoints_start_with_their_block() {
    for n in 1..=9 {
        for c in cylinders::enumerate(n, Family::All) {
            let digits = expand_golden(&c.interval.left, n).unwrap();
            assert_eq!(digits, c.block, "rank {n}");
        }
    }
}

#[test]
fn reference_expansions() {
    let digits = |x: &QBeta| {
        expand_golden(x, 14)
            .unwrap()
            .iter()
            .map(|d| char::from(b'0' + d.value()))
            .collect::<String>()
    };
    assert_eq!(digits(&QBeta::one()), "02002002002002");
    assert_eq!(digits(&QBeta::beta_pow(-3)), "00002002002002");
    assert_eq!(digits(&QBeta::zero()), "00000000000000");
}

#[test]
fn out_of_domain_points() {
    for s in ["2", "-1/1000", "b^2"] {
        let x: QBeta = s.parse().unwrap();
        assert_eq!(golden_step(&x).unwrap_err().kind(), "domain");
    }
}

#[test]
fn violation_examples() {
    let golden = DigitSet::golden();
    assert_eq!(golden.validate(), Ok(()));
    assert_eq!(golden.digits(), &[0.0, 2.0, 3.0]);
    let v = DigitSet::unchecked(vec![1.0, 2.0], 1.5).validate();
    assert_eq!(v, Err(Violation::FirstDigitNotZero { first: 1.0 }));
    let v = DigitSet::unchecked(vec![0.0, 3.0, 3.0], 1.5).validate();
    assert_eq!(v, Err(Violation::NotIncreasing { index: 2 }));
    let v = DigitSet::unchecked(vec![0.0, 5.0], 3.0).validate();
    assert!(matches!(v, Err(Violation::GapTooLarge { .. })));
    let v = DigitSet::unchecked(vec![0.0, 1.0], 1.0).validate();
    assert!(matches!(v, Err(Violation::BaseNotExpanding { .. })));
    assert_eq!(
        DigitSet::unchecked(vec![0.0], 2.0).validate(),
        Err(Violation::TooFewDigits)
    );
    assert_eq!(
        DigitSet::new(vec![0.0, 5.0], 3.0).unwrap_err().kind(),
        "invalid_digit_set"
    );
}

#[test]
fn digit_conversions() {
    for d in GoldenDigit::ALL {
        assert_eq!(GoldenDigit::try_from(d.value()).unwrap(), d);
    }
    assert!(GoldenDigit::try_from(1).is_err());
    assert!(betadd::greedy::parse_block("0210").is_err());
}
