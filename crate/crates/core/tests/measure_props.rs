use betadd::measure::birkhoff::{birkhoff, piece_bins, uniform_bins, BirkhoffConfig};
use betadd::measure::{
    classical_density, classical_density_golden, fiber_oracle, golden_density, golden_masses,
    tower_density, transfer_integrals, transfer_residual,
};
use betadd::natext::tower::slice_length;
use betadd::{GoldenDigit, Interval, PiecewiseDensity, QBeta};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn q(s: &str) -> QBeta {
    s.parse().unwrap()
}

/// A rational point of `(0, 2)` with denominator up to 10^6.
fn point() -> impl Strategy<Value = QBeta> {
    (1i64..2_000_000).prop_map(|k| QBeta::ratio(k, 1_000_000))
}

proptest! {
    #[test]
    fn density_is_invariant_pointwise(x in point()) {
        // rational points never hit the breakpoints, which are irrational or 0, 1, 2
        prop_assume!(x != QBeta::one());
        let h = golden_density();
        prop_assert!(transfer_residual(&x, &h).unwrap().is_zero());
    }

    #[test]
    fn preimages_have_the_same_mass(x in point(), y in point()) {
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        prop_assume!(lo < hi);
        let e = Interval::new(lo, hi);
        let inv = QBeta::beta_pow(-1);
        let pre: Vec<Interval> = GoldenDigit::ALL
            .iter()
            .map(|j| e.affine(&inv, &(&inv * j.as_qbeta())).intersect(&j.branch()))
            .filter(|p| !p.is_empty())
            .collect();
        let before = golden_masses(std::slice::from_ref(&e))[0].clone();
        let after: QBeta = golden_masses(&pre).into_iter().sum();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn reconstructions_agree(x in point()) {
        let h = golden_density();
        prop_assert_eq!(fiber_oracle().value_at(&x), h.value_at(&x));
        prop_assert_eq!(tower_density().value_at(&x), h.value_at(&x));
    }

    #[test]
    fn integrals_are_additive(x in point(), y in point(), z in point()) {
        let mut v = [x, y, z];
        v.sort();
        let h = golden_density();
        let whole = h.integral_over(&v[0], &v[2]);
        let parts = h.integral_over(&v[0], &v[1]) + h.integral_over(&v[1], &v[2]);
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn classical_density_integrates_to_one(beta in 1.05f64..6.0, n in 1usize..40) {
        let d = classical_density(beta, n).unwrap();
        prop_assert!((d.integral() - 1.0).abs() < 1e-9);
        prop_assert!(d.values().windows(2).all(|w| w[0] >= w[1] - 1e-12));
    }
}

#[test]
fn uniform_density_is_not_invariant() {
    let uniform = PiecewiseDensity::new(
        vec![QBeta::zero(), QBeta::integer(2)],
        vec![QBeta::ratio(1, 2)],
    )
    .unwrap();
    let residual = transfer_residual(&q("1/2"), &uniform).unwrap();
    assert!(!residual.is_zero());
    assert!(transfer_integrals(&uniform).iter().any(|c| !c.holds()));
    assert!(transfer_integrals(&golden_density()).iter().all(|c| c.holds()));
}

#[test]
fn residual_errors() {
    let h = golden_density();
    assert_eq!(
        transfer_residual(&q("b^-2"), &h).unwrap_err().kind(),
        "breakpoint_collision"
    );
    assert_eq!(transfer_residual(&q("2"), &h).unwrap_err().kind(), "domain");
}

#[test]
fn shape_of_the_density() {
    let h = golden_density();
    assert_eq!(h.integral(), QBeta::one());
    assert!(h.values().windows(2).all(|w| w[0] > w[1]));
    // the last piece [β, 2) only sees the base strip of the tower
    let x = q("9/5");
    assert_eq!(slice_length(&x), q("2/b^2"));
    assert_eq!(h.value_at(&x), QBeta::one() / q("16 - 7b"));
}

#[test]
fn classical_limits() {
    let one = classical_density_golden(1);
    assert_eq!(one.breakpoints(), &[QBeta::zero(), QBeta::one()]);
    assert_eq!(one.values(), &[QBeta::one()]);
    let f = classical_density(2.5, 1).unwrap();
    assert_eq!(f.values(), &[1.0]);
    let exact = classical_density_golden(60);
    let b = QBeta::beta();
    let three_minus_b = QBeta::integer(3) - &b;
    assert_eq!(exact.value_at(&q("1/2")), &b / &three_minus_b);
    assert_eq!(exact.value_at(&q("4/5")), QBeta::one() / &three_minus_b);
    assert_eq!(exact, classical_density_golden(3));
}

#[test]
fn birkhoff_is_reproducible() {
    let cfg = BirkhoffConfig {
        iters: 20_000,
        seed: 5,
        shards: 4,
        start: None,
    };
    let a = birkhoff(&piece_bins(), &cfg).unwrap();
    let b = birkhoff(&piece_bins(), &cfg).unwrap();
    assert_eq!(a, b);
    let total: f64 = a.rows.iter().map(|r| r.observed).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let expected: f64 = a.rows.iter().map(|r| r.expected).sum();
    assert!((expected - 1.0).abs() < 1e-12);
    assert!(uniform_bins(0).is_err());
    let bad = vec![
        Interval::new(QBeta::zero(), QBeta::one()),
        Interval::new(q("1/2"), QBeta::integer(2)),
    ];
    assert_eq!(birkhoff(&bad, &cfg).unwrap_err().kind(), "invalid_argument");
}
