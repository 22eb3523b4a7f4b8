use betadd::cylinders::{
    cylinder, cylinder_interval, cylinder_str, decompose, enumerate, enumerate_exhaustive,
    full_length, image, push_forward, return_times, total_length,
};
use betadd::greedy::{block_to_string, expand_golden, parse_block};
use betadd::{Family, GoldenDigit, Interval, QBeta};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn q(s: &str) -> QBeta {
    s.parse().unwrap()
}

/// Minimal full blocks of rank at most 9.
fn d_block() -> impl Strategy<Value = Vec<GoldenDigit>> {
    let pool: Vec<Vec<GoldenDigit>> = (1..=9)
        .flat_map(|n| enumerate(n, Family::D))
        .map(|c| c.block)
        .collect();
    prop::sample::select(pool)
}

/// Full blocks built by concatenating minimal ones.
fn full_block(max_parts: usize) -> impl Strategy<Value = Vec<GoldenDigit>> {
    prop::collection::vec(d_block(), 1..=max_parts).prop_map(|parts| parts.concat())
}

/// Any realised block of rank 1 to 10.
fn any_block() -> impl Strategy<Value = Vec<GoldenDigit>> {
    prop::collection::vec(prop::sample::select(GoldenDigit::ALL.to_vec()), 1..=10)
        .prop_filter("non-empty cylinder", |b| !cylinder_interval(b).is_empty())
}

proptest! {
    #[test]
    fn full_blocks_concatenate(a in full_block(3), b in full_block(3)) {
        prop_assume!(a.len() + b.len() <= 20);
        let ab = [a.clone(), b.clone()].concat();
        let c = cylinder(&ab);
        prop_assert!(c.full);
        prop_assert_eq!(c.interval.length(), full_length(ab.len()));
        // Δ(AB) is Δ(A) scaled and shifted by the branches of A
        let inside = push_forward(&c.interval, &a);
        prop_assert_eq!(inside, cylinder_interval(&b));
    }

    #[test]
    fn shift_maps_into_the_tail(block in any_block()) {
        let c = cylinder_interval(&block);
        let shifted = push_forward(&c, &block[..1]);
        let tail = cylinder_interval(&block[1..]);
        prop_assert!(tail.left <= shifted.left && shifted.right <= tail.right);
    }

    #[test]
    fn image_is_an_initial_segment(block in any_block()) {
        let img = image(&block).unwrap();
        prop_assert!(img.left.is_zero());
        // right ends lie on the orbits of 1 and 1/β³, or at 2
        let candidates: Vec<QBeta> =
            (-3..=1).map(QBeta::beta_pow).chain([QBeta::integer(2)]).collect();
        prop_assert!(candidates.contains(&img.right), "image {}", img.right);
        prop_assert_eq!(cylinder(&block).full, img.right == QBeta::integer(2));
    }

    #[test]
    fn full_blocks_split_into_minimal_full_blocks(block in full_block(4)) {
        let dec = decompose(&block).unwrap();
        prop_assert_eq!(dec.concatenated(), block.clone());
        let mut end = 0;
        for (sub, &t) in dec.blocks.iter().zip(&dec.return_times) {
            end += sub.len();
            prop_assert_eq!(end, t);
            let minimal: Vec<Vec<GoldenDigit>> =
                enumerate(sub.len(), Family::D).into_iter().map(|c| c.block).collect();
            prop_assert!(minimal.contains(sub), "{}", block_to_string(sub));
            // no proper prefix of a subblock is full
            for k in 1..sub.len() {
                prop_assert!(!cylinder(&sub[..k]).full);
            }
        }
        prop_assert_eq!(return_times(&block), dec.return_times);
    }

    #[test]
    fn cylinders_contain_exactly_their_points(block in any_block(), t in 0.0f64..1.0) {
        let c = cylinder_interval(&block);
        let k = (t * 1e6) as i64;
        let x = &c.left + c.length() * QBeta::ratio(k, 1_000_000);
        prop_assert_eq!(expand_golden(&x, block.len()).unwrap(), block);
    }
}

#[test]
fn partitions_of_the_domain() {
    for n in 1..=14 {
        let cs = enumerate(n, Family::All);
        assert_eq!(total_length(&cs), QBeta::integer(2), "rank {n}");
        let mut right = QBeta::zero();
        for c in &cs {
            assert_eq!(c.interval.left, right, "gap before {}", c.block_string());
            right = c.interval.right.clone();
        }
        assert_eq!(right, QBeta::integer(2));
    }
}

#[test]
fn closed_forms_match_search() {
    for n in 1..=14 {
        for family in [Family::D, Family::B] {
            let closed = enumerate(n, family);
            let searched = enumerate_exhaustive(n, family);
            assert_eq!(closed, searched, "rank {n} {family:?}");
        }
    }
}

#[test]
fn full_and_non_full_blocks_cover_the_domain() {
    // D_1 … D_n together with B_n partition [0, 2)
    for n in 1..=14 {
        let mut parts: Vec<Interval> = (1..=n)
            .flat_map(|k| enumerate(k, Family::D))
            .chain(enumerate(n, Family::B))
            .map(|c| c.interval)
            .collect();
        parts.sort_by(|a, b| a.left.cmp(&b.left));
        let mut right = QBeta::zero();
        for p in &parts {
            assert_eq!(p.left, right);
            right = p.right.clone();
        }
        assert_eq!(right, QBeta::integer(2), "rank {n}");
    }
}

#[test]
fn examples() {
    let c = cylinder_str("2000").unwrap();
    assert_eq!(c.interval.left, q("2/b"));
    assert!(c.full);
    let c = cylinder_str("2002").unwrap();
    assert_eq!(c.interval.left, q("2/b + 2/b^4"));
    assert!(!c.full);
    let c = cylinder_str("200").unwrap();
    assert!(c.full);
    assert_eq!(c.interval, Interval::new(q("2/b"), q("2/b") + full_length(3)));
    assert_eq!(image(&parse_block("2").unwrap()).unwrap().right, QBeta::one());
    assert_eq!(image(&parse_block("3").unwrap()).unwrap().right, QBeta::beta_pow(-3));
    assert_eq!(image(&parse_block("0").unwrap()).unwrap().right, QBeta::integer(2));
    assert_eq!(image(&parse_block("33").unwrap()).unwrap_err().kind(), "empty_cylinder");
}

#[test]
fn decompositions() {
    let d = decompose(&parse_block("0").unwrap()).unwrap();
    assert_eq!(d.block_strings(), ["0"]);
    assert_eq!(d.return_times, [1]);
    let d = decompose(&parse_block("0200").unwrap()).unwrap();
    assert_eq!(d.block_strings(), ["0", "200"]);
    assert_eq!(d.return_times, [1, 4]);
    assert_eq!(
        decompose(&parse_block("20").unwrap()).unwrap_err().kind(),
        "not_full"
    );
    assert_eq!(
        decompose(&parse_block("33").unwrap()).unwrap_err().kind(),
        "empty_cylinder"
    );
}

#[test]
fn grid_oracle() {
    // classify 10^4 grid points by their first five digits and compare with
    // the exact cylinders
    let n = 5;
    let steps = 10_000i64;
    let cs = enumerate(n, Family::All);
    let mut counts = vec![0usize; cs.len()];
    for k in 0..steps {
        let x = QBeta::ratio(2 * k, steps);
        let digits = expand_golden(&x, n).unwrap();
        assert!(
            !block_to_string(&digits).contains("33"),
            "grid point {x} has digits 33"
        );
        let i = cs.iter().position(|c| c.block == digits).unwrap();
        assert!(cs[i].interval.contains(&x));
        counts[i] += 1;
    }
    for (c, &count) in cs.iter().zip(&counts) {
        let expected = c.interval.length().to_f64() / 2.0 * steps as f64;
        assert!((count as f64 - expected).abs() <= 1.0, "{}", c.block_string());
    }
    assert!(cylinder_str("33").unwrap().is_empty());
}
