use markov_core::arith::{
    certified_compare, enclose_acosh, enclose_log, enclose_sqrt, Comparison, RealEnclosure,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn rational(lo: i64, hi: i64) -> impl Strategy<Value = BigRational> {
    (lo..hi, 1i64..1_000_000).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

/// Enclosures of several operations at one precision.
fn ops(x: &BigRational, prec: u32) -> Vec<(&'static str, RealEnclosure)> {
    let e = RealEnclosure::from_rational(x, prec);
    let mut v = vec![
        ("sqrt", enclose_sqrt(x, prec).unwrap()),
        ("ln", enclose_log(x, prec).unwrap()),
        ("exp", e.exp()),
        ("recip", e.recip().unwrap()),
        ("mul", e.mul(&e).sub(&RealEnclosure::from_int(3, prec))),
    ];
    if x >= &BigRational::from_integer(1.into()) {
        v.push(("acosh", enclose_acosh(x, prec).unwrap()));
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn refinement_is_nested_and_never_wider(x in rational(1, 50_000_000), prec in 24u32..400) {
        for ((name, coarse), (_, fine)) in ops(&x, prec).into_iter().zip(ops(&x, 2 * prec)) {
            prop_assert!(fine.is_within(&coarse), "{name}({x}) at {prec}: {fine} not within {coarse}");
            prop_assert!(fine.width() <= coarse.width(), "{name}({x}) widened");
        }
    }

    #[test]
    fn rational_comparisons_agree_with_exact_order(a in rational(-10_000, 10_000), b in rational(-10_000, 10_000)) {
        let expected = match a.cmp(&b) {
            std::cmp::Ordering::Less => Comparison::Less,
            std::cmp::Ordering::Equal => Comparison::Equal,
            std::cmp::Ordering::Greater => Comparison::Greater,
        };
        prop_assert_eq!(certified_compare(&a, &b), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// `acosh(x) = ln(x + sqrt(x^2 - 1))` on `[1, 10^6]`.
    #[test]
    fn acosh_log_identity(n in 1_000_000i64..1_000_000_000_000, d in 1_000_000i64..=1_000_000) {
        let x = BigRational::new(n.into(), d.into());
        let prec = 160;
        let lhs = enclose_acosh(&x, prec).unwrap();
        let x2m1 = &x * &x - BigRational::from_integer(1.into());
        let rhs = RealEnclosure::from_rational(&x, prec + 32)
            .add(&enclose_sqrt(&x2m1, prec + 32).unwrap())
            .ln()
            .unwrap();
        prop_assert!(rhs.is_within(&lhs) || lhs.is_within(&rhs), "{x}: {lhs} vs {rhs}");
        prop_assert!(lhs.overlaps(&rhs));
    }
}
