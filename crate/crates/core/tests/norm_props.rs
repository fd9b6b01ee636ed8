use markov_core::arith::{certified_compare, Comparison};
use markov_core::norm::{extend_norm, stable_norm, HomologyClass, Symmetry};
use proptest::prelude::*;

fn class() -> impl Strategy<Value = HomologyClass> {
    (-300i64..300, -300i64..300)
        .prop_filter("non-zero", |(x, y)| (*x, *y) != (0, 0))
        .prop_map(|(x, y)| HomologyClass::new(x, y))
}

fn sector_class() -> impl Strategy<Value = (u64, u64)> {
    (1u64..100, 0u64..100).prop_map(|(q, p)| (q, p % (q + 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn norm_is_invariant_under_the_twelve_symmetries(v in class()) {
        let base = extend_norm(v, 128).unwrap();
        for g in Symmetry::all() {
            prop_assert_eq!(&extend_norm(g.apply(v), 128).unwrap(), &base, "{} under {:?}", v, g);
        }
        prop_assert_eq!(extend_norm(v.scale(-1), 128).unwrap(), base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn norm_is_homogeneous(v in class().prop_filter("primitive", |v| v.gcd() == 1)) {
        let base = extend_norm(v, 128).unwrap();
        for n in 1..=10 {
            prop_assert_eq!(extend_norm(v.scale(n), 128).unwrap(), base.scale(n));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn triangle_inequality(u in sector_class(), v in sector_class()) {
        let nu = |wp: u32| stable_norm(u.0, u.1, wp).unwrap();
        let nv = |wp: u32| stable_norm(v.0, v.1, wp).unwrap();
        let lhs = |wp: u32| stable_norm(u.0 + v.0, u.1 + v.1, wp).unwrap();
        let rhs = |wp: u32| nu(wp).add(&nv(wp));
        let c = certified_compare(&lhs, &rhs);
        // Equality holds exactly when u and v are parallel.
        let parallel = u.0 * v.1 == u.1 * v.0;
        if parallel {
            prop_assert!(lhs(192).overlaps(&rhs(192)));
        } else {
            prop_assert_eq!(c, Comparison::Less, "{:?} + {:?}", u, v);
        }
    }
}
