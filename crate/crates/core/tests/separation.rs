use proptest::prelude::*;
use relint::generate::{random_domain_pair, random_polyhedron, rng, Overlap};
use relint::interiors::{qri_member, spread, sweep_points};
use relint::rat::frac;
use relint::separation::{properly_separate_point, properly_separate_sets, ri_intersect};
use relint::sets::HPolyhedron;

fn overlap() -> impl Strategy<Value = Overlap> {
    prop_oneof![Just(Overlap::Qualified), Just(Overlap::Disjoint), Just(Overlap::Touching), Just(Overlap::Random)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn point_separable_iff_outside_qri(seed in any::<u64>()) {
        let p = random_polyhedron(&mut rng(seed), 3);
        for x in spread(sweep_points(&p), 6) {
            let cert = properly_separate_point(&p, &x).unwrap();
            prop_assert_eq!(cert.is_some(), !qri_member(&p, &x).unwrap());
            if let Some(c) = cert {
                prop_assert!(c.scaled(&frac(5, 2)).verify(&p, &HPolyhedron::point(&x)).is_ok());
            }
        }
    }

    #[test]
    fn sets_separable_iff_relative_interiors_miss(seed in any::<u64>(), dim in 1usize..=3, mode in overlap()) {
        let (p, q) = random_domain_pair(&mut rng(seed), dim, mode);
        let cert = properly_separate_sets(&p, &q).unwrap();
        prop_assert_eq!(cert.is_some(), !ri_intersect(&p, &q).unwrap());
        if let Some(c) = cert {
            prop_assert!(c.verify(&p, &q).is_ok());
        }
    }
}
