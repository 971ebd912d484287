use proptest::prelude::*;
use relint::generate::{random_cone, random_polyhedron, rng};
use relint::interiors::polar;
use relint::sets::set_equal;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vertex_and_facet_forms_describe_one_set(seed in any::<u64>()) {
        let p = random_polyhedron(&mut rng(seed), 3);
        let back = p.vrep().to_h();
        prop_assert!(set_equal(&p, &back).unwrap());
    }

    #[test]
    fn bipolar_recovers_the_cone(seed in any::<u64>()) {
        let c = random_cone(&mut rng(seed), 4);
        prop_assert!(polar(&polar(&c)).set_equal(&c));
    }
}
