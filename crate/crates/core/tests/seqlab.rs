use proptest::prelude::*;
use relint::rat::{frac, int};
use relint::seqlab::{ell1ball_iri, ell1ball_qri, TailSequence};
use relint::Rat;

const K: usize = 64;

fn sequence() -> impl Strategy<Value = TailSequence> {
    (prop::collection::vec(-6i64..=6, 0..8), -5i64..=5, 1i64..=7).prop_map(|(prefix, c, r)| {
        let prefix = prefix.into_iter().map(|p| frac(p, 3)).collect();
        TailSequence::geometric(prefix, frac(c, 2), frac(r, 8)).unwrap()
    })
}

fn abs(r: &Rat) -> Rat {
    if *r < int(0) { -r.clone() } else { r.clone() }
}

proptest! {
    #[test]
    fn norms_equal_partial_sums_plus_exact_remainder(x in sequence()) {
        let rho = x.tail().unwrap().rho.clone();
        let next = x.coordinate(K + 1);
        let one: Rat = (1..=K).map(|k| abs(&x.coordinate(k))).sum::<Rat>() + abs(&next) / (int(1) - &rho);
        let two: Rat = (1..=K).map(|k| x.coordinate(k) * x.coordinate(k)).sum::<Rat>()
            + &next * &next / (int(1) - &rho * &rho);
        let sup = (1..=K).map(|k| abs(&x.coordinate(k))).max().unwrap();
        prop_assert_eq!(x.norm1(), one);
        prop_assert_eq!(x.norm2_squared(), two);
        prop_assert_eq!(x.norm_inf(), sup);
    }

    #[test]
    fn intrinsic_interior_of_l1_ball_is_inside_quasi_interior(x in sequence()) {
        prop_assert!(!ell1ball_iri(&x) || ell1ball_qri(&x));
    }

    #[test]
    fn inner_product_with_itself_is_squared_norm(x in sequence()) {
        prop_assert_eq!(x.inner(&x), x.norm2_squared());
    }
}
