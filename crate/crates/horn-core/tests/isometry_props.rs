use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use horn_core::isometry::{angle_pair, elliptic_rep, pair_distance, psi, AnglePair, ClassTriple};
use horn_core::linalg::Tolerances;
use horn_core::oracle::random_u21;

fn pair() -> impl Strategy<Value = AnglePair> {
    (0.01f64..6.27, 0.01f64..6.27)
        .prop_filter("distinct", |(x, y)| (x - y).abs() > 0.01)
        .prop_map(|(x, y)| AnglePair::from_radians(x.max(y), x.min(y)))
}

fn exact_pair() -> impl Strategy<Value = AnglePair> {
    (1i64..=24).prop_flat_map(|d| (1..2 * d, 1..2 * d, Just(d))).prop_map(|(a, b, d)| AnglePair::pi_frac(a, d, b, d))
}

proptest! {
    #[test]
    fn inverse_is_an_involution(p in pair()) {
        prop_assert!(pair_distance(&p.inverse().inverse(), &p) <= 1e-12);
    }

    #[test]
    fn exact_inverse_is_an_involution(p in exact_pair()) {
        prop_assert_eq!(p.inverse().inverse(), p);
    }

    #[test]
    fn elliptic_rep_round_trip(p in pair()) {
        let got = angle_pair(&elliptic_rep(&p), &Tolerances::default()).unwrap();
        prop_assert!(pair_distance(&got, &p) <= 1e-9);
    }

    #[test]
    fn class_is_conjugation_invariant(p in pair(), seed in any::<u64>()) {
        prop_assume!((p.radians().0 - p.radians().1).abs() > 0.05);
        let q = random_u21(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        // Huge boosts make the eigenbasis numerically singular, which the solver rejects by design.
        prop_assume!(q.matrix().norm() <= 100.0);
        let got = angle_pair(&elliptic_rep(&p).conjugate_by(&q), &Tolerances::default()).unwrap();
        prop_assert!(pair_distance(&got, &p) <= 1e-7);
    }

    #[test]
    fn psi_is_an_involution(a in exact_pair(), b in exact_pair(), c in exact_pair()) {
        let t = ClassTriple::new(a, b, c);
        prop_assert_eq!(psi(&psi(&t)), t);
    }
}
