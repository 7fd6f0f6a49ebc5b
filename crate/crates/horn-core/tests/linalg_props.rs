use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use horn_core::isometry::{elliptic_rep, AnglePair};
use horn_core::linalg::{eigensystem_3x3, signature, unitary_residual, HermitianForm, Tolerances};
use horn_core::oracle::random_u21;

fn pair() -> impl Strategy<Value = AnglePair> {
    (0.05f64..6.2, 0.05f64..6.2)
        .prop_filter("distinct", |(x, y)| (x - y).abs() > 0.05)
        .prop_map(|(x, y)| AnglePair::from_radians(x.max(y), x.min(y)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_u21_is_unitary(seed in any::<u64>()) {
        let g = random_u21(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let j = HermitianForm::standard();
        prop_assert!(unitary_residual(g.matrix(), &j) <= 1e-9);
        prop_assert!((g.matrix().determinant().norm() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn eigenpairs_have_small_residuals(seed in any::<u64>(), p in pair()) {
        let q = random_u21(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        // Huge boosts make the eigenbasis numerically singular, which the solver rejects by design.
        prop_assume!(q.matrix().norm() <= 100.0);
        let m = *elliptic_rep(&p).conjugate_by(&q).matrix();
        let es = eigensystem_3x3(&m, &Tolerances::default()).unwrap();
        for (lam, v) in es.pairs() {
            prop_assert!((m * v - v * lam).norm() <= 1e-9 * m.norm());
        }
    }

    #[test]
    fn congruence_preserves_signature(seed in any::<u64>()) {
        let q = random_u21(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let h = q.matrix().adjoint() * HermitianForm::standard().matrix() * q.matrix();
        let h = HermitianForm::new(h, 1e-9).unwrap();
        prop_assert_eq!(signature(&h, &Tolerances::default()), (2, 1, 0));
    }
}
