use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use horn_core::isometry::{AnglePair, ClassTriple};
use horn_core::oracle::{
    find_witness, momentum_triple, sample_momentum, wall_clearance, MomentumSample, SamplerConfig,
};
use horn_core::polytopes::{in_solution_set, polytope_member};

fn pair() -> impl Strategy<Value = AnglePair> {
    (0.1f64..6.18, 0.1f64..6.18)
        .prop_filter("distinct", |(x, y)| (x - y).abs() > 0.1)
        .prop_map(|(x, y)| AnglePair::from_radians(x.max(y), x.min(y)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sampled_momenta_are_members(a in pair(), b in pair(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in sample_momentum(&a, &b, 50, &mut rng) {
            if let MomentumSample::Elliptic { class } = s {
                prop_assert!(in_solution_set(&momentum_triple(&a, &b, &class), 1e-6));
            }
        }
    }

    #[test]
    fn witness_layers_are_predicted(a in pair(), b in pair(), c in pair(), seed in 0u64..1000) {
        let t = ClassTriple::new(a, b, c);
        let report = polytope_member(&t, 1e-9);
        prop_assume!(report.member && wall_clearance(&t.radians()) > 0.05);
        let cfg = SamplerConfig { seed, budget: 50_000, ..Default::default() };
        if let Ok(w) = find_witness(&t, &cfg) {
            prop_assert!(report.layers.contains(&w.layer));
            // Block witnesses are exact to roundoff; Monte Carlo ones are polished to tol/10.
            prop_assert!(w.product_residual <= 1e-9 && w.class_error <= cfg.tol / 10.0);
            prop_assert!((w.product_scalar.re.hypot(w.product_scalar.im) - 1.0).abs() <= 1e-9);
        }
    }
}
