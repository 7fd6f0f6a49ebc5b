use proptest::prelude::*;

use horn_core::isometry::{psi, AnglePair, ClassTriple};
use horn_core::polytopes::{in_solution_set, polytope_member, psi_consistency, PolytopeId};
use horn_core::walls::linear_forms;

fn pair() -> impl Strategy<Value = AnglePair> {
    (0.001f64..6.282, 0.001f64..6.282)
        .prop_filter("distinct", |(x, y)| (x - y).abs() > 0.001)
        .prop_map(|(x, y)| AnglePair::from_radians(x.max(y), x.min(y)))
}

fn triple() -> impl Strategy<Value = ClassTriple> {
    (pair(), pair(), pair()).prop_map(|(a, b, c)| ClassTriple::new(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1024))]

    #[test]
    fn membership_is_psi_symmetric(t in triple()) {
        prop_assert!(psi_consistency(&t, 1e-9));
        prop_assert_eq!(in_solution_set(&t, 1e-9), in_solution_set(&psi(&t), 1e-9));
    }

    #[test]
    fn closure_contains_interior(t in triple()) {
        let v = linear_forms(&t);
        for p in PolytopeId::ALL {
            if p.contains_strict(&v) {
                prop_assert!(p.contains_closed(&v, 0.0));
            }
            prop_assert_eq!(p.mirror().mirror(), p);
            prop_assert_eq!(p.mirror().layer(), p.layer().mirror());
        }
    }

    #[test]
    fn report_layers_match_polytopes(t in triple()) {
        let r = polytope_member(&t, 1e-9);
        prop_assert_eq!(r.member, !r.polytopes.is_empty());
        for p in &r.polytopes {
            prop_assert!(r.layers.contains(&p.layer()));
        }
        prop_assert_eq!(r.member, in_solution_set(&t, 1e-9));
    }
}
