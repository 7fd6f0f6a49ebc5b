use proptest::prelude::*;

use horn_core::angle::Angle;
use horn_core::isometry::{psi, AnglePair, ClassTriple};
use horn_core::walls::{linear_forms, wall_catalog, Ijk};

fn exact_pair() -> impl Strategy<Value = AnglePair> {
    (1i64..=24).prop_flat_map(|d| (1..2 * d, 1..2 * d, Just(d))).prop_map(|(a, b, d)| AnglePair::pi_frac(a, d, b, d))
}

fn exact_triple() -> impl Strategy<Value = ClassTriple> {
    (exact_pair(), exact_pair(), exact_pair()).prop_map(|(a, b, c)| ClassTriple::new(a, b, c))
}

proptest! {
    #[test]
    fn complements_sum_to_s(t in exact_triple()) {
        let v = linear_forms(&t);
        for x in Ijk::ALL {
            prop_assert_eq!(v.sigma(x) + v.sigma(x.bar()), v.s);
            prop_assert_eq!(v.h(x) + v.h(x.bar()), v.s);
            prop_assert_eq!(v.h(x), v.sigma(x).scale(2) - v.sigma(x.bar()));
        }
    }

    #[test]
    fn psi_reflects_the_forms(t in exact_triple()) {
        let (v, w) = (linear_forms(&t), linear_forms(&psi(&t)));
        prop_assert_eq!(w.s, Angle::pi_times(12) - v.s);
        for x in Ijk::ALL {
            prop_assert_eq!(w.h(x), Angle::pi_times(6) - v.h(x.psi_partner()));
        }
    }

    #[test]
    fn wall_forms_match_their_coefficients(t in exact_triple()) {
        let v = linear_forms(&t);
        let x = t.radians();
        for w in wall_catalog() {
            let coef = w.form().coefficients();
            let dot: f64 = coef.iter().zip(x).map(|(&c, xi)| c as f64 * xi).sum();
            prop_assert!((w.form().eval(&v).to_radians() - dot).abs() <= 1e-12);
        }
    }

    #[test]
    fn psi_maps_walls_to_walls(t in exact_triple()) {
        // Every active wall at t has an active partner at ψ(t).
        let (v, w) = (linear_forms(&t), linear_forms(&psi(&t)));
        let active = |vals| wall_catalog().iter().filter(|wall| wall.is_active(vals, 0.0)).count();
        prop_assert_eq!(active(&v), active(&w));
    }
}
