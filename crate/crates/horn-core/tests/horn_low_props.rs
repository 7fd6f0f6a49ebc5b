use std::f64::consts::PI;

use proptest::prelude::*;

use horn_core::horn_low::{pu11_construct, pu11_member, u11_class, u2_class, u2_construct, u2_member, PU11Triple};
use horn_core::isometry::{circular_distance, pair_distance, AnglePair, ClassTriple};

/// U(2) member triples: five free angles, the sixth solved so that S = 2kπ.
fn u2_triple() -> impl Strategy<Value = ClassTriple> {
    (1i64..=4, proptest::array::uniform5(0.0f64..2.0 * PI)).prop_filter_map("member", |(k, x)| {
        let a = AnglePair::from_radians(x[0].max(x[1]), x[0].min(x[1]));
        let b = AnglePair::from_radians(x[2].max(x[3]), x[2].min(x[3]));
        let g2 = 2.0 * PI * k as f64 - x.iter().sum::<f64>();
        if !(0.0..=x[4]).contains(&g2) {
            return None;
        }
        let t = ClassTriple::new(a, b, AnglePair::from_radians(x[4], g2));
        u2_member(&t).member.then_some(t)
    })
}

fn pu11_triple() -> impl Strategy<Value = [f64; 3]> {
    proptest::array::uniform3(1e-6f64..2.0 * PI - 1e-6).prop_filter("away from the gap", |x| {
        let s: f64 = x.iter().sum();
        !(2.0 * PI - 1e-6..=4.0 * PI + 1e-6).contains(&s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn u2_construct_round_trip(t in u2_triple()) {
        let s = u2_construct(&t).unwrap();
        prop_assert!(s.product_residual() <= 1e-9);
        for (m, p) in [s.a, s.b, s.c].iter().zip(t.pairs()) {
            prop_assert!(pair_distance(&u2_class(m), &p) <= 1e-8);
        }
    }

    #[test]
    fn pu11_construct_round_trip(x in pu11_triple()) {
        let s = pu11_construct(&PU11Triple::from_radians(x[0], x[1], x[2])).unwrap();
        prop_assert!(s.product_residual() <= 1e-9);
        for (m, want) in [s.a, s.b, s.c].iter().zip(x) {
            prop_assert!(circular_distance(u11_class(m).unwrap(), want) <= 1e-8);
        }
    }

    #[test]
    fn pu11_member_is_symmetric(x in proptest::array::uniform3(0.0f64..2.0 * PI)) {
        let m = |a, b, c| pu11_member(&PU11Triple::from_radians(a, b, c)).member;
        let base = m(x[0], x[1], x[2]);
        prop_assert_eq!(base, m(x[1], x[2], x[0]));
        prop_assert_eq!(base, m(x[1], x[0], x[2]));
    }
}
