mod common;

use centred_simplex::Vector;
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reflection_negates_directions_and_keeps_radius(xs in any_set(5, 6)) {
        let r = xs.reflect();
        prop_assert_eq!(to_na(&r.direction_matrix()), -to_na(&xs.direction_matrix()));
        prop_assert_eq!(r.radius(), xs.radius());
        prop_assert_eq!(r.x0(), xs.x0());
    }

    #[test]
    fn centred_difference_is_half_the_one_sided_gap(xs in any_set(5, 6), f in smooth(5, -1.0..1.0)) {
        let f = |y: &Vector| f.eval(y);
        let dc = xs.evaluate(f).unwrap().delta_c().unwrap();
        let forward = xs.evaluate_forward(f).unwrap().delta_s();
        let backward = xs.reflect().evaluate_forward(f).unwrap().delta_s();
        for i in 0..xs.len() {
            let expected = 0.5 * (forward.get(i) - backward.get(i));
            prop_assert!((dc.get(i) - expected).abs() <= 1e-14 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn classification_ignores_positive_rescaling(xs in any_set(5, 6), t in 1e-3..1e3f64) {
        prop_assert_eq!(xs.scaled(t).unwrap().classify(0.0), xs.classify(0.0));
    }

    #[test]
    fn json_round_trip(xs in any_set(5, 6)) {
        let back = centred_simplex::SampleSet::from_json(&xs.to_json()).unwrap();
        prop_assert_eq!(back, xs);
    }
}
