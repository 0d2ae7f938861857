mod common;

use centred_simplex::bounds::{
    gcscg_chain_bound, gcscg_rule_bound, gcsg_bound, ComparisonSpace, ComponentLipschitz,
    LipschitzData, RuleBoundInput,
};
use centred_simplex::calculus::{
    gcscg_chain, gcscg_exp, gcscg_log, gcscg_power, gcscg_product, gcscg_quotient, ChainContext,
};
use centred_simplex::oracle::{lookup, lookup_vector};
use centred_simplex::simplexgrad::gcsg;
use centred_simplex::{SampleSet, Vector};
use common::*;
use nalgebra::DVector;
use proptest::collection::vec;
use proptest::prelude::*;

const NONQUADRATIC: [&str; 5] = ["sin3", "exp2", "cubic2", "rosenbrock2", "quartic1d"];

/// `set` moved to `center + shift/2` and scaled to radius `delta`.
fn place(set: &SampleSet, center: &Vector, shift: &[f64], delta: f64) -> SampleSet {
    let x0: Vec<f64> = center.iter().zip(shift).map(|(c, s)| c + 0.5 * s).collect();
    set.recentered(Vector::from_vec(x0).unwrap())
        .unwrap()
        .scaled(delta / set.radius())
        .unwrap()
}

/// Error against the target named by `space`.
fn error_in(space: ComparisonSpace, xs: &SampleSet, est: &Vector, truth: &Vector) -> f64 {
    let target = match space {
        ComparisonSpace::FullSpace => vec_na(truth),
        ComparisonSpace::SubspaceU => {
            oracle_projector(&to_na(&xs.direction_matrix())) * vec_na(truth)
        }
    };
    (vec_na(est) - target).norm()
}

fn log_delta() -> impl Strategy<Value = f64> {
    (-3.0..-1.0f64).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gcsg_error_is_below_bound(
        (name, set, shift) in (0..NONQUADRATIC.len()).prop_flat_map(|i| {
            let n = lookup(NONQUADRATIC[i]).unwrap().dim();
            (Just(NONQUADRATIC[i]), full_rank_set_in(n, 5), vec(-1.0..1.0f64, n))
        }),
        delta in log_delta(),
    ) {
        let f = lookup(name).unwrap();
        let xs = place(&set, f.default_point(), &shift, delta);
        let l = f.hessian_lipschitz(xs.x0(), xs.radius()).unwrap();
        let report = gcsg_bound(&xs, &LipschitzData::new(l).unwrap()).unwrap();
        let est = gcsg(&xs, &xs.evaluate(f.evaluator()).unwrap()).unwrap().value;
        let err = error_in(report.comparison_space, &xs, &est, &f.gradient(xs.x0()));
        prop_assert!(err <= report.bound.unwrap(), "{name}: error {err:e} > bound {:e}", report.bound.unwrap());
    }

    #[test]
    fn rule_errors_are_below_bounds(
        (set, shift) in (full_rank_set_in(2, 4), vec(-1.0..1.0f64, 2)),
        delta in log_delta(),
        k in -2.5..3.5f64,
        a in 1.5..3.0f64,
    ) {
        let (f, g) = (lookup("cubic2").unwrap(), lookup("exp2").unwrap());
        let xs = place(&set, g.default_point(), &shift, delta);
        let x0 = xs.x0();
        let (r, space_of) = (xs.radius(), |b: &centred_simplex::bounds::BoundReport| b.comparison_space);
        let (l_f, l_g) = (f.hessian_lipschitz(x0, r).unwrap(), g.hessian_lipschitz(x0, r).unwrap());
        let (tf, tg) = (xs.evaluate(f.evaluator()).unwrap(), xs.evaluate(g.evaluator()).unwrap());
        let (f0, g0) = (tf.f_x0(), tg.f_x0());
        let (df, dg) = (f.gradient(x0), g.gradient(x0));

        let cases = [
            (
                RuleBoundInput::Product { l_f, l_g, f0, g0 },
                gcscg_product(&xs, &tf, &tg).unwrap().value,
                &dg.scale(f0) + &df.scale(g0),
            ),
            (
                RuleBoundInput::Power { l: l_g, f0: g0, k },
                gcscg_power(&xs, &tg, k).unwrap().value,
                dg.scale(k * g0.powf(k - 1.0)),
            ),
            (
                RuleBoundInput::Quotient { l_f, l_g, f0, g0 },
                gcscg_quotient(&xs, &tf, &tg).unwrap().value,
                (&df.scale(g0) - &dg.scale(f0)).scale(1.0 / (g0 * g0)),
            ),
            (
                RuleBoundInput::Exp { l: l_g, f0: g0, a },
                gcscg_exp(&xs, &tg, a).unwrap().value,
                dg.scale(a.powf(g0) * a.ln()),
            ),
            (
                RuleBoundInput::Log { l: l_g, f0: g0, a },
                gcscg_log(&xs, &tg, a).unwrap().value,
                dg.scale(1.0 / (g0 * a.ln())),
            ),
        ];
        for (input, est, truth) in &cases {
            let report = gcscg_rule_bound(&xs, input).unwrap();
            let err = error_in(space_of(&report), &xs, est, truth);
            prop_assert!(err <= report.bound.unwrap(), "{input:?}: error {err:e} > bound {:?}", report.bound);
        }
    }

    #[test]
    fn chain_error_is_below_bound(
        (set, shift) in (full_rank_set_in(2, 4), vec(-1.0..1.0f64, 2)),
        delta in log_delta(),
    ) {
        let (f, g) = (lookup("sin3").unwrap(), lookup_vector("mixmap").unwrap());
        let xs = place(&set, g.components()[0].default_point(), &shift, delta);
        let ctx = ChainContext::evaluate(&xs, |y| g.eval(y), f.evaluator());
        prop_assume!(ctx.is_ok());
        let ctx = ctx.unwrap();
        prop_assume!(ctx.image_set().is_ok());
        let (x0, r) = (xs.x0(), xs.radius());
        let gx0 = g.eval(x0);
        let l_star = g.lipschitz_star(x0, r);
        let comps = g
            .components()
            .iter()
            .map(|c| ComponentLipschitz { lipschitz: l_star, hessian_lipschitz: c.hessian_lipschitz(x0, r).unwrap() })
            .collect();
        let lip = LipschitzData::new(f.hessian_lipschitz(&gx0, ctx.image_radius()).unwrap())
            .unwrap()
            .with_components(comps)
            .unwrap();
        let report = gcscg_chain_bound(&ctx, &lip, f.gradient(&gx0).norm());
        prop_assume!(report.is_ok());
        let report = report.unwrap();
        prop_assert_eq!(report.applicable, ctx.image_set().unwrap().classify(0.0).is_full_row_rank());
        prop_assume!(report.applicable);
        let est = gcscg_chain(&ctx).unwrap().value;
        let truth = g.jacobian(x0).transpose().mul_vec(&f.gradient(&gx0)).unwrap();
        let err = error_in(report.comparison_space, &xs, &est, &truth);
        prop_assert!(err <= report.bound.unwrap(), "error {err:e} > bound {:?}", report.bound);
    }

    #[test]
    fn bound_scales_with_delta_squared(xs in full_rank_set(4, 6), t in 0.01..=1.0f64, l in 0.1..10.0f64) {
        let lip = LipschitzData::new(l).unwrap();
        let b = gcsg_bound(&xs, &lip).unwrap().bound.unwrap();
        let bt = gcsg_bound(&xs.scaled(t).unwrap(), &lip).unwrap().bound.unwrap();
        prop_assert!((bt - t * t * b).abs() <= 1e-12 * t * t * b);
        let input = RuleBoundInput::Product { l_f: l, l_g: 2.0 * l, f0: 1.5, g0: -0.5 };
        let b = gcscg_rule_bound(&xs, &input).unwrap().bound.unwrap();
        let bt = gcscg_rule_bound(&xs.scaled(t).unwrap(), &input).unwrap().bound.unwrap();
        prop_assert!((bt - t * t * b).abs() <= 1e-12 * t * t * b);
    }

    #[test]
    fn zero_bound_means_exact(xs in full_rank_set_in(3, 5), q in quadratic(3, -1.0..1.0)) {
        let report = gcsg_bound(&xs, &LipschitzData::new(0.0).unwrap()).unwrap();
        prop_assert_eq!(report.bound, Some(0.0));
        let est = gcsg(&xs, &xs.evaluate(|y| q.eval(y)).unwrap()).unwrap().value;
        let truth = q.gradient(xs.x0());
        let target: DVector<f64> = match report.comparison_space {
            ComparisonSpace::FullSpace => vec_na(&truth),
            ComparisonSpace::SubspaceU => oracle_projector(&to_na(&xs.direction_matrix())) * vec_na(&truth),
        };
        prop_assert!((vec_na(&est) - &target).norm() <= 1e-9 * (1.0 + target.norm()));
    }
}
