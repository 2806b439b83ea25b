//! Structural invariants of the model and the confidence machinery,
//! exercised over randomized inputs.

use proptest::prelude::*;

use lppl::mc::confidence_window;
use lppl::model::{eval_lppl, eval_power_law, LpplParams, ModelKind, PriceSeries, Scale};
use lppl::objective::Objective;
use lppl::rng::CounterRng;

fn params_strategy() -> impl Strategy<Value = LpplParams> {
    (
        100.0..10_000.0_f64,
        prop_oneof![-2_000.0..-10.0_f64, 10.0..2_000.0_f64],
        -0.9..0.9_f64,
        10.0..1_000.0_f64, // distance from the evaluation day to t_c
        0.1..0.9_f64,
        2.0..20.0_f64,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(a, b, c, gap, alpha, omega, phi)| LpplParams {
            a,
            b,
            c,
            t_c: 500.0 + gap,
            alpha,
            omega,
            phi,
        })
}

proptest! {
    /// Shifting the day axis and t_c together leaves the model curve (and
    /// hence the fit objective) unchanged up to roundoff.
    #[test]
    fn time_translation_leaves_the_objective_invariant(
        params in params_strategy(),
        shift in -300i64..1_000,
    ) {
        let values: Vec<f64> = (0..200)
            .map(|t| eval_lppl(&params, t as f64).unwrap())
            .collect();
        let s0 = Objective::new(
            PriceSeries::new(0, values.clone(), Scale::Raw).unwrap(),
            ModelKind::Lppl,
        )
        .unwrap()
        .normalized_sse(&LpplParams { a: params.a * 1.01, ..params })
        .unwrap();
        let shifted = LpplParams { t_c: params.t_c + shift as f64, ..params };
        let s1 = Objective::new(
            PriceSeries::new(shift, values, Scale::Raw).unwrap(),
            ModelKind::Lppl,
        )
        .unwrap()
        .normalized_sse(&LpplParams { a: shifted.a * 1.01, ..shifted })
        .unwrap();
        prop_assert!((s0 - s1).abs() <= 1e-10 * s0.abs().max(1e-300));
    }

    /// With C = 0 the full model and the pure power law are the same
    /// arithmetic, bit for bit.
    #[test]
    fn zero_oscillation_is_exactly_the_power_law(
        params in params_strategy(),
        t in 0.0..500.0_f64,
    ) {
        let p = LpplParams { c: 0.0, ..params };
        prop_assert_eq!(eval_lppl(&p, t).unwrap(), eval_power_law(&p, t).unwrap());
    }

    /// (C, phi) and (-C, phi + pi) parameterize the same curve.
    #[test]
    fn oscillation_sign_flip_is_a_reparameterization(
        params in params_strategy(),
        t in 0.0..500.0_f64,
    ) {
        let twin = LpplParams {
            c: -params.c,
            phi: params.phi + std::f64::consts::PI,
            ..params
        };
        let f = eval_lppl(&params, t).unwrap();
        let g = eval_lppl(&twin, t).unwrap();
        prop_assert!((f - g).abs() <= 1e-9 * f.abs().max(1.0), "{f} vs {g}");
    }

    /// Wider confidence levels strictly contain narrower ones.
    #[test]
    fn confidence_windows_nest_by_level(
        mean in -1_000.0..1_000.0_f64,
        std in 1e-6..100.0_f64,
        lo_level in 0.05..0.90_f64,
        widen in 0.01..0.09_f64,
    ) {
        let hi_level = lo_level + widen;
        let (inner_lo, inner_hi) = confidence_window(mean, std, lo_level);
        let (outer_lo, outer_hi) = confidence_window(mean, std, hi_level);
        prop_assert!(outer_lo < inner_lo);
        prop_assert!(inner_lo < inner_hi);
        prop_assert!(inner_hi < outer_hi);
    }
}

/// The 80% window built from a sample's own mean and std should cover about
/// 80% of that sample when the draws really are Gaussian.
#[test]
fn empirical_coverage_of_the_80_percent_window() {
    let mut rng = CounterRng::stream(314, 0);
    let draws: Vec<f64> = (0..10_000).map(|_| 3.0 + 2.5 * rng.standard_normal()).collect();
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let (lo, hi) = confidence_window(mean, var.sqrt(), 0.80);
    let inside = draws.iter().filter(|&&x| lo <= x && x <= hi).count() as f64 / n;
    assert!((inside - 0.80).abs() < 0.03, "coverage {inside}");
}
