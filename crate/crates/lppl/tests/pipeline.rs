//! End-to-end runs over the full stack — synthesis, multistart fitting,
//! Hessian eigen-analysis, Monte Carlo — plus the guarantee that none of it
//! depends on how many worker threads rayon happens to use.

use lppl::fitter::{multistart_fit, FitConfig};
use lppl::mc::{run_mc, McConfig};
use lppl::model::ModelKind;
use lppl::objective::Objective;
use lppl::sloppy::sloppiness_report;
use lppl::synth::{make_series, SynthSpec};

fn reference_fit_config() -> FitConfig {
    FitConfig { n_starts: 64, seed: 5, ..FitConfig::default() }
}

#[test]
fn noisy_reference_series_shows_a_wide_sloppy_spectrum() {
    let spec: SynthSpec = SynthSpec::reference_1987(1987);
    let series = make_series(&spec).unwrap();
    let fit = multistart_fit(&series, &reference_fit_config()).unwrap();
    assert!(fit.converged, "best of 64 starts did not converge");
    // The fitted singularity should land in the right region even under
    // sigma = 25 noise; a loose sanity band, not a statistical claim.
    assert!(
        (fit.params.t_c - spec.truth.t_c).abs() < 80.0,
        "t_c = {}",
        fit.params.t_c
    );

    let obj = Objective::new(series, ModelKind::Lppl).unwrap();
    let h = obj.hessian_of_s(&fit.params).unwrap();
    let report = sloppiness_report(&h).unwrap();
    for pair in report.eigenvalues.windows(2) {
        assert!(pair[0] >= pair[1], "spectrum not sorted: {:?}", report.eigenvalues);
    }
    let orders = report.orders_of_separation.expect("non-positive eigenvalue at a minimum");
    assert!(orders >= 4, "eigenvalue spread only {orders} orders");
}

#[test]
fn results_are_identical_across_thread_pool_sizes() {
    let spec: SynthSpec = SynthSpec::reference_1987(7);
    let series = make_series(&spec).unwrap();
    let fit_config = reference_fit_config();
    let mc_config = McConfig {
        spec,
        n_samples: 4,
        window_ends: vec![700, 760],
        fit_config: FitConfig { n_starts: 24, seed: 9, ..FitConfig::default() },
        confidence_levels: vec![0.8, 0.95],
    };

    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            (multistart_fit(&series, &fit_config).unwrap(), run_mc(&mc_config).unwrap())
        })
    };
    let (fit_1, mc_1) = run(1);
    let (fit_4, mc_4) = run(4);
    let (fit_3, mc_3) = run(3);
    assert_eq!(fit_1, fit_4);
    assert_eq!(fit_1, fit_3);
    assert_eq!(mc_1, mc_4);
    assert_eq!(mc_1, mc_3);
}
