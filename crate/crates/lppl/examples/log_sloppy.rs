//! Diagnostic harness: eigen-structure of the reference series fit on the
//! log scale, under adjustable stopping tolerances and window holdback.
//!
//!     cargo run -p lppl --example log_sloppy -- [max_iters] [grad_tol] [step_tol] [n_starts] [holdback]

use lppl::{
    make_series, multistart_fit, sloppiness_report, FitConfig, ModelKind, Objective, PriceSeries,
    Scale, SynthSpec,
};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let max_iters = args.first().map_or(500, |s| s.parse().unwrap());
    let grad_tol = args.get(1).map_or(1e-8, |s| s.parse().unwrap());
    let step_tol = args.get(2).map_or(1e-10, |s| s.parse().unwrap());
    let n_starts = args.get(3).map_or(500, |s| s.parse().unwrap());
    let holdback: i64 = args.get(4).map_or(0, |s| s.parse().unwrap());

    let spec: SynthSpec = SynthSpec::reference_1987(1987);
    let raw = make_series(&spec).unwrap();
    let raw = raw.truncated(raw.t1() - holdback).unwrap();
    let logged: Vec<f64> = raw.values().iter().map(|v| v.ln()).collect();
    let series = PriceSeries::new(raw.t0(), logged, Scale::Log).unwrap();

    let config = FitConfig {
        n_starts,
        seed: 5,
        max_iters,
        grad_tol,
        step_tol,
        ..FitConfig::default()
    };
    let start = std::time::Instant::now();
    let fit = multistart_fit(&series, &config).unwrap();
    let objective = Objective::new(series, ModelKind::Lppl).unwrap();
    let hessian = objective.hessian_of_s(&fit.params).unwrap();
    let report = sloppiness_report(&hessian).unwrap();

    println!("fit: converged {} iters {} s {:.6e}", fit.converged, fit.iterations, fit.s);
    println!("params: {:?}", fit.params);
    let spectrum: Vec<String> = report.eigenvalues.iter().map(|e| format!("{e:.4e}")).collect();
    println!("eigenvalues: {spectrum:?}");
    println!("orders_of_separation: {:?}", report.orders_of_separation);
    for v in &report.eigenvectors[5..7] {
        println!("vector: {:.4?}", v);
    }
    println!("elapsed {:.1} s", start.elapsed().as_secs_f64());
}
