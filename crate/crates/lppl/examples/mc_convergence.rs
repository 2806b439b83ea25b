//! Small Monte Carlo pilot: prints the per-window bias and dispersion of
//! the crash-time estimate on the 1987-reference synthetic ensemble.
//!
//! Arguments, all positional and optional:
//!   [n_samples] [n_starts] [max_iters] [A] [B] [alpha] [C] [omega] [phi] [t_c] [horizon]
//! defaulting to 20 / 50 / 500 / the reference truth / 150.

use std::time::Instant;

use lppl::fitter::FitConfig;
use lppl::mc::{default_window_ends, run_mc_with_estimates, McConfig};
use lppl::synth::SynthSpec;

fn main() {
    let mut args = std::env::args().skip(1);
    let n_samples: usize = args.next().map(|a| a.parse().unwrap()).unwrap_or(20);
    let n_starts: usize = args.next().map(|a| a.parse().unwrap()).unwrap_or(50);
    let max_iters: usize = args.next().map(|a| a.parse().unwrap()).unwrap_or(500);

    let mut spec: SynthSpec = SynthSpec::reference_1987(1987);
    if let Some(a) = args.next() {
        spec.truth.a = a.parse().unwrap();
    }
    if let Some(b) = args.next() {
        spec.truth.b = b.parse().unwrap();
    }
    if let Some(alpha) = args.next() {
        spec.truth.alpha = alpha.parse().unwrap();
    }
    if let Some(c) = args.next() {
        spec.truth.c = c.parse().unwrap();
    }
    if let Some(omega) = args.next() {
        spec.truth.omega = omega.parse().unwrap();
    }
    if let Some(phi) = args.next() {
        spec.truth.phi = phi.parse().unwrap();
    }
    if let Some(t_c) = args.next() {
        spec.truth.t_c = t_c.parse().unwrap();
    }
    let horizon: usize = args.next().map(|a| a.parse().unwrap()).unwrap_or(150);
    let t1 = spec.t0 + spec.length as i64 - 1;
    let config = McConfig {
        spec,
        n_samples,
        window_ends: default_window_ends(t1, horizon, 10),
        fit_config: FitConfig { n_starts, max_iters, seed: 7, ..FitConfig::default() },
        confidence_levels: vec![0.8, 0.95],
    };

    let start = Instant::now();
    let (summary, estimates) = run_mc_with_estimates(&config).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    println!("samples {n_samples}, starts {n_starts}, max_iters {max_iters}");
    println!("truth {:?}", config.spec.truth);
    println!("end  used fail   mean_tc   bias     std  std/gap | runaway core_std core/gap");
    for (w, row) in summary.rows.iter().enumerate() {
        let gap = summary.true_tc - row.window_end as f64;
        // Core = estimates within 200 days of the truth; the rest are
        // far-basin winners ("runaways").
        let core: Vec<f64> = estimates
            .iter()
            .filter_map(|sample| sample[w])
            .filter(|t| (t - summary.true_tc).abs() <= 200.0)
            .collect();
        let n_run = row.n_used - core.len();
        let outliers: Vec<f64> = estimates
            .iter()
            .filter_map(|sample| sample[w])
            .filter(|t| (t - summary.true_tc).abs() > 200.0)
            .collect();
        let core_std = if core.len() > 1 {
            let m = core.iter().sum::<f64>() / core.len() as f64;
            (core.iter().map(|t| (t - m) * (t - m)).sum::<f64>() / (core.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        println!(
            "{:4} {:4} {:4}  {:8.2} {:7.2} {:7.1}  {:7.3} | {:3}/{:<3} {:8.2} {:.3}",
            row.window_end,
            row.n_used,
            row.n_failed,
            row.mean_tc,
            row.bias,
            row.std_tc,
            row.std_tc / gap,
            n_run,
            row.n_used,
            core_std,
            core_std / gap
        );
        if !outliers.is_empty() {
            println!("      far: {outliers:.1?}");
        }
    }
    println!("elapsed {elapsed:.1} s ({:.2} s per sample)", elapsed / n_samples as f64);
}
