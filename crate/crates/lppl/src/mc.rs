//! Expanding-window Monte Carlo of the crash-time estimate: many AR(1)
//! replicas of one synthetic truth, each fit at a schedule of window ends,
//! aggregated into per-window mean, spread, bias, and Gaussian confidence
//! windows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitter::{multistart_fit, FitConfig};
use crate::num::Scalar;
use crate::rng::split;
use crate::stats::{mean, normal_quantile, sample_std, skew_and_excess_kurtosis};
use crate::synth::{make_series, SynthSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig<T = f64> {
    pub spec: SynthSpec<T>,
    pub n_samples: usize,
    pub window_ends: Vec<i64>,
    pub fit_config: FitConfig,
    pub confidence_levels: Vec<f64>,
}

impl<T: Scalar> McConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.fit_config.validate()?;
        if self.n_samples < 2 {
            return Err(Error::InvalidConfig(format!(
                "n_samples = {} cannot support ensemble statistics",
                self.n_samples
            )));
        }
        let last_day = self.spec.t0 + self.spec.length as i64 - 1;
        for pair in self.window_ends.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::InvalidConfig(format!(
                    "window ends must increase strictly; saw {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        for &end in &self.window_ends {
            if T::from_i64(end).unwrap() >= self.spec.truth.t_c {
                return Err(Error::InvalidConfig(format!(
                    "window end {end} is not before t_c = {}",
                    self.spec.truth.t_c
                )));
            }
            if end <= self.spec.t0 || end > last_day {
                return Err(Error::InvalidConfig(format!(
                    "window end {end} leaves no data in [{}, {last_day}]",
                    self.spec.t0
                )));
            }
        }
        for &level in &self.confidence_levels {
            if !(level > 0.0 && level < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "confidence level {level} must lie in (0, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// Window ends every `stride` days over the final `horizon` days of a
/// series ending at `t1`; the last end is `t1` itself.
pub fn default_window_ends(t1: i64, horizon: usize, stride: usize) -> Vec<i64> {
    if stride < 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut t = t1 - horizon as i64 + stride as i64;
    while t <= t1 {
        out.push(t);
        t += stride as i64;
    }
    out
}

/// Ensemble statistics of t̂_c at one window end.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McRow<T = f64> {
    pub window_end: i64,
    pub n_used: usize,
    pub n_failed: usize,
    pub mean_tc: T,
    pub std_tc: T,
    /// mean_tc minus the true critical time.
    pub bias: T,
    /// [lo, hi] per confidence level, aligned with the config's levels.
    pub windows: Vec<(T, T)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary<T = f64> {
    pub true_tc: T,
    pub confidence_levels: Vec<f64>,
    pub rows: Vec<McRow<T>>,
}

pub fn run_mc<T: Scalar>(config: &McConfig<T>) -> Result<McSummary<T>> {
    Ok(run_mc_with_estimates(config)?.0)
}

/// As `run_mc`, also returning the raw per-(sample, window) estimates,
/// `None` where the fit failed or did not converge. Sample `s` draws its
/// noise from seed stream `s`; the fit at (s, w) reseeds its multistart
/// from (s, w), so the grid is a pure function of the config.
pub fn run_mc_with_estimates<T: Scalar>(
    config: &McConfig<T>,
) -> Result<(McSummary<T>, Vec<Vec<Option<T>>>)> {
    config.validate()?;
    let estimates: Vec<Vec<Option<T>>> = (0..config.n_samples)
        .into_par_iter()
        .map(|s| {
            let mut spec = config.spec;
            spec.noise.seed = split(config.spec.noise.seed, s as u64);
            let series = make_series(&spec).expect("spec was validated");
            let sample_fit_seed = split(config.fit_config.seed, s as u64);
            config
                .window_ends
                .iter()
                .enumerate()
                .map(|(w, &end)| {
                    let window = series.truncated(end).ok()?;
                    let mut fit_config = config.fit_config.clone();
                    fit_config.seed = split(sample_fit_seed, w as u64);
                    let fit = multistart_fit(&window, &fit_config).ok()?;
                    fit.converged.then_some(fit.params.t_c)
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(config.window_ends.len());
    for (w, &end) in config.window_ends.iter().enumerate() {
        let used: Vec<T> = estimates.iter().filter_map(|row| row[w]).collect();
        let n_used = used.len();
        let n_failed = config.n_samples - n_used;
        if n_used == 0 {
            return Err(Error::SummaryEmpty { window_end: end });
        }
        let mean_tc = mean(&used);
        let std_tc = if n_used >= 2 { sample_std(&used) } else { T::zero() };
        let windows = config
            .confidence_levels
            .iter()
            .map(|&level| confidence_window(mean_tc, std_tc, level))
            .collect();
        rows.push(McRow {
            window_end: end,
            n_used,
            n_failed,
            mean_tc,
            std_tc,
            bias: mean_tc - config.spec.truth.t_c,
            windows,
        });
    }
    let summary = McSummary {
        true_tc: config.spec.truth.t_c,
        confidence_levels: config.confidence_levels.clone(),
        rows,
    };
    Ok((summary, estimates))
}

/// [mean - z * std, mean + z * std] with z the standard-normal quantile at
/// (1 + level) / 2. Callers guarantee std >= 0 and 0 < level < 1.
pub fn confidence_window<T: Scalar>(mean: T, std: T, level: f64) -> (T, T) {
    let z = T::from64(normal_quantile((1.0 + level) / 2.0));
    (mean - z * std, mean + z * std)
}

/// Skewness/excess-kurtosis normality screen at five standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianityCheck<T = f64> {
    pub skewness: T,
    pub excess_kurtosis: T,
    pub skewness_se: T,
    pub kurtosis_se: T,
    pub pass: bool,
}

pub fn gaussianity_check<T: Scalar>(samples: &[T]) -> Result<GaussianityCheck<T>> {
    if samples.len() < 20 {
        return Err(Error::TooFewSamples { got: samples.len(), need: 20 });
    }
    let n = samples.len() as f64;
    let (skewness, excess_kurtosis) = skew_and_excess_kurtosis(samples);
    let skewness_se = (6.0 * n * (n - 1.0) / ((n - 2.0) * (n + 1.0) * (n + 3.0))).sqrt();
    let kurtosis_se = 2.0 * skewness_se * ((n * n - 1.0) / ((n - 3.0) * (n + 5.0))).sqrt();
    let pass = skewness.abs().to64() < 5.0 * skewness_se
        && excess_kurtosis.abs().to64() < 5.0 * kurtosis_se;
    Ok(GaussianityCheck {
        skewness,
        excess_kurtosis,
        skewness_se: T::from64(skewness_se),
        kurtosis_se: T::from64(kurtosis_se),
        pass,
    })
}
