//! Synthetic series: an LPPL curve plus AR(1) noise with unit-variance
//! innovations, built from a flat JSON-friendly spec.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{eval_lppl, LpplParams, PriceSeries, Scale};
use crate::num::Scalar;
use crate::rng::CounterRng;

/// Auto-regressive noise: eta(t) = eta(t-1) * (1 - lambda) + eps(t), with
/// eps i.i.d. standard normal. `sigma` scales the noise where it is added
/// to a curve, not inside the recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ar1Config {
    pub lambda: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl Ar1Config {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda = {} must lie in (0, 1]",
                self.lambda
            )));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::InvalidConfig(format!("sigma = {} must be >= 0", self.sigma)));
        }
        Ok(())
    }
}

/// Everything needed to generate one synthetic series. Serializes flat:
/// A, B, C, t_c, alpha, omega, phi, lambda, sigma, seed, length, t0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec<T = f64> {
    #[serde(flatten)]
    pub truth: LpplParams<T>,
    #[serde(flatten)]
    pub noise: Ar1Config,
    pub length: usize,
    pub t0: i64,
}

impl<T: Scalar> SynthSpec<T> {
    /// The 1987-calibrated reference configuration: a curve of index-like
    /// magnitude over 834 days against lambda = 0.06, sigma = 25 noise. The
    /// truth values are a documented default, not an estimate. A stands far
    /// enough above the rally's depth that prices stay strictly positive
    /// and the log-price series is itself close to the same functional form
    /// (so fits behave on either scale), and phi places the final
    /// oscillation peak essentially at t_c, so every window keeps the
    /// accelerating rally that identifies the crash day.
    pub fn reference_1987(seed: u64) -> Self {
        Self {
            truth: LpplParams {
                a: T::from64(20_000.0),
                b: T::from64(-358.0),
                c: T::from64(0.065),
                t_c: T::from64(834.0),
                alpha: T::from64(0.38),
                omega: T::from64(7.4),
                phi: T::from64(0.05),
            },
            noise: Ar1Config { lambda: 0.06, sigma: 25.0, seed },
            length: 834,
            t0: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if self.length < 2 {
            return Err(Error::InvalidConfig(format!(
                "length = {} leaves nothing to fit",
                self.length
            )));
        }
        let t0 = T::from_i64(self.t0).unwrap();
        if !(self.truth.t_c > t0) {
            return Err(Error::InvalidConfig(format!(
                "t_c = {} does not lie beyond t0 = {}",
                self.truth.t_c, self.t0
            )));
        }
        Ok(())
    }
}

/// The noise path eta(1..=length) from a cold start eta(0) = 0. The
/// burn-in bias of the cold start decays as (1 - lambda)^t; consumers that
/// need stationarity discard an initial stretch.
pub fn ar1_generate<T: Scalar>(config: &Ar1Config, length: usize) -> Result<Vec<T>> {
    config.validate()?;
    if length < 1 {
        return Err(Error::InvalidConfig("length must be at least 1".into()));
    }
    let keep = T::from64(1.0 - config.lambda);
    let mut rng = CounterRng::stream(config.seed, 0);
    let mut eta = T::zero();
    let mut out = Vec::with_capacity(length);
    for _ in 0..length {
        eta = eta * keep + T::from64(rng.standard_normal());
        out.push(eta);
    }
    Ok(out)
}

/// values[i] = f(t0 + i) + sigma * eta(i + 1), on the raw price scale.
pub fn make_series<T: Scalar>(spec: &SynthSpec<T>) -> Result<PriceSeries<T>> {
    spec.validate()?;
    let last = T::from_i64(spec.t0 + spec.length as i64 - 1).unwrap();
    if last >= spec.truth.t_c {
        return Err(Error::Domain { t: last.to64(), t_c: spec.truth.t_c.to64() });
    }
    let eta = ar1_generate::<T>(&spec.noise, spec.length)?;
    let sigma = T::from64(spec.noise.sigma);
    let values: Vec<T> = (0..spec.length)
        .map(|i| {
            let t = T::from_i64(spec.t0 + i as i64).unwrap();
            eval_lppl(&spec.truth, t).map(|f| f + sigma * eta[i])
        })
        .collect::<Result<_>>()?;
    PriceSeries::new(spec.t0, values, Scale::Raw)
}
