//! The log-periodic power law and its ingredients.
//!
//! Model value at day t, for t strictly before the critical time t_c:
//!
//! ```text
//! f(t) = A + B * (t_c - t)^alpha * [1 + C * cos(omega * ln(t_c - t) + phi)]
//! ```
//!
//! The pure power law is the C = 0 special case. Parameter order everywhere
//! in this crate (gradients, Hessians, eigenvectors) is
//! (A, B, C, t_c, alpha, omega, phi).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Parameter names in canonical component order.
pub const PARAM_NAMES: [&str; 7] = ["A", "B", "C", "t_c", "alpha", "omega", "phi"];

/// Indices of the nonlinear parameters (t_c, alpha, omega, phi) within the
/// canonical order.
pub const NONLINEAR_IDX: [usize; 4] = [3, 4, 5, 6];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpplParams<T = f64> {
    #[serde(rename = "A")]
    pub a: T,
    #[serde(rename = "B")]
    pub b: T,
    #[serde(rename = "C")]
    pub c: T,
    pub t_c: T,
    pub alpha: T,
    pub omega: T,
    pub phi: T,
}

impl<T: Scalar> LpplParams<T> {
    pub fn to_array(&self) -> [T; 7] {
        [self.a, self.b, self.c, self.t_c, self.alpha, self.omega, self.phi]
    }

    pub fn from_array(x: [T; 7]) -> Self {
        Self { a: x[0], b: x[1], c: x[2], t_c: x[3], alpha: x[4], omega: x[5], phi: x[6] }
    }
}

/// Which functional form is being fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Lppl,
    PowerLaw,
}

impl ModelKind {
    /// Free-parameter count used in the degrees-of-freedom normalization.
    pub fn n_params(self) -> usize {
        match self {
            ModelKind::Lppl => 7,
            ModelKind::PowerLaw => 5,
        }
    }
}

/// The four parameters the optimizer moves directly; (A, B, C) are implied
/// by them through the linear subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nonlinear<T = f64> {
    pub t_c: T,
    pub alpha: T,
    pub omega: T,
    pub phi: T,
}

impl<T: Scalar> Nonlinear<T> {
    pub fn of(params: &LpplParams<T>) -> Self {
        Self { t_c: params.t_c, alpha: params.alpha, omega: params.omega, phi: params.phi }
    }

    pub fn with_linear(&self, a: T, b: T, c: T) -> LpplParams<T> {
        LpplParams { a, b, c, t_c: self.t_c, alpha: self.alpha, omega: self.omega, phi: self.phi }
    }
}

/// Whether stored values are raw prices or their natural logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scale {
    Raw,
    Log,
}

/// A price observation per consecutive integer day.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries<T = f64> {
    t0: i64,
    values: Vec<T>,
    scale: Scale,
}

impl<T: Scalar> PriceSeries<T> {
    /// At least two finite observations; one value per day from `t0` on.
    pub fn new(t0: i64, values: Vec<T>, scale: Scale) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "a series needs at least 2 observations, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("non-finite value at day {}", t0 + i as i64)));
        }
        Ok(Self { t0, values, scale })
    }

    pub fn t0(&self) -> i64 {
        self.t0
    }

    /// Last observed day.
    pub fn t1(&self) -> i64 {
        self.t0 + self.values.len() as i64 - 1
    }

    /// Number of observations; the constructor guarantees at least 2.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    /// The prefix of the series ending at `end_day` inclusive.
    pub fn truncated(&self, end_day: i64) -> Result<Self> {
        if end_day <= self.t0 || end_day > self.t1() {
            return Err(Error::InvalidConfig(format!(
                "cannot truncate [{}, {}] at {end_day}",
                self.t0,
                self.t1()
            )));
        }
        let keep = (end_day - self.t0 + 1) as usize;
        Ok(Self { t0: self.t0, values: self.values[..keep].to_vec(), scale: self.scale })
    }
}

/// t_c - t, guarded so the singularity is never crossed.
pub fn distance_to_critical<T: Scalar>(params: &LpplParams<T>, t: T) -> Result<T> {
    let d = params.t_c - t;
    if d <= T::zero() {
        return Err(Error::Domain { t: t.to64(), t_c: params.t_c.to64() });
    }
    Ok(d)
}

/// Model value at day `t`.
pub fn eval_lppl<T: Scalar>(params: &LpplParams<T>, t: T) -> Result<T> {
    let d = distance_to_critical(params, t)?;
    let tau = d.ln();
    let u = (params.alpha * tau).exp();
    let osc = T::one() + params.c * (params.omega * tau + params.phi).cos();
    Ok(params.a + params.b * u * osc)
}

/// The C = 0 variant: A + B * (t_c - t)^alpha. The oscillation parameters
/// of `params` are ignored.
pub fn eval_power_law<T: Scalar>(params: &LpplParams<T>, t: T) -> Result<T> {
    let d = distance_to_critical(params, t)?;
    Ok(params.a + params.b * (params.alpha * d.ln()).exp())
}

/// Partial derivatives of the model value with respect to all seven
/// parameters, in canonical order.
pub fn grad_lppl<T: Scalar>(params: &LpplParams<T>, t: T) -> Result<[T; 7]> {
    let d = distance_to_critical(params, t)?;
    let tau = d.ln();
    let u = (params.alpha * tau).exp();
    let (sin, cos) = (params.omega * tau + params.phi).sin_cos();
    let osc = T::one() + params.c * cos;
    let b = params.b;
    let c = params.c;
    Ok([
        T::one(),
        u * osc,
        b * u * cos,
        b * u / d * (params.alpha * osc - c * sin * params.omega),
        b * u * tau * osc,
        -b * u * c * sin * tau,
        -b * u * c * sin,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> LpplParams {
        LpplParams { a: 6000.0, b: -1200.0, c: 0.08, t_c: 834.0, alpha: 0.5, omega: 7.4, phi: 2.0 }
    }

    #[test]
    fn zero_b_leaves_only_the_level() {
        let p = LpplParams { a: 5.0, b: 0.0, c: 0.3, t_c: 100.0, alpha: 0.5, omega: 7.0, phi: 0.0 };
        assert_eq!(eval_lppl(&p, 50.0).unwrap(), 5.0);
    }

    #[test]
    fn zero_c_reduces_to_a_plain_power_law() {
        let p: LpplParams =
            LpplParams { a: 0.0, b: 2.0, c: 0.0, t_c: 10.0, alpha: 1.0, omega: 7.0, phi: 1.0 };
        let v = eval_lppl(&p, 7.0).unwrap();
        assert!((v - 6.0).abs() < 1e-12);
        assert_eq!(v, eval_power_law(&p, 7.0).unwrap());
    }

    #[test]
    fn power_law_hand_values() {
        let p: LpplParams =
            LpplParams { a: 1.0, b: 1.0, c: 0.0, t_c: 2.0, alpha: 1.0, omega: 0.0, phi: 0.0 };
        assert!((eval_power_law(&p, 1.0).unwrap() - 2.0).abs() < 1e-15);
        let p: LpplParams =
            LpplParams { a: 0.0, b: 4.0, c: 0.0, t_c: 10.0, alpha: 0.5, omega: 0.0, phi: 0.0 };
        assert!((eval_power_law(&p, 6.0).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn at_or_past_the_critical_time_is_an_error() {
        let p = reference();
        assert!(matches!(eval_lppl(&p, 834.0), Err(Error::Domain { .. })));
        assert!(matches!(eval_lppl(&p, 900.0), Err(Error::Domain { .. })));
        assert!(matches!(eval_power_law(&p, 834.0), Err(Error::Domain { .. })));
        assert!(matches!(grad_lppl(&p, 834.5), Err(Error::Domain { .. })));
        assert!(eval_lppl(&p, 833.0).is_ok());
    }

    // Reference values computed with 50-digit arithmetic.
    #[test]
    fn matches_high_precision_evaluation() {
        let v = eval_lppl(&reference(), 700.0).unwrap();
        let want = -8841.346496367515773211952;
        assert!(((v - want) / want).abs() < 1e-10, "{v}");
    }

    #[test]
    fn gradient_matches_high_precision_partials() {
        let g = grad_lppl(&reference(), 700.0).unwrap();
        let want = [
            1.0,
            12.36778874697292981101,
            -11879.27766274056506181,
            -23.5683559112833989491,
            -72690.53755477083280076,
            2821.23088415657657774,
            576.015345415105733436,
        ];
        for i in 0..7 {
            let rel = ((g[i] - want[i]) / want[i]).abs();
            assert!(rel < 1e-12, "component {i}: {} vs {}", g[i], want[i]);
        }
    }

    #[test]
    fn translation_by_whole_days_is_exact() {
        let p = reference();
        let v0 = eval_lppl(&p, 700.0).unwrap();
        for k in [-3000_i64, -1, 1, 365, 100_000] {
            let shifted = LpplParams { t_c: p.t_c + k as f64, ..p };
            assert_eq!(eval_lppl(&shifted, 700.0 + k as f64).unwrap(), v0);
        }
    }

    #[test]
    fn series_validation() {
        assert!(PriceSeries::new(0, vec![1.0], Scale::Raw).is_err());
        assert!(PriceSeries::new(0, vec![1.0, f64::NAN], Scale::Raw).is_err());
        let s = PriceSeries::new(10, vec![1.0, 2.0, 3.0], Scale::Raw).unwrap();
        assert_eq!(s.t1(), 12);
        let cut = s.truncated(11).unwrap();
        assert_eq!(cut.values(), &[1.0, 2.0]);
        assert!(s.truncated(10).is_err());
        assert!(s.truncated(13).is_err());
    }
}
