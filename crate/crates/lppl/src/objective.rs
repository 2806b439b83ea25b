//! The normalized least-squares objective and its derivatives.
//!
//! For a window t0..=t1 with n free parameters,
//!
//! ```text
//! S(params) = sum_t [f(t) - p(t)]^2 / (t1 - t0 - n)
//! ```
//!
//! Minimizing S over (A, B, C) at fixed nonlinear parameters is a linear
//! problem; `linear_subfit` solves it through the normal equations in the
//! substituted variable C2 = B * C. The Hessian of S is assembled by central
//! finite differences of the analytic gradient.

use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, condition_number};
use crate::model::{
    eval_lppl, eval_power_law, grad_lppl, LpplParams, ModelKind, Nonlinear, PriceSeries,
};
use crate::num::Scalar;
use crate::stats::pairwise_sum;

/// Condition limit on the normal equations beyond which the design is
/// treated as degenerate rather than silently regularized.
pub const DESIGN_CONDITION_LIMIT: f64 = 1e12;

/// |B| below this multiple of the data scale makes C = C2/B unreportable.
pub const B_ZERO_RELATIVE: f64 = 1e-12;

/// The objective for one series and one functional form.
#[derive(Debug, Clone)]
pub struct Objective<T = f64> {
    series: PriceSeries<T>,
    model: ModelKind,
}

/// Solution of the linear subproblem, with C already recovered from C2.
#[derive(Debug, Clone, Copy)]
pub struct LinearFit<T = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub s: T,
}

/// Raw linear solution in the (A, B, C2) variables, kept separate so the
/// optimizer never divides by a transient small B.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LinearSolution<T> {
    pub a: T,
    pub b: T,
    pub c2: T,
}

/// Per-day quantities shared by the residual and its Jacobian at one
/// nonlinear point: d = t_c - t, tau = ln d, u = d^alpha, and the
/// oscillation sin/cos.
pub(crate) struct DesignCache<T> {
    pub d: Vec<T>,
    pub tau: Vec<T>,
    pub u: Vec<T>,
    pub sin: Vec<T>,
    pub cos: Vec<T>,
}

impl<T: Scalar> Objective<T> {
    pub fn new(series: PriceSeries<T>, model: ModelKind) -> Result<Self> {
        let dof = series.t1() - series.t0() - model.n_params() as i64;
        if dof <= 0 {
            return Err(Error::DegenerateWindow {
                t0: series.t0(),
                t1: series.t1(),
                n: model.n_params(),
            });
        }
        Ok(Self { series, model })
    }

    pub fn series(&self) -> &PriceSeries<T> {
        &self.series
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn n_params(&self) -> usize {
        self.model.n_params()
    }

    /// The normalization t1 - t0 - n; positive by construction.
    pub fn dof(&self) -> T {
        T::from_i64(self.series.t1() - self.series.t0() - self.model.n_params() as i64).unwrap()
    }

    /// Largest absolute data value, the scale for relative thresholds.
    pub fn value_scale(&self) -> T {
        self.series.values().iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    fn value_at(&self, params: &LpplParams<T>, t: T) -> Result<T> {
        match self.model {
            ModelKind::Lppl => eval_lppl(params, t),
            ModelKind::PowerLaw => eval_power_law(params, t),
        }
    }

    /// S at a full parameter set.
    pub fn normalized_sse(&self, params: &LpplParams<T>) -> Result<T> {
        let t0 = self.series.t0();
        let sq: Vec<T> = self
            .series
            .values()
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let t = T::from_i64(t0 + i as i64).unwrap();
                self.value_at(params, t).map(|f| {
                    let r = f - p;
                    r * r
                })
            })
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&sq) / self.dof())
    }

    /// Best (A, B, C) at fixed nonlinear parameters. The returned S is the
    /// ordinary `normalized_sse` of the assembled parameter set.
    pub fn linear_subfit(&self, nonlinear: &Nonlinear<T>) -> Result<LinearFit<T>> {
        let (sol, _) = self.solve_linear(nonlinear)?;
        let c = match self.model {
            ModelKind::Lppl => {
                let floor = T::from64(B_ZERO_RELATIVE) * self.value_scale();
                if sol.b.abs() < floor {
                    return Err(Error::BZero { b: sol.b.to64() });
                }
                sol.c2 / sol.b
            }
            ModelKind::PowerLaw => T::zero(),
        };
        let params = nonlinear.with_linear(sol.a, sol.b, c);
        let s = self.normalized_sse(&params)?;
        Ok(LinearFit { a: sol.a, b: sol.b, c, s })
    }

    /// Per-day design quantities at one nonlinear point.
    pub(crate) fn design_cache(&self, nl: &Nonlinear<T>) -> Result<DesignCache<T>> {
        let t1 = T::from_i64(self.series.t1()).unwrap();
        if nl.t_c <= t1 {
            return Err(Error::Domain { t: t1.to64(), t_c: nl.t_c.to64() });
        }
        let n = self.series.len();
        let mut cache = DesignCache {
            d: Vec::with_capacity(n),
            tau: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            sin: Vec::with_capacity(n),
            cos: Vec::with_capacity(n),
        };
        let t0 = self.series.t0();
        for i in 0..n {
            let t = T::from_i64(t0 + i as i64).unwrap();
            let d = nl.t_c - t;
            let tau = d.ln();
            let u = (nl.alpha * tau).exp();
            let (sin, cos) = (nl.omega * tau + nl.phi).sin_cos();
            cache.d.push(d);
            cache.tau.push(tau);
            cache.u.push(u);
            cache.sin.push(sin);
            cache.cos.push(cos);
        }
        Ok(cache)
    }

    /// Normal-equation solve in (A, B, C2); shared by the public subfit and
    /// the optimizer's inner loop.
    pub(crate) fn solve_linear(
        &self,
        nl: &Nonlinear<T>,
    ) -> Result<(LinearSolution<T>, DesignCache<T>)> {
        let cache = self.design_cache(nl)?;
        let p = self.series.values();
        let sol = match self.model {
            ModelKind::Lppl => {
                let mut m = [[T::zero(); 3]; 3];
                let mut rhs = [T::zero(); 3];
                for i in 0..p.len() {
                    let u = cache.u[i];
                    let w = u * cache.cos[i];
                    m[0][0] += T::one();
                    m[0][1] += u;
                    m[0][2] += w;
                    m[1][1] += u * u;
                    m[1][2] += u * w;
                    m[2][2] += w * w;
                    rhs[0] += p[i];
                    rhs[1] += p[i] * u;
                    rhs[2] += p[i] * w;
                }
                m[1][0] = m[0][1];
                m[2][0] = m[0][2];
                m[2][1] = m[1][2];
                let x = solve_checked(&m, &rhs)?;
                LinearSolution { a: x[0], b: x[1], c2: x[2] }
            }
            ModelKind::PowerLaw => {
                let mut m = [[T::zero(); 2]; 2];
                let mut rhs = [T::zero(); 2];
                for i in 0..p.len() {
                    let u = cache.u[i];
                    m[0][0] += T::one();
                    m[0][1] += u;
                    m[1][1] += u * u;
                    rhs[0] += p[i];
                    rhs[1] += p[i] * u;
                }
                m[1][0] = m[0][1];
                let x = solve_checked(&m, &rhs)?;
                LinearSolution { a: x[0], b: x[1], c2: T::zero() }
            }
        };
        Ok((sol, cache))
    }

    /// Residuals of a linear solution against the cached design; the S of
    /// the pair is the pairwise-summed squares over the dof.
    pub(crate) fn cached_sse(&self, sol: &LinearSolution<T>, cache: &DesignCache<T>) -> T {
        let p = self.series.values();
        let sq: Vec<T> = (0..p.len())
            .map(|i| {
                let r = sol.a + sol.b * cache.u[i] + sol.c2 * cache.u[i] * cache.cos[i] - p[i];
                r * r
            })
            .collect();
        pairwise_sum(&sq) / self.dof()
    }

    /// Analytic gradient of S with respect to all seven parameters.
    pub fn grad_s(&self, params: &LpplParams<T>) -> Result<[T; 7]> {
        let t0 = self.series.t0();
        let mut acc = [T::zero(); 7];
        for (i, &p) in self.series.values().iter().enumerate() {
            let t = T::from_i64(t0 + i as i64).unwrap();
            let (f, g) = match self.model {
                ModelKind::Lppl => (eval_lppl(params, t)?, grad_lppl(params, t)?),
                ModelKind::PowerLaw => {
                    let f = eval_power_law(params, t)?;
                    let d = params.t_c - t;
                    let tau = d.ln();
                    let u = (params.alpha * tau).exp();
                    let g = [
                        T::one(),
                        u,
                        T::zero(),
                        params.b * params.alpha * u / d,
                        params.b * u * tau,
                        T::zero(),
                        T::zero(),
                    ];
                    (f, g)
                }
            };
            let r = f - p;
            for k in 0..7 {
                acc[k] += r * g[k];
            }
        }
        let two_over_dof = T::from64(2.0) / self.dof();
        Ok(acc.map(|v| v * two_over_dof))
    }

    /// Hessian of S by central finite differences of `grad_s`, symmetrized.
    pub fn hessian_of_s(&self, params: &LpplParams<T>) -> Result<HessianMatrix<T>> {
        let steps = fd_steps(params);
        let t1 = T::from_i64(self.series.t1()).unwrap();
        if params.t_c - steps[3] <= t1 {
            return Err(Error::Domain { t: t1.to64(), t_c: (params.t_c - steps[3]).to64() });
        }

        let x = params.to_array();
        let mut cols = [[T::zero(); 7]; 7];
        for j in 0..7 {
            let mut xp = x;
            let mut xm = x;
            xp[j] = x[j] + steps[j];
            xm[j] = x[j] - steps[j];
            let gp = self.grad_s(&LpplParams::from_array(xp))?;
            let gm = self.grad_s(&LpplParams::from_array(xm))?;
            let denom = xp[j] - xm[j];
            for i in 0..7 {
                cols[j][i] = (gp[i] - gm[i]) / denom;
            }
        }

        let half = T::from64(0.5);
        let mut entries = [[T::zero(); 7]; 7];
        for i in 0..7 {
            for j in 0..7 {
                entries[i][j] = (cols[j][i] + cols[i][j]) * half;
            }
        }
        HessianMatrix::from_entries(entries)
    }
}

fn solve_checked<T: Scalar, const N: usize>(m: &[[T; N]; N], rhs: &[T; N]) -> Result<[T; N]> {
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateDesign { cond: f64::INFINITY });
    }
    let cond = condition_number(m)?;
    if !(cond <= T::from64(DESIGN_CONDITION_LIMIT)) {
        return Err(Error::DegenerateDesign { cond: cond.to64() });
    }
    cholesky_solve(m, rhs).ok_or(Error::DegenerateDesign { cond: cond.to64() })
}

/// Central-difference step sizes: cbrt(eps) times the parameter magnitude,
/// floored at each parameter's natural scale (1 for A, B, C, alpha, phi;
/// 1 day for t_c; 0.1 for omega).
fn fd_steps<T: Scalar>(params: &LpplParams<T>) -> [T; 7] {
    let rel = T::epsilon().cbrt();
    let floors = [1.0, 1.0, 1.0, 1.0, 1.0, 0.1, 1.0];
    let x = params.to_array();
    let mut h = [T::zero(); 7];
    for i in 0..7 {
        h[i] = rel * x[i].abs().max(T::from64(floors[i]));
    }
    h
}

/// Symmetric, finite 7x7 matrix of second partials of S, in the canonical
/// (A, B, C, t_c, alpha, omega, phi) component order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianMatrix<T = f64> {
    entries: [[T; 7]; 7],
}

impl<T: Scalar> HessianMatrix<T> {
    /// Validates finiteness and symmetry (|h_ij - h_ji| < 1e-9 * max(|h_ij|, 1)).
    pub fn from_entries(entries: [[T; 7]; 7]) -> Result<Self> {
        for row in &entries {
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::InvalidConfig("non-finite Hessian entry".into()));
                }
            }
        }
        for i in 0..7 {
            for j in (i + 1)..7 {
                let delta = (entries[i][j] - entries[j][i]).abs();
                let limit = T::from64(1e-9) * entries[i][j].abs().max(T::one());
                if delta >= limit {
                    return Err(Error::NotSymmetric { i, j, delta: delta.to64() });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[[T; 7]; 7] {
        &self.entries
    }
}
