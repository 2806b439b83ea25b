//! Levenberg-Marquardt over the nonlinear parameters, with multistart.
//!
//! The optimizer state is (t_c, alpha, omega, phi); at every trial point the
//! linear coefficients are re-solved exactly, so the objective the damped
//! steps see is the reduced S(t_c, alpha, omega, phi). At the linear optimum
//! the partial gradient holding (A, B, C2) fixed equals the gradient of the
//! reduced objective, so the usual J^T r expressions stay exact here.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LpplParams, ModelKind, Nonlinear, PriceSeries};
use crate::num::Scalar;
use crate::objective::{DesignCache, LinearSolution, Objective, B_ZERO_RELATIVE};
use crate::rng::CounterRng;

/// Sampling intervals for multistart initial conditions. A `None` critical
/// time means the window-derived default (t1 + 1, t1 + 2 * (t1 - t0)].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitRanges {
    pub t_c: Option<(f64, f64)>,
    pub alpha: (f64, f64),
    pub omega: (f64, f64),
    pub phi: (f64, f64),
}

impl Default for InitRanges {
    fn default() -> Self {
        Self {
            t_c: None,
            alpha: (0.05, 1.95),
            omega: (2.0, 25.0),
            phi: (0.0, std::f64::consts::TAU),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step_tol: f64,
    pub damping_init_factor: f64,
    pub damping_scale: f64,
    pub n_starts: usize,
    pub seed: u64,
    pub model: ModelKind,
    pub init_ranges: InitRanges,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iters: 500,
            grad_tol: 1e-8,
            step_tol: 1e-10,
            damping_init_factor: 1e-3,
            damping_scale: 10.0,
            n_starts: 500,
            seed: 0,
            model: ModelKind::Lppl,
            init_ranges: InitRanges::default(),
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if self.n_starts < 1 {
            return Err(Error::InvalidConfig("n_starts must be at least 1".into()));
        }
        if !(self.grad_tol > 0.0) || !(self.step_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if !(self.damping_init_factor > 0.0) || !(self.damping_scale > 1.0) {
            return Err(Error::InvalidConfig("damping schedule must be positive".into()));
        }
        let ranges = [
            ("alpha", self.init_ranges.alpha),
            ("omega", self.init_ranges.omega),
            ("phi", self.init_ranges.phi),
        ];
        for (name, (lo, hi)) in ranges {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidConfig(format!("empty {name} sampling interval")));
            }
        }
        if let Some((lo, hi)) = self.init_ranges.t_c {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidConfig("empty t_c sampling interval".into()));
            }
        }
        Ok(())
    }
}

/// Outcome of one local fit (or of a whole multistart).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult<T = f64> {
    pub params: LpplParams<T>,
    pub s: T,
    pub converged: bool,
    pub iterations: usize,
    pub start_index: usize,
}

/// One damped local minimization from `init`.
pub fn lm_fit<T: Scalar>(
    series: &PriceSeries<T>,
    init: Nonlinear<T>,
    config: &FitConfig,
) -> Result<FitResult<T>> {
    config.validate()?;
    let objective = Objective::new(series.clone(), config.model)?;
    lm_on(&objective, init, config, 0, &mut None)
}

/// As `lm_fit`, appending the S value of every accepted step to `trace`.
pub fn lm_fit_traced<T: Scalar>(
    series: &PriceSeries<T>,
    init: Nonlinear<T>,
    config: &FitConfig,
    trace: &mut Vec<T>,
) -> Result<FitResult<T>> {
    config.validate()?;
    let objective = Objective::new(series.clone(), config.model)?;
    let mut recorder = Some(std::mem::take(trace));
    let out = lm_on(&objective, init, config, 0, &mut recorder);
    *trace = recorder.unwrap_or_default();
    out
}

/// Best of `config.n_starts` seeded local fits, reduced by (S, start index).
pub fn multistart_fit<T: Scalar>(
    series: &PriceSeries<T>,
    config: &FitConfig,
) -> Result<FitResult<T>> {
    config.validate()?;
    let objective = Objective::new(series.clone(), config.model)?;
    let results: Vec<Result<FitResult<T>>> = (0..config.n_starts)
        .into_par_iter()
        .map(|i| {
            let init = sample_init(&objective, config, i);
            lm_on(&objective, init, config, i, &mut None)
        })
        .collect();

    let mut best: Option<FitResult<T>> = None;
    let mut first_err: Option<Error> = None;
    for r in results {
        match r {
            Ok(fit) if fit.s.is_finite() => {
                if best.as_ref().map_or(true, |b| fit.s < b.s) {
                    best = Some(fit);
                }
            }
            Ok(_) => {}
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    best.ok_or_else(|| {
        first_err.unwrap_or_else(|| Error::InvalidConfig("no start produced a fit".into()))
    })
}

/// Initial nonlinear tuple for start `i`: four uniform draws from stream `i`
/// in the fixed order t_c, alpha, omega, phi, so the sample for a given
/// start never depends on how many starts run.
fn sample_init<T: Scalar>(objective: &Objective<T>, config: &FitConfig, i: usize) -> Nonlinear<T> {
    let series = objective.series();
    let (tc_lo, tc_hi) = config.init_ranges.t_c.unwrap_or({
        let t1 = series.t1() as f64;
        (t1 + 1.0, t1 + 2.0 * (series.t1() - series.t0()) as f64)
    });
    let mut rng = CounterRng::stream(config.seed, i as u64);
    let t_c = rng.uniform_in(tc_lo, tc_hi);
    let alpha = rng.uniform_in(config.init_ranges.alpha.0, config.init_ranges.alpha.1);
    let omega = rng.uniform_in(config.init_ranges.omega.0, config.init_ranges.omega.1);
    let phi = rng.uniform_in(config.init_ranges.phi.0, config.init_ranges.phi.1);
    Nonlinear {
        t_c: T::from64(t_c),
        alpha: T::from64(alpha),
        omega: T::from64(omega),
        phi: T::from64(phi),
    }
}

fn lm_on<T: Scalar>(
    objective: &Objective<T>,
    init: Nonlinear<T>,
    config: &FitConfig,
    start_index: usize,
    trace: &mut Option<Vec<T>>,
) -> Result<FitResult<T>> {
    let wall = T::from_i64(objective.series().t1() + 1).unwrap();
    let finite_init =
        init.t_c.is_finite() && init.alpha.is_finite() && init.omega.is_finite() && init.phi.is_finite();
    if !finite_init || init.t_c <= wall {
        return Err(Error::InitInvalid(format!(
            "t_c = {} must lie strictly beyond t1 + 1 = {}",
            init.t_c, wall
        )));
    }

    let (mut sol, mut cache) = objective.solve_linear(&init)?;
    let mut nl = init;
    let mut s = objective.cached_sse(&sol, &cache);
    if !s.is_finite() {
        return Err(Error::InitInvalid("objective is not finite at the initial point".into()));
    }
    if let Some(t) = trace.as_mut() {
        t.push(s);
    }

    let nu = T::from64(config.damping_scale);
    let grad_tol = T::from64(config.grad_tol);
    let step_tol = T::from64(config.step_tol);
    let mut mu = T::zero();
    let mut mu_init = T::zero();
    let mut converged = false;
    let mut iterations = 0;

    'outer: while iterations < config.max_iters {
        iterations += 1;
        let (jtj, g) = gauss_newton_system(objective, &nl, &sol, &cache);
        let g_inf = g.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
        if g_inf <= grad_tol {
            converged = true;
            break;
        }
        if mu_init == T::zero() {
            let max_diag = (0..4).fold(T::zero(), |m, i| m.max(jtj[i][i]));
            mu_init = T::from64(config.damping_init_factor) * max_diag;
            if !(mu_init > T::zero()) {
                mu_init = T::from64(config.damping_init_factor);
            }
            mu = mu_init;
        }
        let mu_cap = mu_init * T::from64(1e12);

        loop {
            let step = damped_step(&jtj, &g, mu);
            let step = match step {
                Some(d) => d,
                None => {
                    mu *= nu;
                    if mu > mu_cap {
                        break 'outer;
                    }
                    continue;
                }
            };

            let step_norm = step.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
            let state_norm = [nl.t_c, nl.alpha, nl.omega, nl.phi]
                .iter()
                .fold(T::zero(), |acc, &v| acc + v * v)
                .sqrt();
            if step_norm <= step_tol * (state_norm + step_tol) {
                converged = true;
                break 'outer;
            }

            let trial = Nonlinear {
                t_c: nl.t_c + step[0],
                alpha: nl.alpha + step[1],
                omega: nl.omega + step[2],
                phi: nl.phi + step[3],
            };
            let candidate = if trial.t_c > wall {
                objective.solve_linear(&trial).ok().map(|(tsol, tcache)| {
                    let ts = objective.cached_sse(&tsol, &tcache);
                    (tsol, tcache, ts)
                })
            } else {
                None
            };

            match candidate {
                Some((tsol, tcache, ts)) if ts.is_finite() && ts < s => {
                    nl = trial;
                    sol = tsol;
                    cache = tcache;
                    s = ts;
                    if let Some(t) = trace.as_mut() {
                        t.push(s);
                    }
                    mu = (mu / nu).max(mu_init * T::from64(1e-20));
                    break;
                }
                _ => {
                    mu *= nu;
                    if mu > mu_cap {
                        break 'outer;
                    }
                }
            }
        }
    }

    let mut c = match config.model {
        ModelKind::Lppl => {
            let floor = T::from64(B_ZERO_RELATIVE) * objective.value_scale();
            if sol.b.abs() < floor {
                return Err(Error::BZero { b: sol.b.to64() });
            }
            sol.c2 / sol.b
        }
        ModelKind::PowerLaw => T::zero(),
    };
    // (C, phi) and (-C, phi + pi) draw the same curve; report the C >= 0
    // branch so recovery against a known truth is determinate.
    if c < T::zero() {
        c = -c;
        nl.phi += T::from64(std::f64::consts::PI);
    }
    nl.phi = wrap_phi(nl.phi);
    let params = match config.model {
        ModelKind::Lppl => nl.with_linear(sol.a, sol.b, c),
        ModelKind::PowerLaw => LpplParams {
            a: sol.a,
            b: sol.b,
            c,
            t_c: nl.t_c,
            alpha: nl.alpha,
            omega: T::zero(),
            phi: T::zero(),
        },
    };
    let s_final = objective.normalized_sse(&params)?;
    Ok(FitResult { params, s: s_final, converged, iterations, start_index })
}

/// Scaled Gauss-Newton system of the reduced objective over (t_c, alpha,
/// omega, phi): (2/dof) J'^T J' and the gradient (2/dof) J'^T r, where J'
/// is the raw fixed-linear Jacobian with the span of the linear design
/// projected out. The projection is what makes the curvature model match
/// the objective the trial steps actually see — each trial re-solves
/// (A, B, C2), and the linear-nonlinear coupling here is strong enough
/// that ignoring it stalls convergence. The gradient is exact either way,
/// since the residual is orthogonal to the design at the linear optimum.
/// For the power law C2 = 0, so the omega and phi rows vanish and those
/// coordinates simply never move.
fn gauss_newton_system<T: Scalar>(
    objective: &Objective<T>,
    nl: &Nonlinear<T>,
    sol: &LinearSolution<T>,
    cache: &DesignCache<T>,
) -> ([[T; 4]; 4], [T; 4]) {
    let p = objective.series().values();
    let oscillating = objective.model() == ModelKind::Lppl;

    let mut m = [[T::zero(); 3]; 3];
    let mut cross = [[T::zero(); 4]; 3];
    let mut phi_r = [T::zero(); 3];
    let mut jtj = [[T::zero(); 4]; 4];
    let mut jtr = [T::zero(); 4];
    for i in 0..p.len() {
        let (d, tau, u) = (cache.d[i], cache.tau[i], cache.u[i]);
        let (sin, cos) = (cache.sin[i], cache.cos[i]);
        let w = if oscillating { u * cos } else { T::zero() };
        let r = sol.a + sol.b * u + sol.c2 * u * cos - p[i];
        let design = [T::one(), u, w];
        let j = [
            u / d * (nl.alpha * (sol.b + sol.c2 * cos) - sol.c2 * nl.omega * sin),
            u * tau * (sol.b + sol.c2 * cos),
            -sol.c2 * u * sin * tau,
            -sol.c2 * u * sin,
        ];
        for a in 0..3 {
            phi_r[a] += design[a] * r;
            for b in a..3 {
                m[a][b] += design[a] * design[b];
            }
            for k in 0..4 {
                cross[a][k] += design[a] * j[k];
            }
        }
        for a in 0..4 {
            jtr[a] += j[a] * r;
            for b in a..4 {
                jtj[a][b] += j[a] * j[b];
            }
        }
    }
    for a in 0..3 {
        for b in 0..a {
            m[a][b] = m[b][a];
        }
    }
    for a in 0..4 {
        for b in 0..a {
            jtj[a][b] = jtj[b][a];
        }
    }
    if !oscillating {
        // The dummy third design column is all zeros; pin its pivot so the
        // shared 3x3 solve reduces to the active 2x2 one.
        m[2][2] = T::one();
    }

    let solved: Option<([[T; 3]; 4], [T; 3])> = (|| {
        let y = crate::linalg::cholesky_solve(&m, &phi_r)?;
        let mut x = [[T::zero(); 3]; 4];
        for k in 0..4 {
            let col = [cross[0][k], cross[1][k], cross[2][k]];
            x[k] = crate::linalg::cholesky_solve(&m, &col)?;
        }
        Some((x, y))
    })();
    if let Some((x, y)) = solved {
        for k in 0..4 {
            for l in k..4 {
                let col_l = [cross[0][l], cross[1][l], cross[2][l]];
                let corr = col_l[0] * x[k][0] + col_l[1] * x[k][1] + col_l[2] * x[k][2];
                jtj[k][l] -= corr;
                if l != k {
                    jtj[l][k] = jtj[k][l];
                }
            }
            jtr[k] -= cross[0][k] * y[0] + cross[1][k] * y[1] + cross[2][k] * y[2];
        }
    }

    let scale = T::from64(2.0) / objective.dof();
    for a in 0..4 {
        jtr[a] *= scale;
        for b in 0..4 {
            jtj[a][b] *= scale;
        }
    }
    (jtj, jtr)
}

fn damped_step<T: Scalar>(jtj: &[[T; 4]; 4], g: &[T; 4], mu: T) -> Option<[T; 4]> {
    let mut m = *jtj;
    for i in 0..4 {
        m[i][i] += mu;
    }
    let rhs = [-g[0], -g[1], -g[2], -g[3]];
    crate::linalg::cholesky_solve(&m, &rhs)
}

fn wrap_phi<T: Scalar>(phi: T) -> T {
    let tau = T::from64(std::f64::consts::TAU);
    let w = phi - tau * (phi / tau).floor();
    if w >= tau || w < T::zero() {
        T::zero()
    } else {
        w
    }
}
