//! Sloppiness analysis of a fit: eigendecomposition of the Hessian of S,
//! the per-eigenvector component report, and the rolling eigenvalue track
//! over the days leading up to the critical time.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fitter::{multistart_fit, FitConfig};
use crate::linalg::{jacobi_eigen, SymEigen};
use crate::model::{PriceSeries, NONLINEAR_IDX};
use crate::num::Scalar;
use crate::objective::{HessianMatrix, Objective};

/// |component| above this counts as a major contribution of a parameter to
/// an eigenvector, the threshold used for bold entries in component tables.
pub const MAJOR_COMPONENT_THRESHOLD: f64 = 0.1;

/// Full spectral decomposition of the Hessian, eigenvalues descending,
/// eigenvectors as rows. Signs are normalized so the first major component
/// of every eigenvector is positive.
pub fn eigendecompose<T: Scalar>(h: &HessianMatrix<T>) -> Result<SymEigen<T, 7>> {
    let mut eig = jacobi_eigen(h.entries())?;
    let threshold = T::from64(MAJOR_COMPONENT_THRESHOLD);
    for v in &mut eig.vectors {
        if let Some(lead) = v.iter().position(|c| c.abs() > threshold) {
            if v[lead] < T::zero() {
                for c in v.iter_mut() {
                    *c = -*c;
                }
            }
        }
    }
    Ok(eig)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SloppinessReport<T = f64> {
    /// Descending eigenvalues of the Hessian of S.
    pub eigenvalues: Vec<T>,
    /// Orthonormal eigenvectors as rows, components in (A, B, C, t_c,
    /// alpha, omega, phi) order, aligned with `eigenvalues`.
    pub eigenvectors: Vec<Vec<T>>,
    /// floor(log10(lambda_max / lambda_min)); `None` when lambda_min <= 0
    /// makes the ratio meaningless.
    pub orders_of_separation: Option<i32>,
    /// Per eigenvector, the parameter indices with |component| > 0.1.
    pub major_components: Vec<Vec<usize>>,
}

pub fn sloppiness_report<T: Scalar>(h: &HessianMatrix<T>) -> Result<SloppinessReport<T>> {
    let eig = eigendecompose(h)?;
    let (lambda_max, lambda_min) = (eig.values[0], eig.values[6]);
    let orders_of_separation = if lambda_min > T::zero() {
        Some((lambda_max / lambda_min).log10().floor().to64() as i32)
    } else {
        None
    };
    let threshold = T::from64(MAJOR_COMPONENT_THRESHOLD);
    let major_components = eig
        .vectors
        .iter()
        .map(|v| (0..7).filter(|&i| v[i].abs() > threshold).collect())
        .collect();
    Ok(SloppinessReport {
        eigenvalues: eig.values.to_vec(),
        eigenvectors: eig.vectors.iter().map(|v| v.to_vec()).collect(),
        orders_of_separation,
        major_components,
    })
}

/// Rolling spectra of the nonlinear block in the run-up to `t_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenTrack<T = f64> {
    /// Evaluation days, strictly increasing.
    pub dates: Vec<i64>,
    /// Per date, the four nonlinear-block eigenvalues sorted descending;
    /// `None` where the fit or the Hessian failed on that date.
    pub spectra: Vec<Option<[T; 4]>>,
    /// Rank swaps of the four parameter-labelled eigenvalues between
    /// consecutive successful dates.
    pub crossings: usize,
}

/// Refits the series truncated at each evaluation date in the `horizon`
/// days before `t_c` (stepping by `stride` from t_c - horizon), and tracks
/// the four eigenvalues whose eigenvectors sit on the nonlinear block.
pub fn rolling_track<T: Scalar>(
    series: &PriceSeries<T>,
    t_c: i64,
    horizon: usize,
    stride: usize,
    fit_config: &FitConfig,
) -> Result<EigenTrack<T>> {
    if stride < 1 {
        return Err(Error::InvalidConfig("stride must be at least 1".into()));
    }
    if horizon < 1 || horizon >= series.len() {
        return Err(Error::InvalidConfig(format!(
            "horizon {horizon} must be positive and shorter than the series ({} days)",
            series.len()
        )));
    }
    fit_config.validate()?;

    let mut dates = Vec::new();
    let mut d = t_c - horizon as i64;
    while d < t_c {
        dates.push(d);
        d += stride as i64;
    }

    let tracked: Vec<Option<([T; 4], [usize; 4])>> =
        dates.par_iter().map(|&d| track_date(series, d, fit_config).ok()).collect();

    let mut crossings = 0;
    let mut prev: Option<[usize; 4]> = None;
    for t in tracked.iter().flatten() {
        if let Some(p) = prev {
            crossings += discordant_pairs(&p, &t.1);
        }
        prev = Some(t.1);
    }

    let spectra = tracked.into_iter().map(|t| t.map(|(s, _)| s)).collect();
    Ok(EigenTrack { dates, spectra, crossings })
}

/// One evaluation date: truncate, refit, eigendecompose, pick the nonlinear
/// block. Returns the four eigenvalues (descending) and the nonlinear
/// parameter index each one is assigned to.
fn track_date<T: Scalar>(
    series: &PriceSeries<T>,
    date: i64,
    fit_config: &FitConfig,
) -> Result<([T; 4], [usize; 4])> {
    let window = series.truncated(date)?;
    let fit = multistart_fit(&window, fit_config)?;
    let objective = Objective::new(window, fit_config.model)?;
    let h = objective.hessian_of_s(&fit.params)?;
    let eig = eigendecompose(&h)?;
    Ok(select_nonlinear_block(&eig))
}

/// An eigenvalue belongs to the nonlinear block when its eigenvector's
/// largest-magnitude component lies on t_c, alpha, omega, or phi; if fewer
/// than four qualify, the block is padded with the eigenvalues carrying the
/// largest squared mass on those components.
fn select_nonlinear_block<T: Scalar>(eig: &SymEigen<T, 7>) -> ([T; 4], [usize; 4]) {
    let nonlinear_mass = |v: &[T; 7]| NONLINEAR_IDX.iter().fold(T::zero(), |s, &i| s + v[i] * v[i]);
    let dominant_is_nonlinear = |v: &[T; 7]| {
        let dom = (0..7).max_by(|&a, &b| v[a].abs().partial_cmp(&v[b].abs()).unwrap()).unwrap();
        NONLINEAR_IDX.contains(&dom)
    };

    let mut ranked: Vec<usize> = (0..7).collect();
    ranked.sort_by(|&a, &b| {
        let qa = dominant_is_nonlinear(&eig.vectors[a]);
        let qb = dominant_is_nonlinear(&eig.vectors[b]);
        qb.cmp(&qa)
            .then_with(|| {
                nonlinear_mass(&eig.vectors[b])
                    .partial_cmp(&nonlinear_mass(&eig.vectors[a]))
                    .unwrap()
            })
            .then(a.cmp(&b))
    });
    let mut chosen = ranked[..4].to_vec();
    chosen.sort_unstable();

    let mut spectrum = [T::zero(); 4];
    let mut labels = [0usize; 4];
    let mut claimed = [false; 4];
    for (pos, &k) in chosen.iter().enumerate() {
        spectrum[pos] = eig.values[k];
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| {
            eig.vectors[k][NONLINEAR_IDX[b]]
                .abs()
                .partial_cmp(&eig.vectors[k][NONLINEAR_IDX[a]].abs())
                .unwrap()
                .then(a.cmp(&b))
        });
        let slot = order.iter().copied().find(|&i| !claimed[i]).unwrap();
        claimed[slot] = true;
        labels[pos] = NONLINEAR_IDX[slot];
    }
    (spectrum, labels)
}

/// Pairs of labels whose relative order differs between two sequences.
fn discordant_pairs(a: &[usize; 4], b: &[usize; 4]) -> usize {
    let pos = |seq: &[usize; 4], x: usize| seq.iter().position(|&v| v == x);
    let mut count = 0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if let (Some(bi), Some(bj)) = (pos(b, a[i]), pos(b, a[j])) {
                if bi > bj {
                    count += 1;
                }
            }
        }
    }
    count
}
