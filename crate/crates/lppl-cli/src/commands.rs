//! The five commands, each a pure function of its resolved options: load,
//! compute through the library, emit fixed-layout reports plus a manifest.

use std::path::{Path, PathBuf};

use lppl::{
    default_window_ends, eval_lppl, eval_power_law, make_series, multistart_fit, rolling_track,
    run_mc, sloppiness_report, FitConfig, FitResult, McConfig, ModelKind, Objective, PriceSeries,
    SynthSpec, PARAM_NAMES,
};

use crate::error::{CliError, Result};
use crate::io::{fmt_f64, load_csv, save_series, write_atomic};
use crate::jsonfmt;
use crate::manifest::write_manifest;

#[derive(Debug, Clone)]
pub struct FitOpts {
    pub input: PathBuf,
    pub output_dir: PathBuf,
    pub log_price: bool,
    pub model: ModelKind,
    pub starts: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct TrackOpts {
    pub fit: FitOpts,
    pub reference_day: i64,
    pub horizon: usize,
    pub stride: usize,
}

#[derive(Debug, Clone)]
pub struct SynthOpts {
    pub output_dir: PathBuf,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct McOpts {
    pub output_dir: PathBuf,
    pub seed: u64,
    pub fit_seed: u64,
    pub samples: usize,
    pub starts: usize,
    pub window_ends: Option<Vec<i64>>,
    pub levels: Vec<f64>,
}

pub fn model_name(model: ModelKind) -> &'static str {
    match model {
        ModelKind::Lppl => "lppl",
        ModelKind::PowerLaw => "power-law",
    }
}

pub fn parse_model(name: &str) -> Result<ModelKind> {
    match name {
        "lppl" => Ok(ModelKind::Lppl),
        "power-law" => Ok(ModelKind::PowerLaw),
        other => Err(CliError::Flag(format!("unknown model {other:?}"))),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.into(), source: e })
}

fn fit_config(o: &FitOpts) -> FitConfig {
    FitConfig { n_starts: o.starts, seed: o.seed, model: o.model, ..FitConfig::default() }
}

fn fit_manifest_config(o: &FitOpts) -> Vec<(&'static str, String)> {
    vec![
        ("log_price", o.log_price.to_string()),
        ("model", jsonfmt::string(model_name(o.model))),
        ("starts", o.starts.to_string()),
    ]
}

fn fit_json(fit: &FitResult, model: ModelKind) -> String {
    let p = &fit.params;
    let values = [p.a, p.b, p.c, p.t_c, p.alpha, p.omega, p.phi];
    let params: Vec<String> = PARAM_NAMES
        .iter()
        .zip(values)
        .map(|(name, v)| format!("    {}: {}", jsonfmt::string(name), jsonfmt::float(v)))
        .collect();
    format!(
        "{{\n  \"model\": {},\n  \"n\": {},\n  \"params\": {{\n{}\n  }},\n  \"s\": {},\n  \"converged\": {},\n  \"iterations\": {}\n}}\n",
        jsonfmt::string(model_name(model)),
        model.n_params(),
        params.join(",\n"),
        jsonfmt::float(fit.s),
        fit.converged,
        fit.iterations,
    )
}

fn eval_model(model: ModelKind, fit: &FitResult, t: f64) -> Result<f64> {
    match model {
        ModelKind::Lppl => eval_lppl(&fit.params, t).map_err(CliError::Lib),
        ModelKind::PowerLaw => eval_power_law(&fit.params, t).map_err(CliError::Lib),
    }
}

fn residuals_csv(series: &PriceSeries, fit: &FitResult, model: ModelKind) -> Result<String> {
    let mut out = String::from("t,residual\n");
    for (i, observed) in series.values().iter().enumerate() {
        let t = series.t0() + i as i64;
        let r = observed - eval_model(model, fit, t as f64)?;
        out.push_str(&format!("{t},{}\n", fmt_f64(r)));
    }
    Ok(out)
}

fn run_fit(o: &FitOpts) -> Result<(PriceSeries, FitResult)> {
    let series = load_csv(&o.input, o.log_price)?;
    let fit = multistart_fit(&series, &fit_config(o)).map_err(CliError::Lib)?;
    Ok((series, fit))
}

/// `fit`: best-of-multistart parameters as fit.json + residuals.csv.
pub fn cmd_fit(o: &FitOpts) -> Result<()> {
    let (series, fit) = run_fit(o)?;
    ensure_dir(&o.output_dir)?;
    write_atomic(&o.output_dir.join("fit.json"), fit_json(&fit, o.model).as_bytes())?;
    let residuals = residuals_csv(&series, &fit, o.model)?;
    write_atomic(&o.output_dir.join("residuals.csv"), residuals.as_bytes())?;
    write_manifest(&o.output_dir, "fit", Some(&o.input), o.seed, &fit_manifest_config(o))
}

/// `sloppy`: fit, then eigendecompose the Hessian of S at the optimum.
/// Emits fit.json plus the spectrum as eigen.json and eigen.csv.
pub fn cmd_sloppy(o: &FitOpts) -> Result<()> {
    let (series, fit) = run_fit(o)?;
    let objective = Objective::new(series, o.model).map_err(CliError::Lib)?;
    let hessian = objective.hessian_of_s(&fit.params).map_err(CliError::Lib)?;
    let report = sloppiness_report(&hessian).map_err(CliError::Lib)?;

    let vectors = jsonfmt::array(report.eigenvectors.iter().map(|v| jsonfmt::floats(v)));
    let orders = match report.orders_of_separation {
        Some(n) => n.to_string(),
        None => "null".into(),
    };
    let majors = jsonfmt::array(
        report
            .major_components
            .iter()
            .map(|ids| jsonfmt::array(ids.iter().map(|i| i.to_string()))),
    );
    let eigen_json = format!(
        "{{\n  \"eigenvalues\": {},\n  \"eigenvectors\": {},\n  \"orders_of_separation\": {},\n  \"major_components\": {}\n}}\n",
        jsonfmt::floats(&report.eigenvalues),
        vectors,
        orders,
        majors,
    );

    let mut eigen_csv = format!("lambda,{}\n", PARAM_NAMES.join(","));
    for (lambda, vector) in report.eigenvalues.iter().zip(&report.eigenvectors) {
        let comps: Vec<String> = vector.iter().map(|c| fmt_f64(*c)).collect();
        eigen_csv.push_str(&format!("{},{}\n", fmt_f64(*lambda), comps.join(",")));
    }

    ensure_dir(&o.output_dir)?;
    write_atomic(&o.output_dir.join("fit.json"), fit_json(&fit, o.model).as_bytes())?;
    write_atomic(&o.output_dir.join("eigen.json"), eigen_json.as_bytes())?;
    write_atomic(&o.output_dir.join("eigen.csv"), eigen_csv.as_bytes())?;
    write_manifest(&o.output_dir, "sloppy", Some(&o.input), o.seed, &fit_manifest_config(o))
}

/// `track`: rolling nonlinear-block spectra over the run-up to the
/// reference day; failed dates keep their row with NaN eigenvalues.
pub fn cmd_track(o: &TrackOpts) -> Result<()> {
    let series = load_csv(&o.fit.input, o.fit.log_price)?;
    let track = rolling_track(&series, o.reference_day, o.horizon, o.stride, &fit_config(&o.fit))
        .map_err(CliError::Lib)?;

    let mut csv = String::from("date,lambda1,lambda2,lambda3,lambda4\n");
    for (date, spectrum) in track.dates.iter().zip(&track.spectra) {
        let row = spectrum.unwrap_or([f64::NAN; 4]);
        let cells: Vec<String> = row.iter().map(|l| fmt_f64(*l)).collect();
        csv.push_str(&format!("{date},{}\n", cells.join(",")));
    }

    ensure_dir(&o.fit.output_dir)?;
    write_atomic(&o.fit.output_dir.join("track.csv"), csv.as_bytes())?;
    let mut config = fit_manifest_config(&o.fit);
    config.push(("reference_day", o.reference_day.to_string()));
    config.push(("horizon", o.horizon.to_string()));
    config.push(("stride", o.stride.to_string()));
    write_manifest(&o.fit.output_dir, "track", Some(&o.fit.input), o.fit.seed, &config)
}

/// `synth`: the reference synthetic series for the given noise seed.
pub fn cmd_synth(o: &SynthOpts) -> Result<()> {
    let spec: SynthSpec = SynthSpec::reference_1987(o.seed);
    let series = make_series(&spec).map_err(CliError::Lib)?;
    ensure_dir(&o.output_dir)?;
    save_series(&o.output_dir.join("series.csv"), &series)?;
    write_manifest(&o.output_dir, "synth", None, o.seed, &[])
}

/// `mc`: the crash-time Monte Carlo on the reference ensemble.
pub fn cmd_mc(o: &McOpts) -> Result<()> {
    let spec: SynthSpec = SynthSpec::reference_1987(o.seed);
    let t1 = spec.t0 + spec.length as i64 - 1;
    let window_ends =
        o.window_ends.clone().unwrap_or_else(|| default_window_ends(t1, 150, 10));
    let config = McConfig {
        spec,
        n_samples: o.samples,
        window_ends: window_ends.clone(),
        fit_config: FitConfig { n_starts: o.starts, seed: o.fit_seed, ..FitConfig::default() },
        confidence_levels: o.levels.clone(),
    };
    let summary = run_mc(&config).map_err(CliError::Lib)?;

    let level_cols: Vec<String> = o
        .levels
        .iter()
        .flat_map(|level| {
            let pct = (level * 100.0).round() as i64;
            [format!("lo{pct}"), format!("hi{pct}")]
        })
        .collect();
    let mut csv = format!("window_end,n_used,n_failed,mean_tc,std_tc,bias,{}\n", level_cols.join(","));
    for row in &summary.rows {
        let windows: Vec<String> = row
            .windows
            .iter()
            .flat_map(|(lo, hi)| [fmt_f64(*lo), fmt_f64(*hi)])
            .collect();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.window_end,
            row.n_used,
            row.n_failed,
            fmt_f64(row.mean_tc),
            fmt_f64(row.std_tc),
            fmt_f64(row.bias),
            windows.join(","),
        ));
    }

    ensure_dir(&o.output_dir)?;
    write_atomic(&o.output_dir.join("mc.csv"), csv.as_bytes())?;
    let ends = jsonfmt::array(window_ends.iter().map(|e| e.to_string()));
    let levels: Vec<f64> = o.levels.clone();
    let config_entries = vec![
        ("samples", o.samples.to_string()),
        ("starts", o.starts.to_string()),
        ("fit_seed", o.fit_seed.to_string()),
        ("window_ends", ends),
        ("levels", jsonfmt::floats(&levels)),
    ];
    write_manifest(&o.output_dir, "mc", None, o.seed, &config_entries)
}
