//! `lppl` — fit log-periodic power laws, report fit sloppiness, and run the
//! crash-time Monte Carlo, all from CSV in to CSV/JSON out.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lppl_cli::commands::parse_model;
use lppl_cli::error::{CliError, Result};
use lppl_cli::manifest::read_manifest;
use lppl_cli::{cmd_fit, cmd_mc, cmd_sloppy, cmd_synth, cmd_track};
use lppl_cli::{FitOpts, McOpts, SynthOpts, TrackOpts};

#[derive(Parser)]
#[command(name = "lppl", version, about = "LPPL fitting, sloppiness reports, and crash-time Monte Carlo")]
struct Cli {
    /// Worker threads (also via LPPL_THREADS); 0 means all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct FitFlags {
    /// Input CSV with `t,price` rows.
    #[arg(long)]
    input: PathBuf,
    /// Directory for reports and the manifest.
    #[arg(long)]
    output_dir: PathBuf,
    /// Fit the natural log of the price column.
    #[arg(long)]
    log_price: bool,
    /// Model variant: `lppl` or `power-law`.
    #[arg(long, default_value = "lppl")]
    model: String,
    /// Multistart initial conditions.
    #[arg(long, default_value_t = 500)]
    starts: usize,
    /// Seed for the multistart draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a price series; writes fit.json and residuals.csv.
    Fit(FitFlags),
    /// Fit, then eigendecompose the Hessian at the optimum; writes
    /// fit.json, eigen.json, and eigen.csv.
    Sloppy(FitFlags),
    /// Rolling eigenvalue track over the run-up to a reference day;
    /// writes track.csv.
    Track {
        #[command(flatten)]
        fit: FitFlags,
        /// Day the track runs up to (exclusive), typically a crash date.
        #[arg(long)]
        reference_day: i64,
        /// Days before the reference day covered by the track.
        #[arg(long, default_value_t = 150)]
        horizon: usize,
        /// Days between consecutive evaluation dates.
        #[arg(long, default_value_t = 10)]
        stride: usize,
    },
    /// Generate the reference synthetic crash series; writes series.csv.
    Synth {
        #[arg(long)]
        output_dir: PathBuf,
        /// Noise stream seed.
        #[arg(long, default_value_t = 1987)]
        seed: u64,
    },
    /// Monte Carlo of the crash-time estimate on the reference ensemble;
    /// writes mc.csv.
    Mc {
        #[arg(long)]
        output_dir: PathBuf,
        /// Noise stream seed for the synthetic ensemble.
        #[arg(long, default_value_t = 1987)]
        seed: u64,
        /// Seed for each fit's multistart draw.
        #[arg(long, default_value_t = 7)]
        fit_seed: u64,
        /// Synthetic sample paths.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Multistart initial conditions per fit.
        #[arg(long, default_value_t = 50)]
        starts: usize,
        /// Fit-window ends as `first:last:step` day indices; defaults to
        /// every 10 days over the final 150.
        #[arg(long)]
        window_ends: Option<String>,
        /// Confidence levels, comma-separated.
        #[arg(long, default_value = "0.8,0.95")]
        levels: String,
    },
    /// Re-execute a recorded run from its manifest.
    Rerun {
        /// Path to a manifest.json written by a previous run.
        #[arg(long)]
        manifest: PathBuf,
        /// Override the recorded output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn parse_window_ends(text: &str) -> Result<Vec<i64>> {
    let bad = || CliError::Flag(format!("--window-ends {text:?} is not `first:last:step`"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let first: i64 = parts[0].trim().parse().map_err(|_| bad())?;
    let last: i64 = parts[1].trim().parse().map_err(|_| bad())?;
    let step: i64 = parts[2].trim().parse().map_err(|_| bad())?;
    if step < 1 || last < first {
        return Err(bad());
    }
    Ok((first..=last).step_by(step as usize).collect())
}

fn parse_levels(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Flag(format!("--levels entry {part:?} is not a number")))
        })
        .collect()
}

fn fit_opts(flags: &FitFlags) -> Result<FitOpts> {
    Ok(FitOpts {
        input: flags.input.clone(),
        output_dir: flags.output_dir.clone(),
        log_price: flags.log_price,
        model: parse_model(&flags.model)?,
        starts: flags.starts,
        seed: flags.seed,
    })
}

fn rerun(manifest_path: &PathBuf, output_dir: Option<PathBuf>) -> Result<()> {
    let m = read_manifest(manifest_path)?;
    let out = output_dir.unwrap_or_else(|| m.output_dir.clone());
    let missing = |field: &str| CliError::Manifest(format!("missing config field {field:?}"));
    let fit_from_manifest = || -> Result<FitOpts> {
        Ok(FitOpts {
            input: m.input_path.clone().ok_or_else(|| missing("input_path"))?,
            output_dir: out.clone(),
            log_price: m.config.log_price.ok_or_else(|| missing("log_price"))?,
            model: parse_model(m.config.model.as_deref().ok_or_else(|| missing("model"))?)?,
            starts: m.config.starts.ok_or_else(|| missing("starts"))?,
            seed: m.seed,
        })
    };
    match m.command.as_str() {
        "fit" => cmd_fit(&fit_from_manifest()?),
        "sloppy" => cmd_sloppy(&fit_from_manifest()?),
        "track" => cmd_track(&TrackOpts {
            fit: fit_from_manifest()?,
            reference_day: m.config.reference_day.ok_or_else(|| missing("reference_day"))?,
            horizon: m.config.horizon.ok_or_else(|| missing("horizon"))?,
            stride: m.config.stride.ok_or_else(|| missing("stride"))?,
        }),
        "synth" => cmd_synth(&SynthOpts { output_dir: out, seed: m.seed }),
        "mc" => cmd_mc(&McOpts {
            output_dir: out,
            seed: m.seed,
            fit_seed: m.config.fit_seed.ok_or_else(|| missing("fit_seed"))?,
            samples: m.config.samples.ok_or_else(|| missing("samples"))?,
            starts: m.config.starts.ok_or_else(|| missing("starts"))?,
            window_ends: Some(m.config.window_ends.clone().ok_or_else(|| missing("window_ends"))?),
            levels: m.config.levels.clone().ok_or_else(|| missing("levels"))?,
        }),
        other => Err(CliError::Manifest(format!("unknown command {other:?}"))),
    }
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Fit(flags) => cmd_fit(&fit_opts(flags)?),
        Command::Sloppy(flags) => cmd_sloppy(&fit_opts(flags)?),
        Command::Track { fit, reference_day, horizon, stride } => cmd_track(&TrackOpts {
            fit: fit_opts(fit)?,
            reference_day: *reference_day,
            horizon: *horizon,
            stride: *stride,
        }),
        Command::Synth { output_dir, seed } => {
            cmd_synth(&SynthOpts { output_dir: output_dir.clone(), seed: *seed })
        }
        Command::Mc { output_dir, seed, fit_seed, samples, starts, window_ends, levels } => {
            let ends = window_ends.as_deref().map(parse_window_ends).transpose()?;
            cmd_mc(&McOpts {
                output_dir: output_dir.clone(),
                seed: *seed,
                fit_seed: *fit_seed,
                samples: *samples,
                starts: *starts,
                window_ends: ends,
                levels: parse_levels(levels)?,
            })
        }
        Command::Rerun { manifest, output_dir } => rerun(manifest, output_dir.clone()),
    }
}

/// --threads beats LPPL_THREADS; 0 or unset means rayon's default.
fn thread_cap(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("LPPL_THREADS") {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| CliError::Flag(format!("LPPL_THREADS {text:?} is not a thread count"))),
        Err(_) => Ok(0),
    }
}

fn run(cli: &Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap(cli.threads)?)
        .build()
        .map_err(|e| CliError::Flag(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(&cli.command))
}

fn main() -> ExitCode {
    // Flag mistakes are input errors (exit 1); help/version are successes.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
