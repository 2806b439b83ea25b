//! Command-line driver internals: CSV ingestion, fixed-layout report
//! emission, run manifests, and the per-command orchestration. The binary in
//! `main.rs` is a thin flag-parsing shell over this.

pub mod commands;
pub mod error;
pub mod io;
pub mod jsonfmt;
pub mod manifest;

pub use commands::{
    cmd_fit, cmd_mc, cmd_sloppy, cmd_synth, cmd_track, FitOpts, McOpts, SynthOpts, TrackOpts,
};
pub use error::{CliError, Result};
pub use io::{fmt_f64, load_csv, save_series, write_atomic};
pub use manifest::{read_manifest, write_manifest, Manifest, MANIFEST_FILE};
