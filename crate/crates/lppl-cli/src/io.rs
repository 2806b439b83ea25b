//! CSV ingestion and atomic, bit-stable report writing.
//!
//! Every float written by the CLI goes through [`fmt_f64`], which prints 17
//! significant digits — enough to round-trip any 64-bit value — so a rerun
//! that computes identical numbers emits identical bytes.

use std::fs;
use std::path::Path;

use lppl::{PriceSeries, Scale};

use crate::error::{CliError, Result};

/// 17 significant digits; round-trip exact for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Loads a `t,price` CSV (header optional). Day indices must be consecutive
/// integers; with `log_scale` the prices are natural-log transformed.
pub fn load_csv(path: &Path, log_scale: bool) -> Result<PriceSeries> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io { path: path.into(), source: e })?;
    let mut t0 = 0i64;
    let mut prev: Option<i64> = None;
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let row = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if row == 1 && line.eq_ignore_ascii_case("t,price") {
            continue;
        }
        let (ts, ps) = line.split_once(',').ok_or_else(|| CliError::Parse {
            path: path.into(),
            row,
            message: format!("expected `t,price`, got {line:?}"),
        })?;
        let t: i64 = ts.trim().parse().map_err(|_| CliError::Parse {
            path: path.into(),
            row,
            message: format!("day index {:?} is not an integer", ts.trim()),
        })?;
        let price: f64 = ps.trim().parse().map_err(|_| CliError::Parse {
            path: path.into(),
            row,
            message: format!("price {:?} is not a number", ps.trim()),
        })?;
        match prev {
            None => t0 = t,
            Some(q) if t != q + 1 => {
                return Err(CliError::Gap { path: path.into(), row, expected: q + 1, got: t })
            }
            _ => {}
        }
        prev = Some(t);
        if log_scale {
            if price <= 0.0 {
                return Err(CliError::NonPositive { path: path.into(), row, value: price });
            }
            values.push(price.ln());
        } else {
            values.push(price);
        }
    }
    let scale = if log_scale { Scale::Log } else { Scale::Raw };
    PriceSeries::new(t0, values, scale).map_err(CliError::Lib)
}

/// Writes a series back out in the same `t,price` layout `load_csv` reads.
pub fn save_series(path: &Path, series: &PriceSeries) -> Result<()> {
    let mut out = String::from("t,price\n");
    for (i, v) in series.values().iter().enumerate() {
        out.push_str(&format!("{},{}\n", series.t0() + i as i64, fmt_f64(*v)));
    }
    write_atomic(path, out.as_bytes())
}

/// Write-temp-then-rename so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| CliError::Io { path: path.into(), source };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    fs::write(tmp, bytes).map_err(io_err)?;
    fs::rename(tmp, path).map_err(io_err)
}
