//! CSV and JSON emission, atomic writes and run manifests.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use qdarwin_core::PipCurve;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

const SIGNIFICANT: i32 = 12;

/// `%.12g`-style formatting with `inf` for infinities.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (SIGNIFICANT - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT).contains(&exp) {
        let decimals = (SIGNIFICANT - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Extended reals as JSON: finite values are numbers, infinities the token `inf`.
pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
    } else {
        Value::String(fmt_num(x))
    }
}

/// `m,I_bits,stderr_bits`, optionally with an `I_rescaled` column.
pub fn curve_csv(curve: &PipCurve, rescaled: bool) -> String {
    let mut out = String::from("m,I_bits,stderr_bits");
    if rescaled {
        out.push_str(",I_rescaled");
    }
    out.push('\n');
    let scaled = curve.rescaled_by_total();
    for (p, r) in curve.points.iter().zip(scaled) {
        out.push_str(&format!(
            "{},{},{}",
            p.m,
            fmt_num(p.mean_bits),
            p.stderr_bits.map(fmt_num).unwrap_or_default()
        ));
        if rescaled {
            out.push(',');
            out.push_str(&fmt_num(r));
        }
        out.push('\n');
    }
    out
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command_line: String,
    pub argv: Vec<String>,
    pub seed: u64,
    pub parameters: BTreeMap<String, Value>,
    pub version: String,
    pub threads: usize,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(seed: u64, parameters: BTreeMap<String, Value>) -> Self {
        let argv: Vec<String> = std::env::args().collect();
        RunManifest {
            command_line: argv.join(" "),
            argv,
            seed,
            parameters,
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads: rayon::current_num_threads(),
            wall_time_s: 0.0,
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        write_atomic(path, &text)
    }
}
