//! File emitters. Every data file starts with or embeds the config hash so
//! outputs from different manifests cannot be mixed up silently, and all
//! floating-point values are written with 17 significant digits, enough to
//! reproduce the bits on re-parse. Writers truncate, so reruns overwrite.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::CliError;

/// 17 significant digits, scientific. Round-trips any finite f64 exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(path, e))
}

/// A comment line with the hash, a header line, then comma-joined rows.
pub fn write_csv(
    path: &Path,
    config_hash: &str,
    header: &str,
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    let mut w = create(path)?;
    let io = |e| CliError::io(path, e);
    writeln!(w, "# config_hash={config_hash}").map_err(io)?;
    writeln!(w, "{header}").map_err(io)?;
    for row in rows {
        writeln!(w, "{}", row.join(",")).map_err(io)?;
    }
    finish(w, path)
}

/// Discrete norms of the three perturbation fields at one time.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct SeriesNorms {
    pub phi_l2: f64,
    pub psi_l2: f64,
    pub s_l2: f64,
    pub phi_h2: f64,
    pub psi_h2: f64,
    pub s_h2: f64,
    pub h2_total: f64,
}

/// Sup distances to the exact fan; null at t = 0 where x/t is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct SeriesErrors {
    pub sup_v: Option<f64>,
    pub sup_u: Option<f64>,
    pub sup_s: Option<f64>,
}

/// Conserved totals and their drift against the boundary-flux ledger.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct SeriesTotals {
    pub v: f64,
    pub u: f64,
    pub drift_v: f64,
    pub drift_u: f64,
}

/// One diagnostics record per snapshot. The writer emits keys in the fixed
/// order t, norms, E, E1, E2, err, totals, config_hash; Deserialize is for
/// consumers reading the lines back.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SeriesRecord {
    pub t: f64,
    pub norms: SeriesNorms,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    pub err: SeriesErrors,
    pub totals: SeriesTotals,
    pub config_hash: String,
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "null".into(), fmt_float)
}

/// One JSON line, keys in fixed order.
pub fn render_record(r: &SeriesRecord) -> String {
    let n = &r.norms;
    format!(
        concat!(
            "{{\"t\":{},",
            "\"norms\":{{\"phi_l2\":{},\"psi_l2\":{},\"s_l2\":{},",
            "\"phi_h2\":{},\"psi_h2\":{},\"s_h2\":{},\"h2_total\":{}}},",
            "\"E\":{},\"E1\":{},\"E2\":{},",
            "\"err\":{{\"sup_v\":{},\"sup_u\":{},\"sup_s\":{}}},",
            "\"totals\":{{\"v\":{},\"u\":{},\"drift_v\":{},\"drift_u\":{}}},",
            "\"config_hash\":\"{}\"}}"
        ),
        fmt_float(r.t),
        fmt_float(n.phi_l2),
        fmt_float(n.psi_l2),
        fmt_float(n.s_l2),
        fmt_float(n.phi_h2),
        fmt_float(n.psi_h2),
        fmt_float(n.s_h2),
        fmt_float(n.h2_total),
        fmt_float(r.e),
        fmt_float(r.e1),
        fmt_float(r.e2),
        fmt_opt(r.err.sup_v),
        fmt_opt(r.err.sup_u),
        fmt_opt(r.err.sup_s),
        fmt_float(r.totals.v),
        fmt_float(r.totals.u),
        fmt_float(r.totals.drift_v),
        fmt_float(r.totals.drift_u),
        r.config_hash
    )
}

/// JSONL, one record per line; an empty series gives an empty file.
pub fn write_series(records: &[SeriesRecord], path: &Path) -> Result<(), CliError> {
    let mut w = create(path)?;
    for r in records {
        writeln!(w, "{}", render_record(r)).map_err(|e| CliError::io(path, e))?;
    }
    finish(w, path)
}

/// Minimal JSON value for the meta and failure records.
#[derive(Debug, Clone)]
pub enum JsonValue {
    Num(f64),
    Int(u64),
    Str(String),
    Bool(bool),
    Arr(Vec<JsonValue>),
}

fn escape_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

impl std::fmt::Display for JsonValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JsonValue::Num(x) => f.write_str(&fmt_float(*x)),
            JsonValue::Int(n) => write!(f, "{n}"),
            JsonValue::Str(s) => write!(f, "\"{}\"", escape_json(s)),
            JsonValue::Bool(b) => write!(f, "{b}"),
            JsonValue::Arr(xs) => {
                f.write_str("[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// meta.json: what ran, which hash, which files, and a small summary.
pub fn write_meta(
    dir: &Path,
    kind: &str,
    config_hash: &str,
    files: &[&str],
    summary: &[(&str, JsonValue)],
) -> Result<(), CliError> {
    let path = dir.join("meta.json");
    let mut w = create(&path)?;
    let io = |e| CliError::io(&path, e);
    let file_list = JsonValue::Arr(files.iter().map(|f| JsonValue::Str((*f).into())).collect());
    write!(
        w,
        "{{\"kind\":\"{}\",\"config_hash\":\"{}\",\"files\":{}",
        escape_json(kind),
        escape_json(config_hash),
        file_list
    )
    .map_err(io)?;
    write!(w, ",\"summary\":{{").map_err(io)?;
    for (i, (key, value)) in summary.iter().enumerate() {
        if i > 0 {
            write!(w, ",").map_err(io)?;
        }
        write!(w, "\"{}\":{}", escape_json(key), value).map_err(io)?;
    }
    writeln!(w, "}}}}").map_err(io)?;
    finish(w, &path)
}

/// failure.json: the machine-readable marker left next to partial outputs
/// when a run aborts on positivity loss.
pub fn write_failure(dir: &Path, config_hash: &str, time: f64) -> Result<(), CliError> {
    let path = dir.join("failure.json");
    let mut w = create(&path)?;
    writeln!(
        w,
        "{{\"error\":\"positivity\",\"time\":{},\"config_hash\":\"{}\"}}",
        fmt_float(time),
        escape_json(config_hash)
    )
    .map_err(|e| CliError::io(&path, e))?;
    finish(w, &path)
}
