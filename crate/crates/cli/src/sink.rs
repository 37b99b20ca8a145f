//! Output plumbing: the config echo placed in every JSON document, CSV
//! assembly, and the single sink that writes a finished document to stdout
//! or to `--out`.
//!
//! Output is a pure function of the parsed configuration: rows are
//! assembled in grid order, floats print in shortest round-trip form, and
//! JSON objects serialize with sorted keys, so re-running a command
//! reproduces its output byte for byte.

use std::io::Write;
use std::path::PathBuf;

use lagpot::{GridSpec, SignedLogValue};
use serde::Serialize;

/// Echo of the fully parsed invocation, embedded under `meta.config` in
/// JSON output so a result file documents how to reproduce itself.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub part: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ceiling: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub format: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
}

/// Wraps `data` in the standard `{meta, data}` envelope and pretty-prints
/// it with a trailing newline.
pub fn json_document(config: &RunConfig, data: serde_json::Value) -> Result<String, String> {
    let doc = serde_json::json!({
        "meta": Meta {
            tool: "lagpot",
            version: env!("CARGO_PKG_VERSION"),
            config,
        },
        "data": data,
    });
    serde_json::to_string_pretty(&doc)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| format!("could not serialize the result: {e}"))
}

/// Assembles an RFC 4180 CSV document from a header and string records.
pub fn csv_document(header: &[&str], rows: &[Vec<String>]) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)
        .map_err(|e| format!("could not write the CSV header: {e}"))?;
    for row in rows {
        w.write_record(row)
            .map_err(|e| format!("could not write a CSV row: {e}"))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| format!("could not flush the CSV writer: {e}"))?;
    String::from_utf8(bytes).map_err(|e| format!("CSV output is not UTF-8: {e}"))
}

/// Writes the finished document to `--out`, or to stdout when no path was
/// given.
pub fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("could not write {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("could not write to stdout: {e}")),
    }
}

/// Observed relative difference `|a/b - 1|` between two signed log values:
/// zero when both diverge or both vanish, infinite when the signs disagree.
pub fn relative_gap(a: &SignedLogValue, b: &SignedLogValue) -> f64 {
    if a.is_divergent() && b.is_divergent() {
        return 0.0;
    }
    if a.is_zero() && b.is_zero() {
        return 0.0;
    }
    if a.sign() != b.sign() || a.is_divergent() != b.is_divergent() {
        return f64::INFINITY;
    }
    (a.log_abs() - b.log_abs()).exp_m1().abs()
}
