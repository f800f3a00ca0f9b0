//! Report assembly and emission: every run produces a reproducible artifact
//! that echoes the tool version and the resolved configuration, with big
//! integers rendered as decimal strings and the timestamp isolated on its
//! own key so reports from identical configurations are byte-identical
//! elsewhere.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};
use sumsq_core::variance::ScaledRational;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output format selector shared by all subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

/// The resolved configuration of a run, echoed into every report.
#[derive(Clone, Debug, Default)]
pub struct RunConfig(pub BTreeMap<String, Value>);

impl RunConfig {
    pub fn new(command: &str) -> RunConfig {
        let mut map = BTreeMap::new();
        map.insert("command".to_string(), json!(command));
        RunConfig(map)
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.0.insert(key.to_string(), value.into());
    }

    /// `key=value` pairs for CSV comment lines and pretty output.
    pub fn flat(&self) -> String {
        self.0
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}={s}"),
                other => format!("{k}={other}"),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Serializes an exact rational as a `(numerator, q, exponent)` triple with
/// the numerator as a decimal string.
pub fn rational_json(r: &ScaledRational) -> Value {
    json!({
        "num": r.numerator().to_string(),
        "scale": { "q": r.q(), "exponent": r.exponent() },
    })
}

pub fn biguint_str(v: &BigUint) -> String {
    v.to_string()
}

fn timestamp_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Wraps a payload into the standard envelope and emits it as pretty JSON.
pub fn emit_json<T: Serialize>(
    out: &mut dyn Write,
    config: &RunConfig,
    payload: &T,
) -> std::io::Result<()> {
    let mut root = serde_json::Map::new();
    root.insert("version".into(), json!(VERSION));
    root.insert("timestamp_unix".into(), json!(timestamp_unix()));
    root.insert("config".into(), json!(config.0));
    let payload = serde_json::to_value(payload).expect("payload serializes");
    if let Value::Object(map) = payload {
        for (k, v) in map {
            root.insert(k, v);
        }
    } else {
        root.insert("result".into(), payload);
    }
    let text = serde_json::to_string_pretty(&Value::Object(root)).expect("report serializes");
    writeln!(out, "{text}")
}

/// Emits a CSV artifact: version/config comment lines (timestamp on its own
/// line), one header row, then the data rows.
pub fn emit_csv(
    out: &mut dyn Write,
    config: &RunConfig,
    header: &[&str],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    writeln!(out, "# version: {VERSION}")?;
    writeln!(out, "# timestamp_unix: {}", timestamp_unix())?;
    writeln!(out, "# config: {}", config.flat())?;
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Emits the pretty header shared by all text reports.
pub fn emit_pretty_header(out: &mut dyn Write, config: &RunConfig) -> std::io::Result<()> {
    writeln!(out, "sumsq {VERSION}")?;
    writeln!(out, "timestamp_unix: {}", timestamp_unix())?;
    writeln!(out, "config: {}", config.flat())
}

/// Stable partition of rows with mismatches first; relative order is
/// otherwise preserved.
pub fn mismatches_first<T, F: Fn(&T) -> bool>(rows: &mut [T], matched: F) {
    rows.sort_by_key(|r| matched(r));
}
