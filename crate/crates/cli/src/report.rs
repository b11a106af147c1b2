//! Report assembly and emission.
//!
//! Every report is a JSON object with three keys:
//!
//! * `schema_version`: [`SCHEMA_VERSION`];
//! * `config`: the resolved run configuration (subcommand, all arguments
//!   with defaults filled in, output format, worker count);
//! * `result`: the subcommand's payload.
//!
//! Keys are emitted in sorted order. Exact rationals appear as
//! `{"exact": "num/den", "decimal": "..."}`, the decimal carrying 12
//! significant digits for display only. Integers that may exceed 64 bits are
//! decimal strings.
//!
//! The CSV form has a `key,value` header followed by one row per leaf of the
//! JSON tree, in the same order. Keys are dot-joined paths, array elements
//! use their index (`result.goods.0`). Empty arrays and objects appear as
//! `[]` and `{}`, null as `null`.

use housing_core::poly::rational_to_decimal;
use housing_core::{format_rational, ExactRational, Permutation, PreferenceProfile};
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

pub fn rational(x: &ExactRational) -> Value {
    json!({
        "exact": format_rational(x),
        "decimal": rational_to_decimal(x, 12),
    })
}

pub fn perm(p: &Permutation) -> Value {
    json!(p.as_slice())
}

pub fn profile(p: &PreferenceProfile) -> Value {
    json!(p.to_vecs())
}

pub fn assemble(config: Value, result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "result": result,
    })
}

pub fn render(report: &Value, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => {
            let mut rows = Vec::new();
            flatten(report, String::new(), &mut rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"])?;
            for (k, v) in rows {
                w.write_record([k, v])?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

/// Leaves of `v` as `(path, text)` pairs in document order.
pub fn flatten(v: &Value, path: String, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(map) if map.is_empty() => out.push((path, "{}".into())),
        Value::Object(map) => {
            for (k, child) in map {
                flatten(child, join(k), out);
            }
        }
        Value::Array(items) if items.is_empty() => out.push((path, "[]".into())),
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(child, join(&i.to_string()), out);
            }
        }
        Value::String(s) => out.push((path, s.clone())),
        Value::Null => out.push((path, "null".into())),
        Value::Bool(b) => out.push((path, b.to_string())),
        Value::Number(n) => out.push((path, n.to_string())),
    }
}
