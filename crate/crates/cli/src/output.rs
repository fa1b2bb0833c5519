//! Report envelope and its JSON and CSV renderings.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};

/// First line of every CSV report.
pub const CSV_VERSION_LINE: &str = "# oscsum-csv v1";

#[derive(Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub seed: u64,
}

/// What every command prints. Carries no timings or thread counts, so equal
/// inputs give equal bytes.
#[derive(Debug, Serialize)]
pub struct Envelope<'a> {
    pub command: String,
    pub provenance: Provenance,
    pub config: &'a RunConfig,
    pub input: Value,
    pub result: Value,
}

impl<'a> Envelope<'a> {
    pub fn new(command: impl Into<String>, config: &'a RunConfig, input: Value, result: Value) -> Self {
        Envelope {
            command: command.into(),
            provenance: Provenance {
                tool: "oscsum",
                version: env!("CARGO_PKG_VERSION"),
                core_version: oscsum::VERSION,
                seed: config.seed,
            },
            config,
            input,
            result,
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(_) | Value::Object(_) => unreachable!("flatten only passes scalars"),
    }
}

/// Depth-first `(path, value)` pairs; object keys and array indices joined
/// by dots. Empty containers appear as `[]` or `{}`.
pub fn flatten(v: &Value, prefix: &str, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                flatten(x, &join(k), out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, x) in a.iter().enumerate() {
                flatten(x, &join(&i.to_string()), out);
            }
        }
        Value::Object(_) => out.push((prefix.to_string(), "{}".into())),
        Value::Array(_) => out.push((prefix.to_string(), "[]".into())),
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

pub fn render(envelope: &Envelope<'_>, format: Format) -> CliResult<Vec<u8>> {
    let value = serde_json::to_value(envelope).map_err(|e| CliError::Output(e.to_string()))?;
    match format {
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(&value).map_err(|e| CliError::Output(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let mut rows = Vec::new();
            flatten(&value, "", &mut rows);
            let mut bytes = format!("{CSV_VERSION_LINE}\n").into_bytes();
            {
                let mut w = csv::Writer::from_writer(&mut bytes);
                w.write_record(["path", "value"]).map_err(|e| CliError::Output(e.to_string()))?;
                for (p, v) in &rows {
                    w.write_record([p, v]).map_err(|e| CliError::Output(e.to_string()))?;
                }
                w.flush().map_err(|e| CliError::Output(e.to_string()))?;
            }
            Ok(bytes)
        }
    }
}

/// Writes to `out` when given, otherwise to stdout.
pub fn emit(bytes: &[u8], out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flatten_paths() {
        let mut rows = Vec::new();
        flatten(&json!({"a": {"b": [1, {"c": null}]}, "e": [], "f": "x,y"}), "", &mut rows);
        assert_eq!(
            rows,
            vec![
                ("a.b.0".to_string(), "1".to_string()),
                ("a.b.1.c".to_string(), "null".to_string()),
                ("e".to_string(), "[]".to_string()),
                ("f".to_string(), "x,y".to_string()),
            ]
        );
    }

    #[test]
    fn csv_has_version_line_and_quotes() {
        let cfg = RunConfig::default();
        let env = Envelope::new("t", &cfg, json!({}), json!({"f": "x,y"}));
        let text = String::from_utf8(render(&env, Format::Csv).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_VERSION_LINE));
        assert_eq!(lines.next(), Some("path,value"));
        assert!(text.contains("result.f,\"x,y\""));
    }
}
