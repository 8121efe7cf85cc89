use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ClaimViolated,
}

/// Everything a run emits: provenance plus the command's result.
#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: Value,
    pub command: &'static str,
    pub config: Value,
    pub status: Status,
    pub result: Value,
}

impl Report {
    pub fn new(command: &'static str, config: Value, status: Status, result: Value) -> Self {
        let tool = json!({ "name": "lopsim", "version": env!("CARGO_PKG_VERSION") });
        Self { tool, command, config, status, result }
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        let value = serde_json::to_value(self).map_err(|e| e.to_string())?;
        match format {
            Format::Json => serde_json::to_string_pretty(&value).map(|s| s + "\n").map_err(|e| e.to_string()),
            Format::Csv => to_csv(&value),
        }
    }
}

/// `field,value` rows, one per JSON leaf, with `.`-joined paths. Numbers are
/// printed exactly as in the JSON rendering.
pub fn to_csv(value: &Value) -> Result<String, String> {
    let mut rows = Vec::new();
    flatten(value, String::new(), &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["field", "value"]).map_err(|e| e.to_string())?;
    for (k, v) in rows {
        w.write_record([k, v]).map_err(|e| e.to_string())?;
    }
    String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

fn flatten(value: &Value, path: String, rows: &mut Vec<(String, String)>) {
    let child = |key: &str| if path.is_empty() { key.to_string() } else { format!("{path}.{key}") };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(v, child(k), rows)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(v, child(&i.to_string()), rows)),
        Value::Null => rows.push((path, String::new())),
        Value::String(s) => rows.push((path, s.clone())),
        other => rows.push((path, other.to_string())),
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}
