use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::args::Format;
use crate::settings::{CliError, CliResult};

/// Seventeen significant digits, enough to round-trip an f64.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Empty => Value::Null,
            other => Value::String(other.render()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("cells are UTF-8")
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().cloned().zip(row.iter().map(Cell::to_json)).collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "columns": self.columns, "rows": rows })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => pretty(&self.to_json()),
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn resolve_path(out_dir: &Path, file: &Path) -> PathBuf {
    if file.is_absolute() {
        file.to_path_buf()
    } else {
        out_dir.join(file)
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| CliError::Io { path: parent.to_path_buf(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Sidecar describing how an output was produced.
#[derive(Debug, Serialize)]
pub struct Metadata<'a> {
    pub command: &'a str,
    pub config: &'a BTreeMap<String, String>,
    /// Equivalent invocation with every resolved value spelled out.
    pub command_line: Vec<String>,
    pub cli_version: &'static str,
    pub core_version: &'static str,
    pub wall_time_s: String,
    pub created_unix_s: u64,
    pub output: String,
}

pub fn command_line(command: &str, positional: &[&str], config: &BTreeMap<String, String>) -> Vec<String> {
    let mut argv = vec!["wigner".to_string(), command.to_string()];
    argv.extend(positional.iter().map(|s| s.to_string()));
    for (k, v) in config {
        match v.as_str() {
            "false" => {}
            "true" if k == "interpolate" => argv.push(format!("--{k}")),
            _ => {
                argv.push(format!("--{k}"));
                argv.push(v.clone());
            }
        }
    }
    argv
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    output.with_file_name(name)
}

pub fn write_sidecar(
    output: &Path,
    command: &str,
    positional: &[&str],
    config: &BTreeMap<String, String>,
    elapsed: Duration,
) -> CliResult<()> {
    let meta = Metadata {
        command,
        config,
        command_line: command_line(command, positional, config),
        cli_version: env!("CARGO_PKG_VERSION"),
        core_version: wigner_path::VERSION,
        wall_time_s: fmt_num(elapsed.as_secs_f64()),
        created_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        output: output.display().to_string(),
    };
    let value = serde_json::to_value(&meta).expect("metadata serializes");
    write_file(&sidecar_path(output), &pretty(&value))
}

/// SHA-256 over the canonical `key=value` lines of a configuration.
pub fn config_hash(config: &BTreeMap<String, String>) -> String {
    let mut h = Sha256::new();
    for (k, v) in config {
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}
