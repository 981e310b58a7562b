//! Table and metadata writers. Every file carries a schema string up front,
//! and nothing time- or host-dependent is written, so reruns are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use opdecay::analysis::VerificationReport;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, OutputFormat};
use crate::inputs::InputFile;

pub const TABLE_SCHEMA: &str = "opdecay-table/1";
pub const META_SCHEMA: &str = "opdecay-meta/1";
pub const RESULT_SCHEMA: &str = "opdecay-result/1";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_num(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => json!(format_num(*x)),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// Fixed scientific notation with 17 significant digits.
pub fn format_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&'static str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut s = format!("# schema: {TABLE_SCHEMA}\n{}\n", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        json!({ "name": self.name, "columns": self.columns, "rows": rows })
    }
}

/// Everything a command produces.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: BTreeMap<String, f64>,
    pub report: Option<VerificationReport>,
    pub notes: Vec<String>,
    pub inputs: Vec<InputFile>,
}

impl Outcome {
    pub fn summarize(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_string(), value);
    }
}

#[derive(Serialize)]
struct Tool {
    name: &'static str,
    version: &'static str,
}

fn input_hash(arguments: &[String], inputs: &[InputFile]) -> String {
    let mut h = Sha256::new();
    for a in arguments {
        h.update(a.as_bytes());
        h.update([0u8]);
    }
    for f in inputs {
        h.update(b"\x01");
        h.update(&f.bytes);
    }
    h.finalize().iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn summary_json(summary: &BTreeMap<String, f64>) -> Value {
    Value::Object(
        summary
            .iter()
            .map(|(k, v)| (k.clone(), Cell::Num(*v).json()))
            .collect(),
    )
}

/// Write the outcome of `command` under `dir` and return the paths written.
pub fn write_outcome(
    dir: &Path,
    stem: &str,
    command: &str,
    arguments: &[String],
    config: &ExperimentConfig,
    outcome: &Outcome,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut meta = serde_json::Map::new();
    meta.insert("schema".into(), json!(META_SCHEMA));
    meta.insert(
        "tool".into(),
        json!(Tool {
            name: "opdecay",
            version: env!("CARGO_PKG_VERSION")
        }),
    );
    meta.insert("command".into(), json!(command));
    meta.insert("arguments".into(), json!(arguments));
    meta.insert(
        "input_sha256".into(),
        json!(input_hash(arguments, &outcome.inputs)),
    );
    meta.insert(
        "inputs".into(),
        json!(outcome.inputs.iter().map(|f| &f.label).collect::<Vec<_>>()),
    );
    meta.insert("config".into(), serde_json::to_value(config)?);
    meta.insert("summary".into(), summary_json(&outcome.summary));
    if let Some(rep) = &outcome.report {
        meta.insert("report".into(), serde_json::to_value(rep)?);
    }
    meta.insert("notes".into(), json!(outcome.notes));

    let mut written = Vec::new();
    match config.format {
        OutputFormat::Csv => {
            let mut files = Vec::new();
            for t in &outcome.tables {
                let path = dir.join(format!("{}.csv", t.name));
                std::fs::write(&path, t.to_csv())
                    .with_context(|| format!("writing {}", path.display()))?;
                files.push(format!("{}.csv", t.name));
                written.push(path);
            }
            meta.insert("outputs".into(), json!(files));
            let path = dir.join(format!("{stem}.meta.json"));
            write_json(&path, &Value::Object(meta))?;
            written.push(path);
        }
        OutputFormat::Structured => {
            meta.insert("schema".into(), json!(RESULT_SCHEMA));
            meta.insert(
                "tables".into(),
                Value::Array(outcome.tables.iter().map(Table::to_json).collect()),
            );
            let path = dir.join(format!("{stem}.json"));
            write_json(&path, &Value::Object(meta))?;
            written.push(path);
        }
    }
    Ok(written)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_is_fixed() {
        assert_eq!(format_num(0.5), "5.0000000000000000e-1");
        assert_eq!(format_num(-1.0 / 3.0), "-3.3333333333333331e-1");
        assert_eq!(format_num(f64::INFINITY), "inf");
        assert_eq!(format_num(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo", &["k", "x", "label"]);
        t.push(vec![Cell::Int(1), Cell::Num(2.0), Cell::Text("a,b".into())]);
        assert_eq!(
            t.to_csv(),
            "# schema: opdecay-table/1\nk,x,label\n1,2.0000000000000000e0,\"a,b\"\n"
        );
    }
}
