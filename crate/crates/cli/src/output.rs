//! CSV and JSON emission with a provenance header.

use crate::Failure;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything a run depended on. Hashed into every output.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub command: String,
    pub config: Value,
}

impl Meta {
    pub fn new(command: &str, config: Value) -> Self {
        Self { command: command.to_string(), config }
    }

    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&json!({ "command": self.command, "config": self.config })).expect("json");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    fn to_json(&self) -> Value {
        json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config_sha256": self.hash(),
            "config": self.config,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

/// Shortest round-trip text; exponent form outside a readable range.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) => fmt_f64(*v),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => u8::from(*b).to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) => json!(v),
            Cell::I(v) => json!(v),
            Cell::S(s) => json!(s),
            Cell::B(b) => json!(b),
        }
    }
}

pub struct Table {
    /// `(name, description)`
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `# key: value` header lines.
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: Vec<(&'static str, &'static str)>) -> Self {
        Self { columns, rows: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<String>) {
        self.notes.push((key.to_string(), value.into()));
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_err(e: io::Error) -> Failure {
    Failure::Runtime(format!("write failed: {e}"))
}

pub fn write_table(meta: &Meta, table: &Table, out: Option<&Path>, format: Format) -> Result<(), Failure> {
    let mut w = sink(out)?;
    match format {
        Format::Csv => {
            writeln!(w, "# tcrystal {}", env!("CARGO_PKG_VERSION")).map_err(io_err)?;
            writeln!(w, "# command: {}", meta.command).map_err(io_err)?;
            writeln!(w, "# config-sha256: {}", meta.hash()).map_err(io_err)?;
            writeln!(w, "# config: {}", serde_json::to_string(&meta.config).expect("json")).map_err(io_err)?;
            for (k, v) in &table.notes {
                writeln!(w, "# {k}: {v}").map_err(io_err)?;
            }
            for (name, desc) in &table.columns {
                writeln!(w, "# column {name}: {desc}").map_err(io_err)?;
            }
            let header: Vec<&str> = table.columns.iter().map(|c| c.0).collect();
            writeln!(w, "{}", header.join(",")).map_err(io_err)?;
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                writeln!(w, "{}", cells.join(",")).map_err(io_err)?;
            }
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| Value::Object(table.columns.iter().zip(r).map(|(c, v)| (c.0.to_string(), v.json())).collect()))
                .collect();
            let notes: serde_json::Map<String, Value> = table.notes.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            let columns: Vec<Value> = table.columns.iter().map(|(n, d)| json!({"name": n, "description": d})).collect();
            let doc = json!({ "meta": meta.to_json(), "notes": notes, "columns": columns, "rows": rows });
            serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| Failure::Runtime(e.to_string()))?;
            writeln!(w).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

/// A single-record report, always JSON.
pub fn write_report<T: Serialize>(meta: &Meta, report: &T, out: Option<&Path>) -> Result<(), Failure> {
    let mut w = sink(out)?;
    let doc = json!({ "meta": meta.to_json(), "report": report });
    serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text_round_trips() {
        for v in [0.1, 1e-10, 123456.789, -2.5e-7, 1e20, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(1e-10), "1e-10");
        assert_eq!(fmt_f64(0.25), "0.25");
    }

    #[test]
    fn hash_depends_on_config() {
        let a = Meta::new("x", json!({"q": 1}));
        let b = Meta::new("x", json!({"q": 2}));
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), Meta::new("x", json!({"q": 1})).hash());
    }
}
