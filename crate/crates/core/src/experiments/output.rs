use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::Result;

use super::config::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

/// Shortest round-trip representation; exponent form outside `[1e-4, 1e6)`.
impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Float(x) => {
                let a = x.abs();
                if *x == 0.0 || !x.is_finite() || (1e-4..1e6).contains(&a) {
                    write!(f, "{x}")
                } else {
                    write!(f, "{x:e}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k].clone()).collect())
    }

    pub fn floats(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.iter().map(Cell::as_f64).collect()
    }

    /// CSV text with a trailing `config_hash` column on every row.
    pub fn to_csv(&self, hash: &str) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = self.columns.clone();
        header.push("config_hash".into());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec: Vec<String> = row.iter().map(Cell::to_string).collect();
            rec.push(hash.to_string());
            w.write_record(&rec)?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

/// Result of one subcommand: tables plus free-form provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub command: String,
    pub tables: Vec<Table>,
    pub metadata: Map<String, Value>,
}

impl Dataset {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), tables: Vec::new(), metadata: Map::new() }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn meta(&mut self, key: &str, value: impl Serialize) {
        self.metadata.insert(key.to_string(), serde_json::to_value(value).expect("metadata serializes"));
    }

    pub fn is_empty(&self) -> bool {
        self.tables.iter().all(|t| t.rows.is_empty())
    }
}

#[derive(Serialize)]
struct TableEntry<'a> {
    file: String,
    columns: &'a [String],
    rows: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config_hash: String,
    config: &'a RunConfig,
    tables: Vec<TableEntry<'a>>,
    metadata: &'a Map<String, Value>,
}

/// Writes `<table>.csv` for every table and `<command>_manifest.json` into `dir`.
///
/// Nothing time- or host-dependent is recorded, so reruns are byte-identical.
pub fn write_dataset(dataset: &Dataset, config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let hash = config.hash();
    let mut written = Vec::new();
    for table in &dataset.tables {
        let path = dir.join(format!("{}.csv", table.name));
        std::fs::write(&path, table.to_csv(&hash)?)?;
        written.push(path);
    }
    let manifest = Manifest {
        command: &dataset.command,
        version: env!("CARGO_PKG_VERSION"),
        config_hash: hash,
        config,
        tables: dataset
            .tables
            .iter()
            .map(|t| TableEntry { file: format!("{}.csv", t.name), columns: &t.columns, rows: t.rows.len() })
            .collect(),
        metadata: &dataset.metadata,
    };
    let path = dir.join(format!("{}_manifest.json", dataset.command));
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    written.push(path);
    Ok(written)
}
