//! CSV rendering and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::{ExperimentError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const UNITS_NOTE: &str = "time in units of 1/kappa; lambda = Omega/kappa_r";
pub const FLOAT_NOTE: &str = "floats use the shortest decimal that round-trips to the same f64";
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// One output file in long format.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file_name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `#` lines placed after the standard header.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(file_name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            file_name: file_name.into(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Numeric values of one column (non-numeric cells are skipped).
    pub fn numeric_column(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.column_index(name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter_map(|r| match r[i] {
                Cell::Num(v) => Some(v),
                Cell::Int(v) => Some(v as f64),
                Cell::Text(_) => None,
            })
            .collect()
    }

    pub fn render(&self, cfg: &ExperimentConfig, config_hash: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# doublewell-qfi {VERSION}");
        let _ = writeln!(out, "# experiment: {}", cfg.experiment);
        let _ = writeln!(out, "# config_sha256: {config_hash}");
        let _ = writeln!(out, "# units: {UNITS_NOTE}");
        let _ = writeln!(out, "# float format: {FLOAT_NOTE}");
        for note in &self.notes {
            let _ = writeln!(out, "# {note}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(v) => {
                        let _ = write!(out, "{v}");
                    }
                    Cell::Int(v) => {
                        let _ = write!(out, "{v}");
                    }
                    Cell::Text(s) => out.push_str(s),
                }
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct FileRecord {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest<'a> {
    pub software: &'static str,
    pub version: &'static str,
    pub experiment: String,
    pub config: &'a ExperimentConfig,
    pub config_sha256: &'a str,
    pub timestamp_unix: u64,
    pub wall_time_seconds: f64,
    pub files: &'a [FileRecord],
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes every table, then the manifest listing them.
pub fn write_run(
    dir: &Path,
    cfg: &ExperimentConfig,
    tables: &[Table],
    wall_time_seconds: f64,
) -> Result<(Vec<FileRecord>, PathBuf)> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let hash = cfg.content_hash();
    let mut records = Vec::with_capacity(tables.len());
    for table in tables {
        let text = table.render(cfg, &hash);
        let path = dir.join(&table.file_name);
        fs::write(&path, text.as_bytes()).map_err(io_error(&path))?;
        records.push(FileRecord {
            name: table.file_name.clone(),
            bytes: text.len() as u64,
            sha256: sha256_hex(text.as_bytes()),
        });
    }
    let timestamp_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = RunManifest {
        software: "doublewell-qfi",
        version: VERSION,
        experiment: cfg.experiment.to_string(),
        config: cfg,
        config_sha256: &hash,
        timestamp_unix,
        wall_time_seconds,
        files: &records,
    };
    let path = dir.join(MANIFEST_NAME);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(io_error(&path))?;
    Ok((records, path))
}
