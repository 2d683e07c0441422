//! CSV tables and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentSpec;
use crate::error::{CliError, Result};

/// A CSV table held in memory until the run is complete.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Shortest round-trip decimal, switching to scientific notation for very
/// small or very large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Record of one run, written next to its tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub code_version: String,
    pub master_seed: u64,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    /// Truncation residuals, quadrature errors and confidence half-widths.
    pub diagnostics: BTreeMap<String, f64>,
    /// The spec with every default filled in.
    pub spec: ExperimentSpec,
}

impl Manifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest fields are all representable in TOML")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Creates the output directory and fails early if it cannot be written.
pub fn prepare_output(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    let probe = dir.join(".write-test");
    write_file(&probe, b"")?;
    let _ = std::fs::remove_file(probe);
    Ok(())
}

/// Writes the tables and the manifest; returns the paths written.
pub fn write_all(dir: &Path, tables: &[Table], manifest: &Manifest) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for t in tables {
        let path = dir.join(t.file_name());
        write_file(&path, &t.to_csv())?;
        written.push(path);
    }
    let path = dir.join("manifest.toml");
    write_file(&path, manifest.to_toml().as_bytes())?;
    written.push(path);
    Ok(written)
}
