//! CSV tables and their JSON metadata sidecars.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::engine::{Diagnostics, Table};
use crate::error::{CliError, Result};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Bumped whenever the CSV columns or the sidecar layout change.
pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let wrap = |source| CliError::Csv {
        path: path.to_owned(),
        source,
    };
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record(&table.columns).map_err(wrap)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| format_float(*x)))
            .map_err(wrap)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let wrap = |source| CliError::Csv {
        path: path.to_owned(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    let columns: Vec<String> = r
        .headers()
        .map_err(wrap)?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(wrap)?;
        let row = rec
            .iter()
            .map(|f| {
                f.trim().parse::<f64>().map_err(|e| {
                    CliError::config(format!("{}: bad number {f:?}: {e}", path.display()))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.to_owned(),
                source,
            })
        }
        _ => Ok(()),
    }
}

/// Sidecar path: same basename, `.json` extension.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata<'a> {
    pub schema_version: u32,
    pub code_version: &'a str,
    pub engine: &'a str,
    pub omega0_over_omega: f64,
    pub delta_over_omega: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    pub columns: &'a [String],
    pub diagnostics: &'a Diagnostics,
    /// Config keys whose values were picked by a preset rather than given.
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    pub chosen: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<&'a str>,
    pub config: &'a RunConfig,
}

impl<'a> Metadata<'a> {
    pub fn new(config: &'a RunConfig, table: &'a Table, diagnostics: &'a Diagnostics) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            code_version: CODE_VERSION,
            engine: config.engine.name(),
            omega0_over_omega: config.omega0(),
            delta_over_omega: config.delta(),
            master_seed: matches!(config.engine, crate::config::Engine::Mcwf)
                .then_some(config.master_seed),
            columns: &table.columns,
            diagnostics,
            chosen: &[],
            description: None,
            config,
        }
    }
}

pub fn write_metadata(csv: &Path, meta: &Metadata) -> Result<PathBuf> {
    let path = sidecar_path(csv);
    ensure_parent(&path)?;
    let mut text = serde_json::to_string_pretty(meta).map_err(|source| CliError::Json {
        path: path.clone(),
        source,
    })?;
    text.push('\n');
    fs::write(&path, text).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0, f64::NAN] {
            let back: f64 = format_float(x).parse().unwrap();
            assert!(back.to_bits() == x.to_bits() || (x.is_nan() && back.is_nan()));
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/run.csv");
        let t = Table {
            columns: vec!["tau".into(), "x".into()],
            rows: vec![vec![0.0, 1.0 / 7.0], vec![0.5, f64::NAN]],
        };
        write_csv(&path, &t).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.rows[0], t.rows[0]);
        assert!(back.rows[1][1].is_nan());
        assert_eq!(sidecar_path(&path), dir.path().join("sub/run.json"));
    }
}
