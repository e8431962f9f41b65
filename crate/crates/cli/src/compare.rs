//! Column comparisons between two CSV runs.

use clap::ValueEnum;
use serde::Serialize;

use crate::engine::Table;
use crate::error::{CliError, Result};

/// Two grid points closer than this are the same time.
pub const GRID_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `max_τ |a(τ) − b(τ)|` over the common grid.
    MaxAbs,
    /// `|a(τ*) − b(τ*)| / |a(τ*)|`.
    RelAtTau,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::MaxAbs => "max_abs",
            Metric::RelAtTau => "rel_at_tau",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub column: String,
    pub metric: Metric,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub value: f64,
}

fn series(table: &Table, column: &str, which: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let tau = table
        .column("tau")
        .ok_or_else(|| CliError::config(format!("{which} has no tau column")))?;
    let values = table
        .column(column)
        .ok_or_else(|| CliError::config(format!("{which} has no column {column:?}")))?;
    Ok((tau, values))
}

/// Linear interpolation on a strictly increasing grid; `None` outside it.
pub fn interpolate(grid: &[f64], values: &[f64], t: f64) -> Option<f64> {
    let first = *grid.first()?;
    let last = *grid.last()?;
    if t < first - GRID_TOLERANCE || t > last + GRID_TOLERANCE {
        return None;
    }
    let k = grid.partition_point(|&x| x < t);
    if k < grid.len() && (grid[k] - t).abs() <= GRID_TOLERANCE {
        return Some(values[k]);
    }
    if k > 0 && (grid[k - 1] - t).abs() <= GRID_TOLERANCE {
        return Some(values[k - 1]);
    }
    if k == 0 || k == grid.len() {
        return None;
    }
    let (t0, t1) = (grid[k - 1], grid[k]);
    let w = (t - t0) / (t1 - t0);
    Some(values[k - 1] * (1.0 - w) + values[k] * w)
}

fn exact_at(grid: &[f64], values: &[f64], t: f64) -> Option<f64> {
    grid.iter()
        .position(|&x| (x - t).abs() <= GRID_TOLERANCE)
        .map(|k| values[k])
}

fn sample(grid: &[f64], values: &[f64], t: f64, interp: bool, which: &str) -> Result<f64> {
    let v = if interp {
        interpolate(grid, values, t)
    } else {
        exact_at(grid, values, t)
    };
    v.ok_or_else(|| {
        CliError::config(format!(
            "tau = {t} is not on the grid of {which}{}",
            if interp {
                ""
            } else {
                " (pass --interpolate to interpolate)"
            }
        ))
    })
}

/// Compares `column` of `a` (the reference) against `b`.
///
/// Without `interp`, both files must share the same tau grid for
/// [`Metric::MaxAbs`] and contain `tau` exactly for [`Metric::RelAtTau`].
/// With it, `b` is linearly interpolated onto the times of `a` inside the
/// overlap of the two grids.
pub fn compare(
    a: &Table,
    b: &Table,
    column: &str,
    metric: Metric,
    tau: Option<f64>,
    interp: bool,
) -> Result<Report> {
    let (ta, va) = series(a, column, "first file")?;
    let (tb, vb) = series(b, column, "second file")?;
    let value = match metric {
        Metric::MaxAbs => {
            let mut worst: f64 = 0.0;
            if interp {
                for (t, x) in ta.iter().zip(&va) {
                    if let Some(y) = interpolate(&tb, &vb, *t) {
                        worst = worst.max((x - y).abs());
                    }
                }
            } else {
                let aligned = ta.len() == tb.len()
                    && ta
                        .iter()
                        .zip(&tb)
                        .all(|(x, y)| (x - y).abs() <= GRID_TOLERANCE);
                if !aligned {
                    return Err(CliError::config(
                        "tau grids differ (pass --interpolate to interpolate)",
                    ));
                }
                for (x, y) in va.iter().zip(&vb) {
                    worst = worst.max((x - y).abs());
                }
            }
            worst
        }
        Metric::RelAtTau => {
            let t = tau.ok_or_else(|| CliError::config("rel_at_tau needs --tau"))?;
            let x = sample(&ta, &va, t, interp, "first file")?;
            let y = sample(&tb, &vb, t, interp, "second file")?;
            (x - y).abs() / x.abs()
        }
    };
    Ok(Report {
        column: column.to_owned(),
        metric,
        tau: if metric == Metric::RelAtTau {
            tau
        } else {
            None
        },
        value,
    })
}
