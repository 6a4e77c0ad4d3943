//! Experiment reports, rate fits and serialization.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::conditions::ConditionReport;
use crate::error::{Error, Result};

/// How `Q_j f` was evaluated for one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Truncation {
    pub window: Option<i64>,
    pub coefficients: Option<usize>,
    pub spectral_nodes: Option<Vec<usize>>,
    pub series_tail: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub j: i32,
    pub error: Option<f64>,
    pub modulus: Option<f64>,
    pub best_approx: Option<f64>,
    /// `error / modulus`.
    pub ratio: Option<f64>,
    pub besov_tail: Option<f64>,
    pub grid_spacing: Vec<f64>,
    pub path: Option<String>,
    pub truncation: Truncation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub version: String,
    pub operator: String,
    pub function: String,
    pub p: String,
    pub grid_points: Vec<usize>,
    pub box_half_width: f64,
    pub modulus_order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<LevelRow>,
    pub error_fit: Option<RateFit>,
    pub modulus_fit: Option<RateFit>,
    pub ratio_range: Option<RatioRange>,
    pub conditions: Option<ConditionReport>,
    pub provenance: Provenance,
    pub notes: Vec<String>,
}

/// Least-squares slope of `log₂ value` against `j`, with the largest
/// absolute residual.
pub fn rate_fit(levels: &[(f64, f64)]) -> Result<RateFit> {
    if levels.len() < 3 {
        return Err(Error::InvalidParams("rate fit needs at least 3 levels".into()));
    }
    for (i, &(_, v)) in levels.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveValue { index: i, value: v });
        }
    }
    let n = levels.len() as f64;
    let xs: Vec<f64> = levels.iter().map(|l| l.0).collect();
    let ys: Vec<f64> = levels.iter().map(|l| l.1.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParams("rate fit needs distinct levels".into()));
    }
    let slope = sxy / sxx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).abs())
        .fold(0.0, f64::max);
    Ok(RateFit { slope, residual })
}

/// `(min, max)` of `errors[i] / moduli[i]`.
pub fn two_sided_ratio(errors: &[f64], moduli: &[f64]) -> Result<RatioRange> {
    if errors.len() != moduli.len() {
        return Err(Error::DimensionMismatch {
            expected: errors.len(),
            got: moduli.len(),
        });
    }
    if errors.is_empty() {
        return Err(Error::InvalidParams("no levels to compare".into()));
    }
    let mut range = RatioRange {
        min: f64::INFINITY,
        max: 0.0,
    };
    for (i, (&e, &m)) in errors.iter().zip(moduli).enumerate() {
        if !(e > 0.0) {
            return Err(Error::NonPositiveValue { index: i, value: e });
        }
        if !(m > 0.0) {
            return Err(Error::NonPositiveValue { index: i, value: m });
        }
        let r = e / m;
        range.min = range.min.min(r);
        range.max = range.max.max(r);
    }
    Ok(range)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::config("output.format", format!("unknown format `{other}`"))),
        }
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,error,modulus,best_approx,ratio\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.j,
                cell(r.error),
                cell(r.modulus),
                cell(r.best_approx),
                cell(r.ratio)
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

pub fn emit(report: &ExperimentReport, format: Format, path: &Path) -> Result<()> {
    std::fs::write(path, report.render(format))?;
    Ok(())
}
