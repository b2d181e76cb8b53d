//! Evaluation reports: per-(target, scenario, method) agreement cells,
//! pool-level validation scores, serialization to JSON/CSV/markdown, and the
//! sensitivity summary of how much each method loses per disabled modality.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Modality, Target};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const REPORT_FORMAT_VERSION: &str = "mmdes/1";

/// Prediction combination methods the harness can evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "Mean")]
    Mean,
    #[serde(rename = "DS")]
    Ds,
    #[serde(rename = "DW")]
    Dw,
    #[serde(rename = "DWS")]
    Dws,
    #[serde(rename = "Meta-DW")]
    MetaDw,
    #[serde(rename = "Cross-Attention")]
    CrossAttention,
}

impl Method {
    /// The selection-rule family evaluated on every run, in report order.
    pub fn selection_set() -> Vec<Method> {
        vec![
            Method::Mean,
            Method::Ds,
            Method::Dw,
            Method::Dws,
            Method::MetaDw,
        ]
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Method::Mean => "Mean",
            Method::Ds => "DS",
            Method::Dw => "DW",
            Method::Dws => "DWS",
            Method::MetaDw => "Meta-DW",
            Method::CrossAttention => "Cross-Attention",
        };
        write!(f, "{name}")
    }
}

/// Output serialization formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::UnknownFormat(other.into())),
        }
    }
}

/// Mean and sample standard deviation (n - 1); one value yields std 0.
pub fn mean_std<T: Real>(values: &[T]) -> Result<(T, T)> {
    if values.is_empty() {
        return Err(Error::Empty("values".into()));
    }
    let n = T::cast_usize(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    if values.len() == 1 {
        return Ok((mean, T::zero()));
    }
    let var = values
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .sum::<T>()
        / (n - T::one());
    Ok((mean, var.sqrt()))
}

/// One aggregated score: a method on a target under a scenario, across
/// repetitions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportCell<T> {
    pub target: Target,
    /// Stable scenario key, e.g. `none` or `zero_audio`.
    pub scenario: String,
    pub method: Method,
    pub mean_ccc: T,
    pub std_ccc: T,
    /// One agreement score per repetition, in repetition order.
    pub values: Vec<T>,
}

/// Validation-set agreement of one pool regressor, across repetitions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolValidationCell<T> {
    pub target: Target,
    pub group: String,
    pub modality: Modality,
    pub mean_ccc: T,
    pub std_ccc: T,
    pub values: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport<T> {
    pub format_version: String,
    /// The exact configuration the run used.
    pub config: serde_json::Value,
    pub methods: Vec<Method>,
    pub cells: Vec<ReportCell<T>>,
    pub pool_validation: Vec<PoolValidationCell<T>>,
}

impl<T: Real + Serialize + for<'de> Deserialize<'de>> EvaluationReport<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl<T: Real> EvaluationReport<T> {
    pub fn cell(&self, target: Target, scenario: &str, method: Method) -> Option<&ReportCell<T>> {
        self.cells
            .iter()
            .find(|c| c.target == target && c.scenario == scenario && c.method == method)
    }

    pub fn pool_cell(&self, target: Target, group: &str) -> Option<&PoolValidationCell<T>> {
        self.pool_validation
            .iter()
            .find(|c| c.target == target && c.group == group)
    }

    /// Distinct targets in cell order.
    pub fn targets(&self) -> Vec<Target> {
        let mut out = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.target) {
                out.push(c.target);
            }
        }
        out
    }

    /// Distinct scenario keys in cell order.
    pub fn scenarios(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.cells {
            if !out.iter().any(|s| *s == c.scenario) {
                out.push(c.scenario.clone());
            }
        }
        out
    }

    /// Checks version, aggregate consistency, and score sanity.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != REPORT_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "report version `{}`, this build reads `{}`",
                self.format_version, REPORT_FORMAT_VERSION
            )));
        }
        if self.cells.is_empty() {
            return Err(Error::Empty("report cells".into()));
        }
        let tol = T::cast(1e-9);
        let bound = T::one() + tol;
        for cell in &self.cells {
            if !self.methods.contains(&cell.method) {
                return Err(Error::Config(format!(
                    "cell method {} missing from the report's method list",
                    cell.method
                )));
            }
            let (mean, std) = mean_std(&cell.values)?;
            if (mean - cell.mean_ccc).abs() > tol || (std - cell.std_ccc).abs() > tol {
                return Err(Error::Config(format!(
                    "cell ({}, {}, {}): stored aggregate does not match its values",
                    cell.target, cell.scenario, cell.method
                )));
            }
            if cell.values.iter().any(|v| !v.is_finite() || v.abs() > bound) {
                return Err(Error::Config(format!(
                    "cell ({}, {}, {}): agreement outside [-1, 1]",
                    cell.target, cell.scenario, cell.method
                )));
            }
        }
        for cell in &self.pool_validation {
            let (mean, std) = mean_std(&cell.values)?;
            if (mean - cell.mean_ccc).abs() > tol || (std - cell.std_ccc).abs() > tol {
                return Err(Error::Config(format!(
                    "pool cell ({}, {}): stored aggregate does not match its values",
                    cell.target, cell.group
                )));
            }
        }
        Ok(())
    }
}

fn render_csv<T: Real>(report: &EvaluationReport<T>) -> String {
    let mut out = String::from("target,scenario,method,mean_ccc,std_ccc,repetitions\n");
    for c in &report.cells {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.target,
            c.scenario,
            c.method,
            c.mean_ccc,
            c.std_ccc,
            c.values.len()
        ));
    }
    out
}

fn render_markdown<T: Real>(report: &EvaluationReport<T>) -> String {
    let mut out = String::from("# Evaluation report\n");
    let scenarios = report.scenarios();
    for target in report.targets() {
        out.push_str(&format!("\n## {target}\n\n"));
        out.push_str("| Method |");
        for s in &scenarios {
            out.push_str(&format!(" {s} |"));
        }
        out.push('\n');
        out.push_str("|---|");
        for _ in &scenarios {
            out.push_str("---|");
        }
        out.push('\n');
        for &method in &report.methods {
            out.push_str(&format!("| {method} |"));
            for s in &scenarios {
                match report.cell(target, s, method) {
                    Some(c) => {
                        out.push_str(&format!(" {:.4} ± {:.4} |", c.mean_ccc, c.std_ccc))
                    }
                    None => out.push_str(" — |"),
                }
            }
            out.push('\n');
        }
        let pool: Vec<&PoolValidationCell<T>> = report
            .pool_validation
            .iter()
            .filter(|c| c.target == target)
            .collect();
        if !pool.is_empty() {
            out.push_str(&format!("\n### Pool validation ({target})\n\n"));
            out.push_str("| Group | Modality | CCC |\n|---|---|---|\n");
            for c in pool {
                out.push_str(&format!(
                    "| {} | {} | {:.4} ± {:.4} |\n",
                    c.group, c.modality, c.mean_ccc, c.std_ccc
                ));
            }
        }
    }
    out
}

pub fn render_report<T: Real + Serialize + for<'de> Deserialize<'de>>(
    report: &EvaluationReport<T>,
    format: ReportFormat,
) -> Result<String> {
    match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => Ok(render_csv(report)),
        ReportFormat::Markdown => Ok(render_markdown(report)),
    }
}

/// Relative loss of one (target, method) pair under one disabling scenario,
/// against the same pair with all modalities present.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensitivityRow<T> {
    pub target: Target,
    pub scenario: String,
    pub method: Method,
    pub baseline_ccc: T,
    pub scenario_ccc: T,
    /// `(scenario - baseline) / baseline * 100`.
    pub percent_change: T,
}

/// The scenario key that provides the sensitivity baseline.
pub const BASELINE_SCENARIO: &str = "none";

pub fn sensitivity_summary<T: Real>(
    report: &EvaluationReport<T>,
) -> Result<Vec<SensitivityRow<T>>> {
    let hundred = T::cast(100.0);
    let mut rows = Vec::new();
    for cell in &report.cells {
        if cell.scenario == BASELINE_SCENARIO {
            continue;
        }
        let base = report
            .cell(cell.target, BASELINE_SCENARIO, cell.method)
            .ok_or_else(|| {
                Error::Config(format!(
                    "no `{BASELINE_SCENARIO}` baseline for ({}, {})",
                    cell.target, cell.method
                ))
            })?;
        if base.mean_ccc == T::zero() {
            return Err(Error::ZeroVariance(format!(
                "baseline agreement for ({}, {})",
                cell.target, cell.method
            )));
        }
        rows.push(SensitivityRow {
            target: cell.target,
            scenario: cell.scenario.clone(),
            method: cell.method,
            baseline_ccc: base.mean_ccc,
            scenario_ccc: cell.mean_ccc,
            percent_change: (cell.mean_ccc - base.mean_ccc) / base.mean_ccc * hundred,
        });
    }
    Ok(rows)
}

pub fn render_sensitivity<T: Real + Serialize>(
    rows: &[SensitivityRow<T>],
    format: ReportFormat,
) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
        ReportFormat::Csv => {
            let mut out =
                String::from("target,scenario,method,baseline_ccc,scenario_ccc,percent_change\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.target, r.scenario, r.method, r.baseline_ccc, r.scenario_ccc, r.percent_change
                ));
            }
            Ok(out)
        }
        ReportFormat::Markdown => {
            let mut out = String::from(
                "| Target | Scenario | Method | Full | Disabled | Change |\n|---|---|---|---|---|---|\n",
            );
            for r in rows {
                out.push_str(&format!(
                    "| {} | {} | {} | {:.4} | {:.4} | {:+.2}% |\n",
                    r.target, r.scenario, r.method, r.baseline_ccc, r.scenario_ccc, r.percent_change
                ));
            }
            Ok(out)
        }
    }
}
