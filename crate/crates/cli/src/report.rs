//! Experiment reports and their on-disk artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use inflap_core::{Field64, LevelReport, SolveReport};
use serde::Serialize;
use serde_json::Value;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    ConfigError,
    NumericalError,
}

/// One acceptance rule applied to one measured value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub rule: String,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            rule: format!("<= {bound:e}"),
            pass: value <= bound,
        }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            rule: format!(">= {bound:e}"),
            pass: value >= bound,
        }
    }

    pub fn above(name: &str, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            rule: format!("> {bound:e}"),
            pass: value > bound,
        }
    }

    pub fn within(name: &str, value: f64, target: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            rule: format!("|value - {target:e}| <= {tol:e}"),
            pass: (value - target).abs() <= tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSummary {
    pub epsilon: f64,
    pub sweeps: usize,
    pub final_change: f64,
    pub converged: bool,
    pub relaxation: f64,
}

impl From<&LevelReport> for LevelSummary {
    fn from(l: &LevelReport) -> Self {
        LevelSummary {
            epsilon: l.epsilon,
            sweeps: l.sweeps,
            final_change: l.final_change,
            converged: l.converged,
            relaxation: l.relaxation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveSummary {
    pub presolve_sweeps: usize,
    pub total_sweeps: usize,
    pub levels: Vec<LevelSummary>,
    pub final_residual: f64,
    pub residual_tolerance: f64,
    pub converged: bool,
    pub monotonicity_violations: usize,
    pub ladder_certificate: Option<f64>,
}

impl From<&SolveReport> for SolveSummary {
    fn from(r: &SolveReport) -> Self {
        SolveSummary {
            presolve_sweeps: r.presolve_sweeps,
            total_sweeps: r.total_sweeps(),
            levels: r.levels.iter().map(LevelSummary::from).collect(),
            final_residual: r.final_residual,
            residual_tolerance: r.residual_tolerance,
            converged: r.converged,
            monotonicity_violations: r.monotonicity_violations,
            ladder_certificate: r.ladder_certificate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scheme {
    pub dimension: usize,
    pub spacing: f64,
    pub epsilon_ladder: Vec<f64>,
    pub sweep_tol: f64,
    pub relaxation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constants {
    pub beta: f64,
    pub tau: f64,
    pub gradient_exponent: f64,
}

/// JSON report of a single run. Everything except `wall_clock_seconds` is a function of the
/// config alone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub experiment: Experiment,
    pub status: Status,
    pub pass: bool,
    pub config: ExperimentConfig,
    pub scheme: Scheme,
    pub constants: Option<Constants>,
    #[serde(flatten)]
    pub measurements: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub solves: BTreeMap<String, SolveSummary>,
    pub error: Option<String>,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn new(config: &ExperimentConfig) -> Self {
        let solver = config.solver_config().ok();
        Report {
            experiment: config.experiment,
            status: Status::Pass,
            pass: true,
            config: config.clone(),
            scheme: Scheme {
                dimension: config.geometry.dimension,
                spacing: config.geometry.spacing,
                epsilon_ladder: config.epsilon_ladder(),
                sweep_tol: solver.as_ref().map_or(f64::NAN, |s| s.sweep_tol),
                relaxation: solver.as_ref().map_or(f64::NAN, |s| s.relaxation),
            },
            constants: config.absorption().ok().map(|p| Constants {
                beta: p.beta(),
                tau: p.tau(),
                gradient_exponent: p.gradient_exponent(),
            }),
            measurements: BTreeMap::new(),
            checks: Vec::new(),
            solves: BTreeMap::new(),
            error: None,
            wall_clock_seconds: 0.0,
        }
    }

    pub fn measure(&mut self, name: &str, value: impl Into<Value>) {
        self.measurements.insert(name.into(), value.into());
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn solve(&mut self, name: &str, report: &SolveReport) {
        self.solves.insert(name.into(), report.into());
    }

    /// Sets `pass` and `status` from the checks.
    pub fn finish(&mut self) {
        self.pass = self.checks.iter().all(|c| c.pass);
        self.status = if self.pass {
            Status::Pass
        } else {
            Status::Fail
        };
    }

    /// Report JSON with the wall-clock field zeroed, for reproducibility comparisons.
    pub fn deterministic_json(&self) -> String {
        let mut copy = self.clone();
        copy.wall_clock_seconds = 0.0;
        to_json(&copy)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// A numeric table written as `fit_<name>.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(e.to_string()))?;
    w.write_record(header)
        .map_err(|e| CliError::Io(e.to_string()))?;
    for row in rows {
        w.write_record(row)
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn write_numeric(path: &Path, table: &Table) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| r.iter().map(|&x| fmt_float(x)).collect())
        .collect();
    write_table(path, &table.header, &rows)
}

/// Flat field dump with columns `x1[,x2],u`.
pub fn field_table(field: &Field64) -> Table {
    let grid = field.grid();
    let header: &[&str] = if grid.dimension() == 1 {
        &["x1", "u"]
    } else {
        &["x1", "x2", "u"]
    };
    let mut t = Table::new("field", header);
    for (k, x) in grid.points().iter().enumerate() {
        let mut row = vec![x[0]];
        if grid.dimension() == 2 {
            row.push(x[1]);
        }
        row.push(field.get(k));
        t.push(row);
    }
    t
}

/// Writes `report.json`, `summary.csv` (one row per check), `field.csv` and `fit_<name>.csv`.
pub fn write_artifacts(
    dir: &Path,
    report: &Report,
    field: Option<&Field64>,
    tables: &[Table],
) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), to_json(report))?;
    let header: Vec<String> = ["check", "value", "rule", "pass"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                fmt_float(c.value),
                c.rule.clone(),
                c.pass.to_string(),
            ]
        })
        .collect();
    write_table(&dir.join("summary.csv"), &header, &rows)?;
    if let Some(f) = field {
        write_numeric(&dir.join("field.csv"), &field_table(f))?;
    }
    for t in tables {
        write_numeric(&dir.join(format!("fit_{}.csv", t.name)), t)?;
    }
    Ok(())
}
