//! Experiment runner for the `inflap-core` toolkit: JSON config in, JSON report and CSV tables
//! out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use inflap_core::AbsorptionParams64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{Experiment, ExperimentConfig};
pub use error::{CliError, ExitStatus};
pub use experiments::{execute, solve_dead_core, DeadCoreSolve, Outcome};
pub use report::{Check, Report, Status};

/// Output directory used when neither `--out` nor `output_dir` is given.
pub const DEFAULT_OUT: &str = "inflap-out";

#[derive(Clone, Debug)]
pub struct RunResult {
    pub report: Report,
    pub status: ExitStatus,
}

/// Runs a validated config and writes its artifacts into `dir`.
///
/// Numerical failures still produce a `report.json` carrying the error and any partial solve.
pub fn run_config(cfg: &ExperimentConfig, dir: &Path) -> Result<RunResult, CliError> {
    let start = Instant::now();
    match execute(cfg) {
        Ok(mut out) => {
            out.report.wall_clock_seconds = start.elapsed().as_secs_f64();
            report::write_artifacts(dir, &out.report, out.field.as_ref(), &out.tables)?;
            let status = if out.report.pass {
                ExitStatus::Pass
            } else {
                ExitStatus::AcceptanceFail
            };
            Ok(RunResult {
                report: out.report,
                status,
            })
        }
        Err(err) => {
            let mut rep = Report::new(cfg);
            rep.pass = false;
            rep.error = Some(err.to_string());
            rep.status = match err.exit_status() {
                ExitStatus::ConfigError => Status::ConfigError,
                _ => Status::NumericalError,
            };
            if let CliError::Numerical {
                partial: Some(p), ..
            } = &err
            {
                rep.solve("partial", p);
            }
            rep.wall_clock_seconds = start.elapsed().as_secs_f64();
            report::write_artifacts(dir, &rep, None, &[])?;
            Ok(RunResult {
                status: err.exit_status(),
                report: rep,
            })
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn out_dir(cli: Option<&Path>, cfg: &ExperimentConfig) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

/// `inflap run`: parses, validates and runs one config file.
pub fn run_file(path: &Path, out: Option<&Path>) -> Result<(RunResult, PathBuf), CliError> {
    let cfg = ExperimentConfig::from_json(&read(path)?)?;
    let dir = out_dir(out, &cfg);
    Ok((run_config(&cfg, &dir)?, dir))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamPoint {
    pub alpha: f64,
    pub m: f64,
}

/// Parameter grid for `inflap sweep`: `{"params": [{"alpha": .., "m": ..}, ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub params: Vec<ParamPoint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub point: ParamPoint,
    pub status: Status,
    pub slope: Option<f64>,
    pub beta: Option<f64>,
    pub pass: bool,
    pub directory: String,
    pub error: Option<String>,
}

impl SweepRow {
    /// `invalid` for inadmissible tuples, otherwise the run status.
    pub fn status_label(&self) -> &'static str {
        match self.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::ConfigError => "invalid",
            Status::NumericalError => "numerical_error",
        }
    }

    pub fn abs_error(&self) -> Option<f64> {
        Some((self.slope? - self.beta?).abs())
    }
}

pub fn run_dir_name(p: &ParamPoint) -> String {
    format!("alpha={}_m={}", p.alpha, p.m)
}

fn sweep_one(template: &ExperimentConfig, point: ParamPoint, dir: &Path) -> SweepRow {
    let name = run_dir_name(&point);
    let mut cfg = template.clone();
    cfg.params.alpha = point.alpha;
    cfg.params.m = point.m;
    cfg.output_dir = None;
    let beta = AbsorptionParams64::new(point.alpha, point.m)
        .ok()
        .map(|p| p.beta());
    let row = |status, pass, slope, error| SweepRow {
        point,
        status,
        slope,
        beta,
        pass,
        directory: name.clone(),
        error,
    };
    if let Err(e) = cfg.validate() {
        return row(Status::ConfigError, false, None, Some(e.to_string()));
    }
    match run_config(&cfg, &dir.join(&name)) {
        Ok(res) => {
            let slope = res
                .report
                .measurements
                .get("slope")
                .and_then(|v| v.as_f64());
            row(res.report.status, res.report.pass, slope, res.report.error)
        }
        Err(e) => row(Status::NumericalError, false, None, Some(e.to_string())),
    }
}

/// Runs the template once per grid point (concurrently) and writes `summary.csv` in grid order.
pub fn sweep(
    template: &ExperimentConfig,
    grid: &SweepGrid,
    dir: &Path,
) -> Result<(Vec<SweepRow>, ExitStatus), CliError> {
    fs::create_dir_all(dir)?;
    let rows: Vec<SweepRow> = grid
        .params
        .par_iter()
        .map(|&p| sweep_one(template, p, dir))
        .collect();
    let header: Vec<String> = [
        "alpha",
        "m",
        "status",
        "slope",
        "beta",
        "abs_error",
        "pass",
        "directory",
        "error",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let opt = |x: Option<f64>| x.map(report::fmt_float).unwrap_or_default();
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                report::fmt_float(r.point.alpha),
                report::fmt_float(r.point.m),
                r.status_label().to_string(),
                opt(r.slope),
                opt(r.beta),
                opt(r.abs_error()),
                r.pass.to_string(),
                r.directory.clone(),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    report::write_table(&dir.join("summary.csv"), &header, &records)?;
    let status = if rows.iter().any(|r| r.status == Status::ConfigError) {
        ExitStatus::ConfigError
    } else if rows.iter().any(|r| r.status == Status::NumericalError) {
        ExitStatus::NumericalError
    } else if rows.iter().any(|r| !r.pass) {
        ExitStatus::AcceptanceFail
    } else {
        ExitStatus::Pass
    };
    Ok((rows, status))
}

/// `inflap sweep`: the template's own `params` are replaced by each grid point.
pub fn sweep_files(
    template: &Path,
    grid: &Path,
    out: Option<&Path>,
) -> Result<(Vec<SweepRow>, ExitStatus, PathBuf), CliError> {
    let tpl: ExperimentConfig = serde_json::from_str(&read(template)?)
        .map_err(|e| CliError::config("malformed template", e))?;
    let grid: SweepGrid =
        serde_json::from_str(&read(grid)?).map_err(|e| CliError::config("malformed grid", e))?;
    let dir = out_dir(out, &tpl);
    let (rows, status) = sweep(&tpl, &grid, &dir)?;
    Ok((rows, status, dir))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsOut {
    pub alpha: f64,
    pub m: f64,
    pub beta: f64,
    pub tau: f64,
    pub gradient_exponent: f64,
}

/// `inflap print-constants`.
pub fn constants(alpha: f64, m: f64) -> Result<ConstantsOut, CliError> {
    let p = AbsorptionParams64::new(alpha, m).map_err(|e| CliError::config("params", e))?;
    Ok(ConstantsOut {
        alpha,
        m,
        beta: p.beta(),
        tau: p.tau(),
        gradient_exponent: p.gradient_exponent(),
    })
}
