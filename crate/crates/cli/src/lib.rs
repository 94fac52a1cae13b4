//! Batch driver for the `wlsi` checks: read a JSON configuration, run every
//! configured check on a worker pool, and write `report.json`, one CSV per
//! check and any requested tables.
//!
//! Exit codes: 0 when every check passes, 2 when some check has a violation
//! (or a missed target), 1 on any error. Errors take precedence.

pub mod config;
pub mod error;
pub mod run;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use wlsi::funcineq::InequalityReport;
use wlsi::measure::{discretize, normalize, PotentialMeasure};
use wlsi::transport::build_map;

pub use config::{parse_config, RunConfig};
pub use error::{CliError, ConfigError};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: PathBuf,
    pub seed: u64,
    pub out: PathBuf,
    /// Worker threads; `None` uses every core.
    pub jobs: Option<usize>,
    /// Count skipped (degenerate) members as failures.
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Violation,
    Error,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub status: Status,
    #[serde(rename = "C_est")]
    pub c_est: Option<f64>,
    pub c_target: Option<f64>,
    pub max_ratio: Option<f64>,
    pub argmax: Option<String>,
    pub n_members: usize,
    pub n_skipped: usize,
    pub n_violations: usize,
    pub wallclock_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableSummary {
    pub file: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub config: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ConfigError>,
    pub checks: Vec<CheckSummary>,
    pub tables: Vec<TableSummary>,
    pub timestamp: String,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        let statuses = self.checks.iter().map(|c| c.status).chain(self.tables.iter().map(|t| t.status));
        let mut code = EXIT_PASS;
        if self.error.is_some() {
            return EXIT_ERROR;
        }
        for s in statuses {
            match s {
                Status::Error => return EXIT_ERROR,
                Status::Violation => code = EXIT_VIOLATION,
                Status::Pass | Status::Skipped => {}
            }
        }
        code
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn summarize(id: &str, kind: &str, rep: &InequalityReport, strict: bool) -> CheckSummary {
    let n = rep.n_members();
    let status = if rep.violations > 0 || (strict && rep.skipped > 0) {
        Status::Violation
    } else if n == rep.skipped {
        Status::Skipped
    } else {
        Status::Pass
    };
    CheckSummary {
        id: id.to_string(),
        kind: kind.to_string(),
        status,
        c_est: finite(rep.c_est),
        c_target: rep.target,
        max_ratio: finite(rep.max_ratio),
        argmax: rep.argmax.clone(),
        n_members: n,
        n_skipped: rep.skipped,
        n_violations: rep.violations,
        wallclock_ms: 0,
        csv: None,
        error: None,
        details: None,
    }
}

fn failed(id: &str, kind: &str, message: String) -> CheckSummary {
    CheckSummary {
        id: id.to_string(),
        kind: kind.to_string(),
        status: Status::Error,
        c_est: None,
        c_target: None,
        max_ratio: None,
        argmax: None,
        n_members: 0,
        n_skipped: 0,
        n_violations: 0,
        wallclock_ms: 0,
        csv: None,
        error: Some(message),
        details: None,
    }
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write { path: path.display().to_string(), source }
}

/// Evenly spaced table abscissae: `[-r_max, r_max]` on the line (starting at
/// the left endpoint when finite), `(0, r_max]` for radii.
fn table_points(mu: &PotentialMeasure, n: usize, r_max: f64) -> Vec<f64> {
    let (lo, hi) = if mu.is_radial() {
        (r_max / n as f64, r_max)
    } else {
        let left = mu.left_endpoint();
        (if left.is_finite() { left } else { -r_max }, if left.is_finite() { left + r_max } else { r_max })
    };
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn write_table(mu: &PotentialMeasure, cfg: &RunConfig, t: &config::TableConfig, out: &Path) -> Result<(), String> {
    let path = out.join(t.file());
    let xs = table_points(mu, cfg.grid.n, cfg.grid.r_max);
    let file = create(&path).map_err(|e| e.to_string())?;
    let io = |e: std::io::Error| format!("cannot write {}: {e}", path.display());
    match t {
        config::TableConfig::Weight { weight, .. } => {
            let w = run::build_weight(mu, weight).map_err(|e| e.to_string())?;
            w.write_csv(file, &xs).map_err(io)
        }
        config::TableConfig::Map { .. } => {
            let m = build_map(mu).map_err(|e| e.to_string())?;
            m.write_csv(file, &xs).map_err(io)
        }
        config::TableConfig::Grid { scheme, .. } => {
            let g = discretize(mu, cfg.grid.n, *scheme).map_err(|e| e.to_string())?;
            g.write_csv(file).map_err(io)
        }
    }
}

fn run_all(cfg: &RunConfig, mu: &PotentialMeasure, opts: &RunOptions) -> Vec<CheckSummary> {
    cfg.checks
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let kind = c.kind.type_name();
            let start = Instant::now();
            let seed = opts.seed.wrapping_add(i as u64);
            let mut s = match run::run_check(mu, &cfg.grid, &c.kind, seed) {
                Ok((rep, details)) => {
                    let mut s = summarize(&c.id, kind, &rep, opts.strict);
                    s.details = details;
                    if cfg.output.csv {
                        let file = format!("{}.csv", c.id);
                        let path = opts.out.join(&file);
                        match create(&path).and_then(|f| rep.write_csv(f).map_err(write_err(&path))) {
                            Ok(()) => s.csv = Some(file),
                            Err(e) => {
                                s.status = Status::Error;
                                s.error = Some(e.to_string());
                            }
                        }
                    }
                    s
                }
                Err(e) => failed(&c.id, kind, format!("check `{}`: {e}", c.id)),
            };
            s.wallclock_ms = start.elapsed().as_millis() as u64;
            s
        })
        .collect()
}

/// Execute a run and write its artifacts. The returned report is also on
/// disk as `report.json`; an `Err` means not even that could be written.
pub fn execute(opts: &RunOptions) -> Result<RunReport, CliError> {
    let bytes = fs::read(&opts.config).map_err(|source| CliError::Read { path: opts.config.display().to_string(), source })?;
    fs::create_dir_all(&opts.out).map_err(write_err(&opts.out))?;
    let text = String::from_utf8_lossy(&bytes);
    let mut report = RunReport {
        version: env!("CARGO_PKG_VERSION"),
        config_hash: hex::encode(Sha256::digest(&bytes)),
        seed: opts.seed,
        config: serde_json::from_str(&text).unwrap_or(Value::Null),
        error: None,
        checks: Vec::new(),
        tables: Vec::new(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };

    match parse_config(&text) {
        Err(e) => report.error = Some(e),
        Ok(cfg) => match cfg.validate() {
            Err(e) => {
                report.checks = not_run(&cfg, &format!("not run: {e}"));
                report.error = Some(e);
            }
            Ok(spec) => match normalize(&spec) {
                Err(e) => report.checks = not_run(&cfg, &format!("measure: {e}")),
                Ok(mu) => {
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(opts.jobs.unwrap_or(0))
                        .build()
                        .map_err(|e| CliError::Pool(e.to_string()))?;
                    report.checks = pool.install(|| run_all(&cfg, &mu, opts));
                    report.tables = cfg
                        .output
                        .tables
                        .iter()
                        .map(|t| match write_table(&mu, &cfg, t, &opts.out) {
                            Ok(()) => TableSummary { file: t.file().to_string(), status: Status::Pass, error: None },
                            Err(e) => TableSummary { file: t.file().to_string(), status: Status::Error, error: Some(e) },
                        })
                        .collect();
                }
            },
        },
    }

    let path = opts.out.join("report.json");
    let mut out = create(&path)?;
    serde_json::to_writer_pretty(&mut out, &report).map_err(|e| CliError::Write { path: path.display().to_string(), source: e.into() })?;
    writeln!(out).map_err(write_err(&path))?;
    Ok(report)
}

fn not_run(cfg: &RunConfig, message: &str) -> Vec<CheckSummary> {
    cfg.checks.iter().map(|c| failed(&c.id, c.kind.type_name(), message.to_string())).collect()
}
