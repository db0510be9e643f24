//! Command implementations behind the `bellframe` binary: the JSON config
//! schema, CSV rendering and the exit-code contract.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::harness::{self, ExperimentConfig, ExperimentReport, HarnessError, RunOptions, SuiteOptions, SuiteReport};
use crate::kinematics::{ExperimentGeometry, KinematicsError, DEFAULT_EPSILON};
use crate::models::{ModelId, Setting};
use crate::statistics;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_KINEMATICS: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// Environment variable capping the number of worker threads.
pub const WORKERS_ENV: &str = "BELLFRAME_WORKERS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("kinematics error: {0}")]
    Kinematics(KinematicsError),
    #[error("suite verdicts inconclusive at {trials} trials per pair; increase --trials")]
    Inconclusive { trials: u64 },
    #[error("suite verdicts do not match the expected pattern")]
    Mismatch,
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Harness(HarnessError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Kinematics(_) => EXIT_KINEMATICS,
            CliError::Inconclusive { .. } => EXIT_INCONCLUSIVE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Mismatch | CliError::Harness(_) => EXIT_MISMATCH,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Kinematics(k) => CliError::Kinematics(k),
            HarnessError::InvalidConfig { field, reason } => CliError::Config(format!("{field}: {reason}")),
            other => CliError::Harness(other),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryFile {
    pub source_z: f64,
    pub alice_z: f64,
    pub bob_z: f64,
    pub alice_beta: f64,
    pub bob_beta: f64,
    pub emission_t: f64,
}

/// On-disk experiment config (JSON).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub geometry: GeometryFile,
    pub model: String,
    pub alice_settings: Vec<f64>,
    pub bob_settings: Vec<f64>,
    pub trials_per_pair: u64,
    pub seed: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn config_err(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{key}`: {reason}"))
}

fn settings_pair(key: &str, angles: &[f64]) -> Result<[Setting; 2], CliError> {
    if angles.len() != 2 {
        return Err(config_err(key, format!("expected 2 angles, got {}", angles.len())));
    }
    let s = |i: usize| Setting::new(angles[i]).map_err(|e| config_err(&format!("{key}[{i}]"), e));
    Ok([s(0)?, s(1)?])
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Validates every field and builds the harness config.
    pub fn into_experiment(self) -> Result<ExperimentConfig, CliError> {
        let g = &self.geometry;
        for (key, v) in [
            ("geometry.source_z", g.source_z),
            ("geometry.alice_z", g.alice_z),
            ("geometry.bob_z", g.bob_z),
            ("geometry.alice_beta", g.alice_beta),
            ("geometry.bob_beta", g.bob_beta),
            ("geometry.emission_t", g.emission_t),
            ("epsilon", self.epsilon),
        ] {
            if !v.is_finite() {
                return Err(config_err(key, "must be finite"));
            }
        }
        let geometry = ExperimentGeometry {
            source_z: g.source_z,
            alice_z: g.alice_z,
            bob_z: g.bob_z,
            alice_beta: g.alice_beta,
            bob_beta: g.bob_beta,
            emission_t: g.emission_t,
        };
        geometry.validate().map_err(|e| match &e {
            KinematicsError::Superluminal { field, .. } | KinematicsError::InvalidGeometry { field, .. } => {
                config_err(&format!("geometry.{field}"), e)
            }
            _ => config_err("geometry", e),
        })?;
        let model = self.model.parse::<ModelId>().map_err(|e| config_err("model", e))?;
        if self.trials_per_pair == 0 {
            return Err(config_err("trials_per_pair", "must be at least 1"));
        }
        if self.epsilon <= 0.0 {
            return Err(config_err("epsilon", "must be positive"));
        }
        let cfg = ExperimentConfig {
            geometry,
            model,
            alice_settings: settings_pair("alice_settings", &self.alice_settings)?,
            bob_settings: settings_pair("bob_settings", &self.bob_settings)?,
            trials_per_pair: self.trials_per_pair,
            seed: self.seed,
            epsilon: self.epsilon,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub const RUN_HEADER: &str = "pair,a_rad,b_rad,n,n_pp,n_pm,n_mp,n_mm,e_hat,stderr";
pub const SUITE_HEADER: &str = "model,fig1_S,fig1_verdict,fig2_S,fig2_verdict";

/// Per-pair CSV rows plus the `S` and `timing` footer lines.
pub fn render_run_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(RUN_HEADER);
    out.push('\n');
    for p in &report.pairs {
        let c = &p.counts;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            p.label,
            c.a.radians(),
            c.b.radians(),
            p.estimate.n,
            c.n_pp,
            c.n_pm,
            c.n_mp,
            c.n_mm,
            p.estimate.e_hat,
            p.estimate.stderr
        );
    }
    let _ = writeln!(out, "S,{},{}", report.chsh.s, report.chsh.stderr);
    let _ = writeln!(out, "timing,{}", report.timing_class);
    out
}

pub fn render_suite_csv(report: &SuiteReport) -> String {
    let mut out = String::new();
    out.push_str(SUITE_HEADER);
    out.push('\n');
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.model, row.standard.s, row.standard.verdict, row.before_before.s, row.before_before.verdict
        );
    }
    let [std, bb] = report.observed_experiment;
    let _ = writeln!(out, "experiment,{std},{bb}");
    out
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn write_all(mut file: File, path: &Path, text: &str) -> Result<(), CliError> {
    file.write_all(text.as_bytes())
        .and_then(|_| file.flush())
        .map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// Runs one configured experiment and writes its CSV to `out`.
pub fn cmd_run(config: &Path, out: &Path, opts: RunOptions) -> Result<ExperimentReport, CliError> {
    let cfg = ConfigFile::load(config)?.into_experiment()?;
    let report = harness::run_experiment_with(&cfg, opts)?;
    let file = create(out)?;
    write_all(file, out, &render_run_csv(&report))?;
    Ok(report)
}

/// Runs the discrimination suite and writes the verdict matrix to `out`.
///
/// The CSV is written whatever the verdicts are; the error reports whether
/// the matrix was inconclusive or off-pattern.
pub fn cmd_suite(trials: u64, seed: u64, out: &Path, opts: RunOptions) -> Result<SuiteReport, CliError> {
    if trials == 0 {
        return Err(config_err("trials", "must be at least 1"));
    }
    // fail on an unwritable path before spending time on the runs
    let file = create(out)?;
    let report = harness::run_discrimination_suite_with(trials, seed, SuiteOptions { swap_parties: false, run: opts })?;
    write_all(file, out, &render_suite_csv(&report))?;
    if report.has_inconclusive() {
        return Err(CliError::Inconclusive { trials });
    }
    if !report.matches_expected() {
        return Err(CliError::Mismatch);
    }
    Ok(report)
}

pub fn cmd_bound() -> String {
    let (a, b) = harness::chsh_settings();
    format!("local_bound,{}\n", statistics::local_bound_bruteforce(a[0], a[1], b[0], b[1]))
}

/// Worker cap from [`WORKERS_ENV`], ignoring unparsable or zero values.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}
