//! Experiment configuration read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::contopt::SolverConfig;
use crate::error::{Error, Result};
use crate::gauge_cd::{DriveConfig, Sampling};
use crate::lmg::QslCriterion;
use crate::problem::{ControlProblem, InitialState, ProblemOptions};
use crate::rl_policy::TrainConfig;
use crate::spin_ops::{ModelKind, ModelSpec};
use crate::symmetry::SymmetrySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cdqaoa,
    Qaoa,
    CdDrive,
    Adiabatic,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Cdqaoa, Method::Qaoa, Method::CdDrive, Method::Adiabatic];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cdqaoa => "cdqaoa",
            Method::Qaoa => "qaoa",
            Method::CdDrive => "cd_drive",
            Method::Adiabatic => "adiabatic",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveSettings {
    pub dt: f64,
    pub beta_dt: Option<f64>,
    pub sampling: Sampling,
    /// Gauge-potential ansatz; defaults depend on the model.
    pub ansatz: Option<Vec<String>>,
}

impl Default for DriveSettings {
    fn default() -> Self {
        let d = DriveConfig::default();
        Self { dt: d.dt, beta_dt: d.beta_dt, sampling: d.sampling, ansatz: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LmgSettings {
    pub fields: Vec<f64>,
    pub durations: Vec<f64>,
    pub criterion: QslCriterion,
    pub candidates: Option<Vec<Vec<String>>>,
}

impl Default for LmgSettings {
    fn default() -> Self {
        Self { fields: vec![0.0, 0.1, 0.2, 0.3], durations: Vec::new(), criterion: QslCriterion::default(), candidates: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferSettings {
    pub sizes: Vec<usize>,
    /// Label sequences, e.g. one per trained system size.
    pub protocols: Vec<Vec<String>>,
    /// Re-optimize durations for every target size instead of reusing them.
    pub reoptimize: bool,
    /// Durations to reuse when `reoptimize` is off, one list per protocol.
    pub durations: Vec<Vec<f64>>,
}

impl Default for TransferSettings {
    fn default() -> Self {
        Self { sizes: Vec::new(), protocols: Vec::new(), reoptimize: true, durations: Vec::new() }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LandscapeSettings {
    pub sequence: Vec<String>,
    pub restarts: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub method: Method,
    pub actions: Vec<String>,
    pub q: usize,
    pub total: Option<f64>,
    pub t_grid: Vec<f64>,
    /// `translation_parity` (default for chains), `full`, `translation`,
    /// `reflection` or `lmg`.
    pub sector: Option<String>,
    pub initial: Option<InitialState>,
    pub solver: SolverConfig,
    pub train: TrainConfig,
    pub drive: DriveSettings,
    /// Solver restarts per alternation order for QAOA.
    pub qaoa_restarts: usize,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: PathBuf,
    /// Protocol table replayed by `evolve`.
    pub protocol: Option<PathBuf>,
    /// Sampling interval of time traces; `None` disables traces.
    pub trace_dt: Option<f64>,
    /// Resume `cdqaoa-train` from the checkpoint in `out` when present.
    pub resume: bool,
    pub lmg: LmgSettings,
    pub transfer: TransferSettings,
    pub landscape: LandscapeSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::new(ModelKind::IsingHalf, 12),
            method: Method::Cdqaoa,
            actions: Vec::new(),
            q: 3,
            total: None,
            t_grid: Vec::new(),
            sector: None,
            initial: None,
            solver: SolverConfig::default(),
            train: TrainConfig::default(),
            drive: DriveSettings::default(),
            qaoa_restarts: 50,
            seed: 0,
            workers: None,
            out: PathBuf::from("out"),
            protocol: None,
            trace_dt: None,
            resume: false,
            lmg: LmgSettings::default(),
            transfer: TransferSettings::default(),
            landscape: LandscapeSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("t_grid must be strictly increasing".into()));
        }
        if self.t_grid.iter().chain(self.total.iter()).any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::Config("durations must be finite and nonnegative".into()));
        }
        if self.q == 0 {
            return Err(Error::Config("q must be positive".into()));
        }
        self.sector_spec()?;
        Ok(())
    }

    /// The T-grid, or the single `total`.
    pub fn totals(&self) -> Result<Vec<f64>> {
        if !self.t_grid.is_empty() {
            return Ok(self.t_grid.clone());
        }
        self.total
            .map(|t| vec![t])
            .ok_or_else(|| Error::Config("set either `total` or `t_grid`".into()))
    }

    pub fn sector_spec(&self) -> Result<Option<SymmetrySpec>> {
        self.sector.as_deref().map(SymmetrySpec::parse).transpose()
    }

    pub fn problem_options(&self) -> Result<ProblemOptions> {
        Ok(ProblemOptions { sector: self.sector_spec()?, initial: self.initial })
    }

    /// Generators for CD-QAOA: the configured list, or the model default.
    pub fn action_labels(&self) -> Vec<String> {
        if self.actions.is_empty() {
            default_actions(self.model.kind)
        } else {
            self.actions.clone()
        }
    }

    pub fn ansatz_labels(&self) -> Vec<String> {
        self.drive.ansatz.clone().unwrap_or_else(|| default_ansatz(self.model.kind))
    }

    /// Builds the control problem for `model` with the given labels.
    pub fn problem_for(&self, model: &ModelSpec, labels: &[String]) -> Result<ControlProblem> {
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        ControlProblem::build(model, &refs, &self.problem_options()?)
    }

    pub fn drive_config(&self, total: f64) -> DriveConfig {
        DriveConfig {
            total,
            dt: self.drive.dt,
            beta_dt: self.drive.beta_dt,
            sampling: self.drive.sampling,
            record_trace: self.trace_dt.is_some(),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
    }
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Generator sets used throughout for each model.
pub fn default_actions(kind: ModelKind) -> Vec<String> {
    match kind {
        ModelKind::IsingHalf => strings(&["Z|Z+Z", "X", "Y", "X|Y", "Y|Z"]),
        ModelKind::IsingOne => strings(&["H1", "H2", "Y", "XY", "YZ", "X|Y", "Y|Z"]),
        ModelKind::HeisenbergOne => strings(&["H1", "H2", "Y", "XY", "YZ", "X|Y", "Y|Z", "X|X", "Z"]),
        ModelKind::Lmg => strings(&["H1", "H2", "Y", "hatXY", "hatZY"]),
    }
}

/// Gauge-potential terms used by variational CD driving.
pub fn default_ansatz(kind: ModelKind) -> Vec<String> {
    match kind {
        ModelKind::IsingHalf => strings(&["Y", "X|Y", "Y|Z"]),
        ModelKind::IsingOne | ModelKind::HeisenbergOne => strings(&["Y", "XY", "YZ", "X|Y", "Y|Z"]),
        ModelKind::Lmg => strings(&["Y", "hatXY", "hatZY"]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_file() {
        let c = ExperimentConfig::from_toml_str(
            r#"
            method = "qaoa"
            t_grid = [4.0, 8.0]
            [model]
            kind = "ising_one"
            n_sites = 6
            [train]
            iterations = 10
            "#,
        )
        .unwrap();
        assert_eq!(c.method, Method::Qaoa);
        assert_eq!(c.train.iterations, 10);
        assert_eq!(c.train.batch_size, 128);
        assert_eq!(c.totals().unwrap(), vec![4.0, 8.0]);
    }

    #[test]
    fn rejects_unsorted_grid_and_unknown_keys() {
        assert!(ExperimentConfig::from_toml_str("t_grid = [2.0, 1.0]").is_err());
        assert!(ExperimentConfig::from_toml_str("bogus = 1").is_err());
    }
}
