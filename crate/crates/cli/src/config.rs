//! TOML configuration: model parameters, sweep axis, solver and oracle
//! settings. All physical values are in units of γ; the mandatory
//! `units = "gamma"` field guards against feeding absolute frequencies.

use serde::{Deserialize, Serialize};
use std::path::Path;

use ppcorr::{FockConfig, ModelParams};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub units: String,
    pub model: ModelSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub oracle: OracleSection,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "one")]
    pub gamma: f64,
    pub gamma_c: f64,
    pub g: f64,
    pub lambda: f64,
    pub omega_rabi: f64,
    pub delta: f64,
    pub delta1: f64,
    pub omega_m: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub nbar: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Name of the swept ModelParams field (typically "delta1").
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    /// One sweep per entry.
    #[serde(default)]
    pub nbar: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_order")]
    pub max_order: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            max_order: default_order(),
        }
    }
}

fn default_order() -> usize {
    4
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    /// off | reduced | full
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default = "default_na")]
    pub n_a: usize,
    #[serde(default = "default_na")]
    pub n_b: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_na")]
    pub max_n_a: usize,
    #[serde(default = "default_max_nb")]
    pub max_n_b: usize,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            mode: default_mode(),
            n_a: default_na(),
            n_b: default_na(),
            tol: default_tol(),
            max_n_a: default_max_na(),
            max_n_b: default_max_nb(),
        }
    }
}

fn default_mode() -> String {
    "off".into()
}
fn default_na() -> usize {
    12
}
fn default_tol() -> f64 {
    1e-3
}
fn default_max_na() -> usize {
    48
}
fn default_max_nb() -> usize {
    48
}

/// The swept parameter applied to a base parameter set.
pub fn apply_sweep_value(base: &ModelParams, field: &str, value: f64) -> Result<ModelParams, String> {
    let mut p = *base;
    match field {
        "gamma_c" => p.gamma_c = value,
        "g" => p.g = value,
        "lambda" => p.lambda = value,
        "omega_rabi" => p.omega_rabi = value,
        "delta" => p.delta = value,
        "delta1" => p.delta1 = value,
        "omega_m" => p.omega_m = value,
        "kappa_a" => p.kappa_a = value,
        "kappa_b" => p.kappa_b = value,
        "nbar" => p.nbar = value,
        other => return Err(format!("unknown sweep parameter `{other}`")),
    }
    Ok(p)
}

impl Config {
    pub fn from_path(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self, String> {
        let cfg: Config = toml::from_str(text).map_err(|e| format!("config parse error: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Built-in default: the demonstration parameter set with the standard
    /// detuning sweep.
    pub fn builtin_default() -> Self {
        Self::from_str(DEFAULT_CONFIG).expect("builtin config is valid")
    }

    fn validate(&self) -> Result<(), String> {
        if self.units != "gamma" {
            return Err(format!(
                "config field `units` must be \"gamma\" (all values in units of the qubit decay rate); got \"{}\"",
                self.units
            ));
        }
        if let Some(s) = &self.sweep {
            if s.steps < 2 {
                return Err("sweep.steps must be at least 2".into());
            }
            apply_sweep_value(&self.model_params(), &s.parameter, s.start)?;
        }
        if !matches!(self.oracle.mode.as_str(), "off" | "reduced" | "full") {
            return Err(format!(
                "oracle.mode must be off | reduced | full, got \"{}\"",
                self.oracle.mode
            ));
        }
        self.model_params()
            .validate()
            .map_err(|e| format!("invalid model parameters: {e}"))?;
        Ok(())
    }

    pub fn model_params(&self) -> ModelParams {
        let m = &self.model;
        ModelParams {
            gamma: m.gamma,
            gamma_c: m.gamma_c,
            g: m.g,
            lambda: m.lambda,
            omega_rabi: m.omega_rabi,
            delta: m.delta,
            delta1: m.delta1,
            omega_m: m.omega_m,
            kappa_a: m.kappa_a,
            kappa_b: m.kappa_b,
            nbar: m.nbar,
        }
    }

    pub fn fock_config(&self) -> FockConfig {
        FockConfig {
            n_a: self.oracle.n_a,
            n_b: self.oracle.n_b,
            tol: self.oracle.tol,
            max_n_a: self.oracle.max_n_a,
            max_n_b: self.oracle.max_n_b,
        }
    }

    /// n̄ values to sweep over: the sweep list, or the base value.
    pub fn nbar_list(&self) -> Vec<f64> {
        match &self.sweep {
            Some(s) if !s.nbar.is_empty() => s.nbar.clone(),
            _ => vec![self.model.nbar],
        }
    }
}

/// Default configuration shipped with the CLI (also at configs/default.toml).
pub const DEFAULT_CONFIG: &str = r#"# Demonstration configuration: strong qubit-cavity coupling, drive tuned one
# phonon sideband below the qubit transition. All values in units of gamma.
units = "gamma"

[model]
gamma = 1.0
gamma_c = 0.3
g = 3.0
lambda = 5.0
omega_rabi = 50.0
delta = -26.3
delta1 = 50.0
omega_m = 50.0
kappa_a = 0.09
kappa_b = 0.009
nbar = 2.0

[sweep]
parameter = "delta1"
start = 30.0
stop = 70.0
steps = 81
nbar = [0.5, 2.0]

[solver]
max_order = 4

[oracle]
mode = "off"
n_a = 12
n_b = 12
tol = 1e-3
max_n_a = 48
max_n_b = 48
"#;
