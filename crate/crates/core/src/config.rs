//! Declarative run configuration (TOML) and the shipped presets.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("unknown preset `{0}`; available: {1}")]
    UnknownPreset(String, String),
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Mode evolution with rate fits.
    Evolve,
    /// Evolution plus critical-exponent verdicts over `s_grid`.
    Scan,
    /// Oscillatory-integral envelopes, limit constants and `L^p` membership.
    Asymptotics,
    /// Nonlinear consistency residual from a real mode bundle.
    Consistency,
    /// Constant-coefficient model against its closed form.
    ConstantModel,
    /// Boundary-derivative formula and `H¹` expansion against direct solves.
    Formula,
    /// Norm-machinery property suites on deterministic corpora.
    Norms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    /// "couette", "quadratic", "tanh" or "table".
    pub name: String,
    /// `beta` for quadratic, `gamma` for tanh.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    /// CSV of `(y, U)` rows when `name = "table"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub s: Vec<f64>,
    pub k: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            s: vec![0.0, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8],
            k: vec![0.5, 1.0, 2.0, 4.0],
            y: vec![0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0],
            t: vec![10.0, 1e2, 1e3, 1e4, 1e5, 1e6],
        }
    }
}

fn default_dt0() -> f64 {
    0.5
}
fn default_per_decade() -> u32 {
    8
}
fn default_nx() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub flow: FlowSpec,
    /// Named initial data: "constant", "cosine", "sin", "sin2",
    /// "bump-zero-trace" or "zero".
    pub initial_data: String,
    pub k: Vec<f64>,
    pub grid: GridSpec,
    pub t_end: f64,
    #[serde(default = "default_dt0")]
    pub dt0: f64,
    #[serde(default = "default_per_decade")]
    pub snapshots_per_decade: u32,
    /// Interval Sobolev exponents evaluated per snapshot.
    #[serde(default)]
    pub s_grid: Vec<f64>,
    /// Torus Sobolev exponents in `[0, 1)` evaluated per snapshot.
    #[serde(default)]
    pub torus_s: Vec<f64>,
    /// Physical `x` points for the consistency residual.
    #[serde(default = "default_nx")]
    pub nx: usize,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// Scans stay this far from the critical exponents 3/2 and 5/2.
pub const CRITICAL_EXCLUSION: f64 = 0.15;

/// Default interval `s`-grid respecting the exclusion bands.
pub const DEFAULT_S_GRID: [f64; 17] = [
    1.0, 1.1, 1.2, 1.25, 1.3, 1.7, 1.75, 1.8, 1.9, 2.1, 2.2, 2.25, 2.3, 2.7, 2.75, 2.8, 2.9,
];

/// Chebyshev nodes needed to resolve the phase `e^{-ikty}` up to `t_end`,
/// rounded up to a multiple of 32.
pub fn recommended_nodes(k_max: f64, t_end: f64) -> usize {
    let n = (0.6 * k_max.abs() * t_end + 60.0).ceil() as usize;
    n.div_ceil(32) * 32
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(invalid("name", "use letters, digits, '-' or '_'"));
        }
        if self.k.is_empty() {
            return Err(invalid("k", "at least one wavenumber is required"));
        }
        if let Some(k) = self.k.iter().find(|k| **k == 0.0 || !k.is_finite()) {
            return Err(invalid("k", format!("entries must be finite and nonzero, found {k}")));
        }
        if !(self.t_end >= 10.0) {
            return Err(invalid("t_end", format!("must be at least 10, got {}", self.t_end)));
        }
        if !(self.dt0 > 0.0) {
            return Err(invalid("dt0", "must be positive"));
        }
        if self.snapshots_per_decade == 0 {
            return Err(invalid("snapshots_per_decade", "must be positive"));
        }
        if self.grid.n < 16 {
            return Err(invalid("grid.n", "at least 16 nodes"));
        }
        if self.grid.m >= 31 || (1usize << self.grid.m) < self.grid.n {
            return Err(invalid("grid.m", "2^m must be at least n"));
        }
        for &s in &self.s_grid {
            if !(0.0..3.0).contains(&s) || s - s.floor() >= 0.95 {
                return Err(invalid("s_grid", format!("{s} is outside [0, 3) or too close to an integer from below")));
            }
            for crit in [1.5, 2.5] {
                if (s - crit).abs() < CRITICAL_EXCLUSION - 1e-12 {
                    return Err(invalid("s_grid", format!("{s} lies within {CRITICAL_EXCLUSION} of {crit}")));
                }
            }
        }
        if let Some(s) = self.torus_s.iter().find(|s| !(0.0..1.0).contains(*s)) {
            return Err(invalid("torus_s", format!("{s} is outside [0, 1)")));
        }
        if self.nx < 4 {
            return Err(invalid("nx", "at least 4 points"));
        }
        match self.flow.name.as_str() {
            "couette" | "quadratic" | "tanh" => {}
            "table" if self.flow.table.is_some() => {}
            "table" => return Err(invalid("flow.table", "required for tabulated flows")),
            other => return Err(invalid("flow.name", format!("unknown flow `{other}`"))),
        }
        crate::evolve::InitialData::parse(&self.initial_data)
            .map_err(|e| invalid("initial_data", e.to_string()))?;
        let k_max = self.k.iter().fold(0.0f64, |m, k| m.max(k.abs()));
        let needed = recommended_nodes(k_max, self.t_end);
        if matches!(self.kind, ExperimentKind::Evolve | ExperimentKind::Scan | ExperimentKind::Consistency)
            && self.grid.n < needed
        {
            log::warn!(
                "grid.n = {} is below the {} nodes recommended for |k| = {} up to t = {}",
                self.grid.n,
                needed,
                k_max,
                self.t_end
            );
        }
        Ok(())
    }
}

fn base(name: &str, kind: ExperimentKind, flow: &str, data: &str) -> RunConfig {
    RunConfig {
        name: name.to_string(),
        kind,
        flow: FlowSpec {
            name: flow.to_string(),
            param: None,
            table: None,
        },
        initial_data: data.to_string(),
        k: vec![1.0],
        grid: GridSpec {
            n: recommended_nodes(1.0, 1e3),
            m: 12,
        },
        t_end: 1e3,
        dt0: default_dt0(),
        snapshots_per_decade: default_per_decade(),
        s_grid: Vec::new(),
        torus_s: Vec::new(),
        nx: default_nx(),
        sweep: SweepSpec::default(),
        output_dir: None,
    }
}

pub const PRESET_NAMES: [&str; 12] = [
    "couette-boundary",
    "constant-model",
    "log-blowup-general",
    "critical-scan-general",
    "critical-scan-zero-dirichlet",
    "damping-zero-dirichlet",
    "damping-general",
    "scattering",
    "boundary-formula",
    "asymptotics",
    "norms",
    "consistency",
];

/// Named configurations, one per reproduced result.
pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
    use ExperimentKind::*;
    let mut cfg = match name {
        "couette-boundary" => base(name, Evolve, "couette", "constant"),
        "constant-model" => base(name, ConstantModel, "couette", "constant"),
        "log-blowup-general" => base(name, Evolve, "quadratic", "constant"),
        "critical-scan-general" => {
            let mut c = base(name, Scan, "quadratic", "constant");
            c.s_grid = DEFAULT_S_GRID.to_vec();
            c
        }
        "critical-scan-zero-dirichlet" => {
            let mut c = base(name, Scan, "quadratic", "sin");
            c.s_grid = DEFAULT_S_GRID.to_vec();
            c
        }
        "damping-zero-dirichlet" => base(name, Evolve, "quadratic", "sin"),
        "damping-general" => {
            let mut c = base(name, Evolve, "quadratic", "constant");
            c.torus_s = vec![0.0, 0.4];
            c
        }
        "scattering" => base(name, Evolve, "quadratic", "constant"),
        "boundary-formula" => {
            let mut c = base(name, Formula, "quadratic", "cosine");
            c.k = vec![1.0];
            c
        }
        "asymptotics" => base(name, Asymptotics, "couette", "zero"),
        "norms" => base(name, Norms, "couette", "zero"),
        "consistency" => base(name, Consistency, "quadratic", "sin"),
        other => return Err(ConfigError::UnknownPreset(other.to_string(), PRESET_NAMES.join(", "))),
    };
    cfg.validate()?;
    if cfg.kind == Scan && cfg.s_grid.is_empty() {
        cfg.s_grid = DEFAULT_S_GRID.to_vec();
    }
    Ok(cfg)
}
