//! Scenario configuration documents and dotted-path overrides.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{PropagationOptions, RkOptions, Solver};
use crate::error::{Error, Result};
use crate::model::{
    FiniteSpinEnv, MarkovianEnv, NoiseModel, NoiseSpec, QubitEnv, QubitSpec, RefrigeratorModel, SpectralDensity,
    TwoQubitVariant, ZeroFrequencyPolicy,
};
use crate::observables::FeatureOptions;

pub const SCHEMA_VERSION: u32 = 1;

/// One runnable configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub model: ModelConfig,
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub features: FeatureConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub qubits: Vec<QubitConfig>,
    #[serde(default)]
    pub g: f64,
    #[serde(default)]
    pub variant: Option<TwoQubitVariant>,
    #[serde(default = "yes")]
    pub self_contained: bool,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitConfig {
    pub energy: f64,
    pub tau: f64,
    pub env: EnvConfig,
}

/// Environment of one qubit. Temperatures default to the qubit's own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvConfig {
    Markovian {
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
        #[serde(default = "default_cutoff")]
        omega_cut: f64,
    },
    Finite {
        n_spins: usize,
        #[serde(default = "default_nu")]
        nu: f64,
        #[serde(default = "default_alpha0")]
        alpha0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
    },
    None,
}

fn default_cutoff() -> f64 {
    crate::model::rates::DEFAULT_CUTOFF
}

fn default_nu() -> f64 {
    1.0
}

fn default_alpha0() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub model: NoiseModel,
    pub strength: f64,
    pub alpha: f64,
    pub tau: f64,
    #[serde(default = "default_cutoff")]
    pub omega_cut: f64,
    #[serde(default = "default_zero_policy")]
    pub zero_frequency: ZeroFrequencyPolicy,
}

fn default_zero_policy() -> ZeroFrequencyPolicy {
    ZeroFrequencyPolicy::OhmicLimit
}

/// Uniform samples of spacing `step` on `[0, fine_until]`, then
/// `coarse_points` evenly spaced samples up to `horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub horizon: f64,
    pub step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fine_until: Option<f64>,
    #[serde(default)]
    pub coarse_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub solver: Solver,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_trace_tol")]
    pub trace_tol: f64,
}

fn default_atol() -> f64 {
    RkOptions::default().atol
}

fn default_trace_tol() -> f64 {
    RkOptions::default().trace_tol
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { solver: Solver::Auto, atol: default_atol(), trace_tol: default_trace_tol() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureConfig {
    #[serde(default = "default_window")]
    pub steady_window: f64,
    #[serde(default = "default_range")]
    pub steady_range: f64,
    #[serde(default = "default_envelopes")]
    pub envelope_windows: usize,
}

fn default_window() -> f64 {
    FeatureOptions::default().steady_window
}

fn default_range() -> f64 {
    FeatureOptions::default().steady_range
}

fn default_envelopes() -> usize {
    FeatureOptions::default().envelope_windows
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self { steady_window: default_window(), steady_range: default_range(), envelope_windows: default_envelopes() }
    }
}

impl FeatureConfig {
    pub fn options(&self) -> FeatureOptions {
        FeatureOptions {
            steady_window: self.steady_window,
            steady_range: self.steady_range,
            envelope_windows: self.envelope_windows,
        }
    }
}

impl GridSpec {
    pub fn fine_end(&self) -> f64 {
        self.fine_until.unwrap_or(self.horizon).min(self.horizon)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!("grid step must be positive, got {}", self.step)));
        }
        if let Some(f) = self.fine_until {
            if !(f > 0.0) {
                return Err(Error::Config(format!("fine_until must be positive, got {f}")));
            }
        }
        let n = self.fine_end() / self.step;
        if n > 5e6 {
            return Err(Error::Config(format!("grid would hold {n:.0} samples")));
        }
        Ok(())
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let fine_end = self.fine_end();
        let n = (fine_end / self.step + 1e-9).floor() as usize;
        let mut t: Vec<f64> = (0..=n).map(|k| k as f64 * self.step).collect();
        if fine_end - t[n] > 1e-9 * fine_end {
            t.push(fine_end);
        }
        if self.horizon > fine_end {
            let m = self.coarse_points.max(1);
            let last = *t.last().unwrap_or(&0.0);
            let width = (self.horizon - last) / m as f64;
            t.extend((1..=m).map(|k| if k == m { self.horizon } else { last + k as f64 * width }));
        }
        Ok(t)
    }
}

impl SolverConfig {
    pub fn options(&self) -> Result<PropagationOptions> {
        if !(self.atol > 0.0 && self.trace_tol > 0.0) {
            return Err(Error::Config(format!("tolerances must be positive (atol {}, trace_tol {})", self.atol, self.trace_tol)));
        }
        Ok(PropagationOptions {
            solver: self.solver,
            rk: RkOptions { atol: self.atol, trace_tol: self.trace_tol, ..RkOptions::default() },
            ..PropagationOptions::default()
        })
    }
}

fn config_err(e: Error) -> Error {
    if e.is_config() {
        e
    } else {
        Error::Config(e.to_string())
    }
}

impl ModelConfig {
    pub fn build(&self) -> Result<RefrigeratorModel> {
        let qubits = self
            .qubits
            .iter()
            .map(|q| {
                let env = match &q.env {
                    EnvConfig::Markovian { alpha, tau, omega_cut } => QubitEnv::Markovian(MarkovianEnv::new(
                        SpectralDensity::new(*alpha, *omega_cut)?,
                        tau.unwrap_or(q.tau),
                    )?),
                    EnvConfig::Finite { n_spins, nu, alpha0, tau } => {
                        let env = FiniteSpinEnv { n_spins: *n_spins, nu: *nu, alpha0: *alpha0, tau: tau.unwrap_or(q.tau) };
                        env.validate()?;
                        QubitEnv::Finite(env)
                    }
                    EnvConfig::None => QubitEnv::Isolated,
                };
                Ok(QubitSpec { energy: q.energy, tau: q.tau, env })
            })
            .collect::<Result<_>>()
            .map_err(config_err)?;
        let noise = match &self.noise {
            None => None,
            Some(n) => {
                if !(n.strength >= 0.0 && n.strength.is_finite()) {
                    return Err(Error::Config(format!("noise strength {}", n.strength)));
                }
                let env = MarkovianEnv::new(SpectralDensity::new(n.alpha, n.omega_cut)?, n.tau)
                    .map_err(config_err)?
                    .with_zero_frequency(n.zero_frequency);
                Some(NoiseSpec { model: n.model, strength: n.strength, env })
            }
        };
        let model = RefrigeratorModel { qubits, g: self.g, variant: self.variant, self_contained: self.self_contained, noise };
        model.validate().map_err(config_err)?;
        Ok(model)
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.name.trim().is_empty() {
            return Err(Error::Config("scenario name is empty".into()));
        }
        self.grid.validate()?;
        self.solver.options()?;
        let f = &self.features;
        if !(f.steady_window > 0.0 && f.steady_window <= 1.0 && f.steady_range > 0.0) {
            return Err(Error::Config("steady window must lie in (0, 1] with a positive range".into()));
        }
        self.model.build().map(|_| ())
    }

    /// Applies `path=value` overrides. Only the fields listed in
    /// [`OVERRIDABLE`] may be changed; values are parsed as JSON and fall
    /// back to plain strings.
    pub fn apply_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self> {
        let mut doc = serde_json::to_value(self)?;
        for raw in overrides {
            let raw = raw.as_ref();
            let (path, value) = raw
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{raw}` is not of the form path=value")))?;
            let path = path.trim();
            if !is_overridable(path) {
                return Err(Error::Config(format!(
                    "`{path}` cannot be overridden; allowed: {}",
                    OVERRIDABLE.join(", ")
                )));
            }
            let value = serde_json::from_str(value.trim()).unwrap_or_else(|_| Value::String(value.trim().to_string()));
            set_path(&mut doc, path, value)?;
        }
        let cfg: Self = serde_json::from_value(doc).map_err(|e| Error::Config(format!("override rejected: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets the number of samples of the fine grid segment.
    pub fn with_grid_points(mut self, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {n}")));
        }
        self.grid.step = self.grid.fine_end() / (n - 1) as f64;
        self.validate()?;
        Ok(self)
    }

    /// Changes the horizon, keeping the fine grid spacing.
    pub fn with_horizon(mut self, horizon: f64) -> Result<Self> {
        self.grid.horizon = horizon;
        if let Some(f) = self.grid.fine_until {
            if f >= horizon {
                self.grid.fine_until = None;
            }
        }
        self.validate()?;
        Ok(self)
    }
}

/// Dotted paths accepted by [`ScenarioConfig::apply_overrides`]; `*` matches
/// a qubit index.
pub const OVERRIDABLE: &[&str] = &[
    "grid.horizon",
    "grid.step",
    "grid.fine_until",
    "grid.coarse_points",
    "solver.solver",
    "solver.atol",
    "solver.trace_tol",
    "features.steady_window",
    "features.steady_range",
    "features.envelope_windows",
    "model.g",
    "model.noise.strength",
    "model.qubits.*.env.alpha",
    "model.qubits.*.env.n_spins",
    "model.qubits.*.env.alpha0",
];

fn is_overridable(path: &str) -> bool {
    let parts: Vec<&str> = path.split('.').collect();
    OVERRIDABLE.iter().any(|pat| {
        let p: Vec<&str> = pat.split('.').collect();
        p.len() == parts.len() && p.iter().zip(&parts).all(|(a, b)| *a == *b || (*a == "*" && b.parse::<usize>().is_ok()))
    })
}

fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.get_mut(*part).ok_or_else(|| Error::Config(format!("`{path}`: no field `{part}` in this scenario")))?
            }
            Value::Array(items) => {
                let idx: usize = part.parse().map_err(|_| Error::Config(format!("`{path}`: `{part}` is not an index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| Error::Config(format!("`{path}`: index {idx} out of range ({len} entries)")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(Error::Config(format!("`{path}`: `{part}` is not inside an object"))),
        };
    }
    Ok(())
}
