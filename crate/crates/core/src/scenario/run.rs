//! Running a scenario and writing its CSV outputs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::dynamics::{simulate_hybrid, HybridModel, Method, Simulation};
use crate::error::{Error, Result};
use crate::observables::{simulation_features, temperature_series, FeatureReport, TemperaturePoint};
use crate::scenario::config::ScenarioConfig;
use crate::scenario::presets::{canonical_name, preset};

/// One feature value as written to the features CSV.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureValue {
    Number(f64),
    Text(String),
    /// The feature does not exist for this run (e.g. no steady state).
    Missing,
}

impl FeatureValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            FeatureValue::Number(v) => Some(*v),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            FeatureValue::Number(v) => fmt_float(*v),
            FeatureValue::Text(s) => s.clone(),
            FeatureValue::Missing => "NONE".into(),
        }
    }
}

/// Twelve significant digits; non-finite values print as `NaN`.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        "NaN".into()
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ScenarioConfig,
    pub energies: Vec<f64>,
    pub simulation: Simulation,
    /// Temperature series of every system qubit.
    pub temperatures: Vec<Vec<TemperaturePoint>>,
    pub report: FeatureReport,
}

/// Runs a configuration: Markovian, closed or hybrid dynamics as the
/// environments require.
pub fn run_config(cfg: &ScenarioConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let model = cfg.model.build()?;
    let times = cfg.grid.times()?;
    let opts = cfg.solver.options()?;
    let hybrid = HybridModel::from_model(&model)?;
    let simulation = simulate_hybrid(&hybrid, &times, &opts)?;
    let energies = model.energies();
    let temperatures = energies
        .iter()
        .enumerate()
        .map(|(q, &e)| temperature_series(&simulation.trajectory, q, e))
        .collect::<Result<Vec<_>>>()?;
    let report = simulation_features(&simulation, 0, energies[0], model.qubits[0].tau, &cfg.features.options())?;
    Ok(RunOutput { config: cfg.clone(), energies, simulation, temperatures, report })
}

/// Runs a catalog preset with `path=value` overrides.
pub fn run_preset<S: AsRef<str>>(name: &str, overrides: &[S]) -> Result<RunOutput> {
    run_config(&preset(name)?.apply_overrides(overrides)?)
}

impl RunOutput {
    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn cold_temperatures(&self) -> &[TemperaturePoint] {
        &self.temperatures[0]
    }

    /// Trajectory table: `t,T1,r1,valid,T2,T3,trace_residual,min_eig`.
    pub fn trajectory_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["t", "T1", "r1", "valid", "T2", "T3", "trace_residual", "min_eig"]).map_err(csv_err)?;
        let traj = &self.simulation.trajectory;
        let temp = |q: usize, i: usize| -> String {
            self.temperatures.get(q).and_then(|s| s[i].temperature).map_or_else(|| "NaN".into(), fmt_float)
        };
        for (i, &t) in traj.times.iter().enumerate() {
            let p = &self.temperatures[0][i];
            let d = &traj.diagnostics[i];
            w.write_record([
                fmt_float(t),
                temp(0, i),
                fmt_float(p.r_excited),
                if p.is_defined() { "1".into() } else { "0".into() },
                temp(1, i),
                temp(2, i),
                fmt_float(d.trace_residual),
                fmt_float(d.min_eig),
            ])
            .map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    /// Named scalar features of the cold-qubit trajectory.
    pub fn features(&self) -> Vec<(&'static str, FeatureValue)> {
        use FeatureValue::*;
        let r = &self.report;
        let traj = &self.simulation.trajectory;
        let horizon = *traj.times.last().unwrap_or(&0.0);
        let t0 = traj.times.first().copied().unwrap_or(0.0);
        let quarter = (horizon - t0) / 4.0;
        let num = |v: Option<f64>| v.map_or(Missing, Number);
        let window_mins: Vec<f64> = r.envelopes.iter().map(|e| e.min).collect();
        let window_maxs: Vec<f64> = r.envelopes.iter().map(|e| e.max).collect();
        let mean = |v: &[f64]| if v.is_empty() { None } else { Some(v.iter().sum::<f64>() / v.len() as f64) };
        let worst = traj.worst_diagnostics();
        let method = match traj.method {
            Method::Spectral => "spectral",
            Method::Adaptive => "adaptive",
            Method::Closed => "closed",
        };
        vec![
            ("method", Text(method.into())),
            ("horizon", Number(horizon)),
            ("samples", Number(traj.len() as f64)),
            ("transient_min", num(r.transient_min.map(|m| m.temperature))),
            ("transient_min_t", num(r.transient_min.map(|m| m.t))),
            ("first_minimum", num(r.first_minimum.map(|m| m.temperature))),
            ("first_minimum_t", num(r.first_minimum.map(|m| m.t))),
            ("max_temperature", num(r.max_temperature)),
            ("final_temperature", num(self.cold_temperatures().last().and_then(|p| p.temperature))),
            ("steady", num(r.steady.map(|s| s.temperature))),
            ("steady_t", num(r.steady.map(|s| s.t))),
            ("refrigerates", Number(if r.refrigerates { 1.0 } else { 0.0 })),
            ("undefined_points", Number(r.undefined_points as f64)),
            ("envelope_min_mean", num(mean(&window_mins))),
            ("envelope_max_mean", num(mean(&window_maxs))),
            ("envelope_min_first_quarter", num(r.envelope_min_in(t0, t0 + quarter))),
            ("envelope_min_last_quarter", num(r.envelope_min_in(horizon - quarter, horizon))),
            ("max_offdiagonal", Number(traj.max_coherence())),
            ("max_trace_residual", Number(worst.trace_residual)),
            ("max_hermiticity_defect", Number(worst.hermiticity)),
            ("min_eigenvalue", Number(worst.min_eig)),
        ]
    }

    pub fn feature(&self, quantity: &str) -> Option<FeatureValue> {
        self.features().into_iter().find(|(q, _)| *q == quantity).map(|(_, v)| v)
    }

    /// Feature table: `preset,quantity,value`.
    pub fn features_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["preset", "quantity", "value"]).map_err(csv_err)?;
        for (q, v) in self.features() {
            w.write_record([self.name(), q, &v.render()]).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    /// Writes `<stem>.csv` and `<stem>_features.csv` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let traj = dir.join(format!("{stem}.csv"));
        let feats = dir.join(format!("{stem}_features.csv"));
        write_atomic(&traj, &self.trajectory_csv()?)?;
        write_atomic(&feats, &self.features_csv()?)?;
        Ok((traj, feats))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes to a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// File stem used for a preset: its canonical name.
pub fn output_stem(name: &str) -> Result<&'static str> {
    canonical_name(name)
}
