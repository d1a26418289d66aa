//! Noise-strength sweeps and the strength at which refrigeration stops.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NoiseModel;
use crate::scenario::config::{GridSpec, ScenarioConfig};
use crate::scenario::run::{fmt_float, run_config};

/// When a noisy run counts as no longer refrigerating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Every sampled temperature up to the probe time is at least `tau1`.
    #[default]
    Trajectory,
    /// The temperatures at `t_probe / 2` and `t_probe` are at least `tau1`.
    ProbeTimes,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub strength: f64,
    pub t_half: Option<f64>,
    pub t_probe: Option<f64>,
    /// `T1(t_probe / 2) - T_ref`.
    pub delta_half: Option<f64>,
    /// `T1(t_probe) - T_ref`.
    pub delta_probe: Option<f64>,
    pub min_temperature: Option<f64>,
    pub ceased: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Threshold {
    Found { strength: f64, lower: f64, upper: f64 },
    /// Refrigeration has already stopped at the smallest strength.
    BelowRange,
    /// Still refrigerating at the largest strength.
    AboveRange,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub model: NoiseModel,
    pub base: String,
    pub probe_time: f64,
    /// Steady cold-qubit temperature of the noiseless base configuration.
    pub reference: f64,
    pub criterion: Criterion,
    pub points: Vec<SweepPoint>,
    pub threshold: Threshold,
}

const BISECTION_STEPS: usize = 40;
const BISECTION_RTOL: f64 = 1e-3;

fn evaluate(base: &ScenarioConfig, strength: f64, reference: f64, criterion: Criterion) -> Result<SweepPoint> {
    let mut cfg = base.clone();
    cfg.model.noise.as_mut().ok_or_else(|| Error::Config("base scenario has no noise model".into()))?.strength = strength;
    let out = run_config(&cfg)?;
    let tau1 = cfg.model.qubits[0].tau;
    let pts = out.cold_temperatures();
    let probe = cfg.grid.horizon;
    let at = |t: f64| -> Option<f64> {
        let k = pts.iter().position(|p| p.t >= t - 1e-9 * probe.max(1.0))?;
        pts[k].temperature
    };
    let (t_half, t_probe) = (at(0.5 * probe), at(probe));
    let min_temperature = pts.iter().filter_map(|p| p.temperature).reduce(f64::min);
    let warm = |t: Option<f64>| t.map_or(true, |v| v >= tau1);
    let ceased = match criterion {
        Criterion::Trajectory => warm(min_temperature),
        Criterion::ProbeTimes => warm(t_half) && warm(t_probe),
    };
    Ok(SweepPoint {
        strength,
        t_half,
        t_probe,
        delta_half: t_half.map(|v| v - reference),
        delta_probe: t_probe.map(|v| v - reference),
        min_temperature,
        ceased,
    })
}

/// Steady (or final) cold-qubit temperature of `base` without noise.
pub fn noiseless_reference(base: &ScenarioConfig) -> Result<f64> {
    let mut cfg = base.clone();
    cfg.model.noise = None;
    cfg.grid = GridSpec { horizon: 2e5, step: 0.05, fine_until: Some(50.0), coarse_points: 4000 };
    let out = run_config(&cfg)?;
    out.report
        .steady
        .map(|s| s.temperature)
        .or_else(|| out.cold_temperatures().last().and_then(|p| p.temperature))
        .ok_or_else(|| Error::Config("noiseless reference has no defined final temperature".into()))
}

/// Runs `base` (a noisy scenario whose grid horizon is the probe time) at
/// every strength and bisects for the onset of `ceased`.
pub fn sweep_noise(base: &ScenarioConfig, strengths: &[f64], criterion: Criterion) -> Result<SweepResult> {
    let noise = base.model.noise.as_ref().ok_or_else(|| Error::Config("base scenario has no noise model".into()))?;
    if strengths.is_empty() {
        return Err(Error::Config("no noise strengths given".into()));
    }
    if strengths.iter().any(|s| !(*s > 0.0 && s.is_finite())) || strengths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("noise strengths must be positive and strictly ascending".into()));
    }
    let reference = noiseless_reference(base)?;
    let points: Vec<SweepPoint> =
        strengths.par_iter().map(|&s| evaluate(base, s, reference, criterion)).collect::<Result<_>>()?;

    let threshold = match points.iter().position(|p| p.ceased) {
        None => Threshold::AboveRange,
        Some(0) => Threshold::BelowRange,
        Some(k) => {
            let (mut lo, mut hi) = (points[k - 1].strength, points[k].strength);
            for _ in 0..BISECTION_STEPS {
                if hi - lo <= BISECTION_RTOL * hi {
                    break;
                }
                let mid = (lo * hi).sqrt();
                if evaluate(base, mid, reference, criterion)?.ceased {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Threshold::Found { strength: hi, lower: lo, upper: hi }
        }
    };
    Ok(SweepResult {
        model: noise.model,
        base: base.name.clone(),
        probe_time: base.grid.horizon,
        reference,
        criterion,
        points,
        threshold,
    })
}

impl SweepResult {
    pub fn threshold_strength(&self) -> Option<f64> {
        match self.threshold {
            Threshold::Found { strength, .. } => Some(strength),
            _ => None,
        }
    }

    /// Table: `strength,T1_half,T1_probe,delta_half,delta_probe,min_T1,ceased`.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        let opt = |v: Option<f64>| v.map_or_else(|| "NaN".to_string(), fmt_float);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["strength", "T1_half", "T1_probe", "delta_half", "delta_probe", "min_T1", "ceased"])
            .map_err(err)?;
        for p in &self.points {
            w.write_record([
                fmt_float(p.strength),
                opt(p.t_half),
                opt(p.t_probe),
                opt(p.delta_half),
                opt(p.delta_probe),
                opt(p.min_temperature),
                (p.ceased as u8).to_string(),
            ])
            .map_err(err)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}
