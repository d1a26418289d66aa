//! Summary features of a cold-qubit temperature trajectory.

use serde::Serialize;

use crate::dynamics::{Simulation, Trajectory};
use crate::error::{Error, Result};
use crate::observables::temperature::{temperature_from_population, temperature_series, TemperaturePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeatureOptions {
    /// Steady-state window as a fraction of the horizon.
    pub steady_window: f64,
    /// Largest temperature range inside the window that still counts as steady.
    pub steady_range: f64,
    /// Number of equal windows for the oscillation envelope.
    pub envelope_windows: usize,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        Self { steady_window: 0.1, steady_range: 1e-3, envelope_windows: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub t: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Steady {
    /// Earliest time after which the temperature stays within the range.
    pub t: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub t_start: f64,
    pub t_end: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureReport {
    /// Global minimum over defined temperatures, refined between samples.
    pub transient_min: Option<Extremum>,
    /// First local minimum of the sampled series, refined like `transient_min`.
    pub first_minimum: Option<Extremum>,
    pub max_temperature: Option<f64>,
    pub steady: Option<Steady>,
    /// Some defined temperature falls below the initial temperature.
    pub refrigerates: bool,
    pub envelopes: Vec<Envelope>,
    pub undefined_points: usize,
}

impl FeatureReport {
    /// Smallest window minimum over windows overlapping `[t0, t1]`.
    pub fn envelope_min_in(&self, t0: f64, t1: f64) -> Option<f64> {
        self.envelopes
            .iter()
            .filter(|e| e.t_end > t0 && e.t_start < t1)
            .map(|e| e.min)
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[a, b]`.
fn golden_min(mut a: f64, mut b: f64, f: &dyn Fn(f64) -> Option<f64>) -> Option<(f64, f64)> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..80 {
        if (b - a).abs() <= 1e-10 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Some(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Vertex of the parabola through three samples, if it lies between them.
fn parabolic_min(p: [(f64, f64); 3]) -> Option<(f64, f64)> {
    let [(x0, y0), (x1, y1), (x2, y2)] = p;
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    if denom == 0.0 {
        return None;
    }
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if a <= 0.0 {
        return None;
    }
    let xv = -b / (2.0 * a);
    if !(xv > x0 && xv < x2) {
        return None;
    }
    let c = y0 - a * x0 * x0 - b * x0;
    Some((xv, a * xv * xv + b * xv + c))
}

/// Feature report from sampled temperatures alone.
pub fn extract_features(points: &[TemperaturePoint], tau1: f64, opts: &FeatureOptions) -> Result<FeatureReport> {
    features_with_probe(points, tau1, opts, None)
}

/// Feature report for qubit `qubit` (level spacing `energy`) of a
/// simulation; the transient minimum is refined with the exact propagator
/// when available, otherwise by a parabola through the neighbouring samples.
pub fn simulation_features(
    sim: &Simulation,
    qubit: usize,
    energy: f64,
    tau1: f64,
    opts: &FeatureOptions,
) -> Result<FeatureReport> {
    let points = temperature_series(&sim.trajectory, qubit, energy)?;
    let slot = sim
        .trajectory
        .qubits
        .iter()
        .position(|&q| q == qubit)
        .ok_or(Error::IndexOutOfRange { index: qubit, factors: sim.trajectory.qubits.len() })?;
    let probe = |t: f64| -> Option<f64> {
        let states = sim.reduced_at(t).ok()??;
        temperature_from_population(states[slot].get(0, 0).re, energy)
    };
    let probe_ref: &dyn Fn(f64) -> Option<f64> = &probe;
    features_with_probe(&points, tau1, opts, sim.can_probe().then_some(probe_ref))
}

/// Features of a trajectory without off-grid refinement.
pub fn trajectory_features(
    traj: &Trajectory,
    qubit: usize,
    energy: f64,
    tau1: f64,
    opts: &FeatureOptions,
) -> Result<FeatureReport> {
    extract_features(&temperature_series(traj, qubit, energy)?, tau1, opts)
}

fn features_with_probe(
    points: &[TemperaturePoint],
    tau1: f64,
    opts: &FeatureOptions,
    probe: Option<&dyn Fn(f64) -> Option<f64>>,
) -> Result<FeatureReport> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("empty trajectory".into()));
    }
    let temps: Vec<Option<f64>> = points.iter().map(|p| p.temperature).collect();
    let undefined_points = temps.iter().filter(|t| t.is_none()).count();

    let argmin = temps
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.map(|v| (i, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    let transient_min = argmin.map(|(k, v)| {
        let sampled = Extremum { t: points[k].t, temperature: v };
        refine(points, &temps, k, probe)
            .filter(|r| r.temperature <= v)
            .unwrap_or(sampled)
    });

    let first_minimum = (1..temps.len().saturating_sub(1)).find_map(|k| match (temps[k - 1], temps[k], temps[k + 1]) {
        (Some(a), Some(b), Some(c)) if b < a && b <= c => {
            let sampled = Extremum { t: points[k].t, temperature: b };
            Some(refine(points, &temps, k, probe).filter(|r| r.temperature <= b).unwrap_or(sampled))
        }
        _ => None,
    });

    let max_temperature = temps.iter().flatten().copied().reduce(f64::max);
    let refrigerates = temps.iter().flatten().any(|&t| t < tau1);

    Ok(FeatureReport {
        transient_min,
        first_minimum,
        max_temperature,
        steady: detect_steady(points, opts),
        refrigerates,
        envelopes: envelopes(points, opts.envelope_windows),
        undefined_points,
    })
}

fn refine(
    points: &[TemperaturePoint],
    temps: &[Option<f64>],
    k: usize,
    probe: Option<&dyn Fn(f64) -> Option<f64>>,
) -> Option<Extremum> {
    if k == 0 || k + 1 >= points.len() {
        return None;
    }
    let (lo, hi) = (points[k - 1].t, points[k + 1].t);
    let (t, temperature) = match probe {
        Some(f) => golden_min(lo, hi, f)?,
        None => parabolic_min([(lo, temps[k - 1]?), (points[k].t, temps[k]?), (hi, temps[k + 1]?)])?,
    };
    Some(Extremum { t, temperature })
}

/// Steady iff the last window has a range below the threshold; the steady
/// time is the earliest sample from which the range to the end stays below it.
fn detect_steady(points: &[TemperaturePoint], opts: &FeatureOptions) -> Option<Steady> {
    let t_end = points.last()?.t;
    let t_first = points.first()?.t;
    let window_start = t_end - opts.steady_window * (t_end - t_first);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut since = None;
    let mut window_ok = false;
    for p in points.iter().rev() {
        let Some(v) = p.temperature else { break };
        let (nlo, nhi) = (lo.min(v), hi.max(v));
        if nhi - nlo >= opts.steady_range {
            break;
        }
        lo = nlo;
        hi = nhi;
        since = Some(p.t);
        if p.t <= window_start {
            window_ok = true;
        }
    }
    if !window_ok || points.len() < 2 {
        return None;
    }
    Some(Steady { t: since?, temperature: points.last()?.temperature? })
}

fn envelopes(points: &[TemperaturePoint], n: usize) -> Vec<Envelope> {
    let (Some(first), Some(last)) = (points.first(), points.last()) else { return Vec::new() };
    if n == 0 || last.t <= first.t {
        return Vec::new();
    }
    let width = (last.t - first.t) / n as f64;
    (0..n)
        .filter_map(|w| {
            let t_start = first.t + w as f64 * width;
            let t_end = if w + 1 == n { last.t } else { t_start + width };
            let vals: Vec<f64> = points
                .iter()
                .filter(|p| p.t >= t_start && (p.t < t_end || (w + 1 == n && p.t <= t_end)))
                .filter_map(|p| p.temperature)
                .collect();
            let min = vals.iter().copied().reduce(f64::min)?;
            let max = vals.iter().copied().reduce(f64::max)?;
            Some(Envelope { t_start, t_end, min, max })
        })
        .collect()
}
