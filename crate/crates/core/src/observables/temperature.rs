//! Local temperature of a qubit read off its excited-state population.

use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::quantum::DensityMatrix;

/// Off-diagonal magnitude tolerated in a state whose temperature is read.
pub const DIAGONAL_TOL: f64 = 1e-9;

/// Margin around `r = 1/2` inside which the temperature counts as undefined.
const BREAKDOWN_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperaturePoint {
    pub t: f64,
    /// Population of `|0>`, the `+E/2` level.
    pub r_excited: f64,
    /// `None` under population inversion (or at `r = 1/2`).
    pub temperature: Option<f64>,
}

impl TemperaturePoint {
    pub fn is_defined(&self) -> bool {
        self.temperature.is_some()
    }
}

/// `T = E / ln((1 - r) / r)` for the population `r` of the `+E/2` level.
/// Undefined whenever the upper level holds at least half the population;
/// for `E < 0` the upper level is `|1>`.
pub fn temperature_from_population(r: f64, energy: f64) -> Option<f64> {
    let upper = if energy > 0.0 { r } else { 1.0 - r };
    if !(upper > 0.0 && upper < 0.5 - BREAKDOWN_MARGIN) {
        return None;
    }
    Some(energy / ((1.0 - r) / r).ln())
}

/// Temperature of a single-qubit state diagonal in the energy basis.
pub fn local_temperature(rho: &DensityMatrix, energy: f64) -> Result<TemperaturePoint> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("temperature of a {}-dimensional state", rho.dim())));
    }
    if !(energy.is_finite() && energy != 0.0) {
        return Err(Error::InvalidParameter(format!("level spacing {energy}")));
    }
    let off = rho.get(0, 1).norm().max(rho.get(1, 0).norm());
    if off > DIAGONAL_TOL {
        return Err(Error::NotDiagonal(off));
    }
    let r = rho.get(0, 0).re;
    Ok(TemperaturePoint { t: 0.0, r_excited: r, temperature: temperature_from_population(r, energy) })
}

/// Temperature of one recorded qubit at every sample of a trajectory.
pub fn temperature_series(traj: &Trajectory, qubit: usize, energy: f64) -> Result<Vec<TemperaturePoint>> {
    traj.times
        .iter()
        .enumerate()
        .map(|(i, &t)| Ok(TemperaturePoint { t, ..local_temperature(traj.reduced(i, qubit)?, energy)? }))
        .collect()
}

/// Closed-form temperature of a qubit coupled to a single environment spin
/// (`nu = 1`, `alpha0 = 1/2`, both initially at `tau1`).
pub fn analytic_single_qubit_temperature(t: f64, e1: f64, tau1: f64) -> f64 {
    analytic_with_phase(e1, tau1, (e1 * e1 + 4.0).sqrt() * t)
}

fn analytic_with_phase(e1: f64, tau1: f64, phase: f64) -> f64 {
    let a = (1.0 / tau1).exp();
    let b = (e1 / tau1).exp();
    let d = e1 * e1 * (a + 1.0) + 2.0 * phase.cos() * (a - b) + 2.0 * (a + b) + 4.0;
    e1 / ((e1 * e1 + 4.0) * (a + 1.0) * (b + 1.0) / d - 1.0).ln()
}

/// The same expression with the cosine argument read as `sqrt(E^2 + 4 t)`.
pub fn analytic_single_qubit_temperature_literal(t: f64, e1: f64, tau1: f64) -> f64 {
    analytic_with_phase(e1, tau1, (e1 * e1 + 4.0 * t).sqrt())
}
