use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{partial_trace_raw, CMat, DensityMatrix, HilbertLayout, StateDiagnostics};

/// How a trajectory was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Eigendecomposition of the (block) Liouvillian.
    Spectral,
    /// Embedded Dormand-Prince 5(4) integration.
    Adaptive,
    /// Exact unitary evolution of system and environments.
    Closed,
}

/// Sampled reduced single-qubit states.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// System qubits recorded, in the order of `states[i]`.
    pub qubits: Vec<usize>,
    /// `states[i][k]`: reduced state of `qubits[k]` at `times[i]`.
    pub states: Vec<Vec<DensityMatrix>>,
    /// Invariant residuals of the propagated state at every sample.
    pub diagnostics: Vec<StateDiagnostics>,
    pub method: Method,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn slot(&self, qubit: usize) -> Result<usize> {
        self.qubits
            .iter()
            .position(|&q| q == qubit)
            .ok_or(Error::IndexOutOfRange { index: qubit, factors: self.qubits.len() })
    }

    /// Excited-state population `<0|rho_q|0>` over time.
    pub fn excited_population(&self, qubit: usize) -> Result<Vec<f64>> {
        let k = self.slot(qubit)?;
        Ok(self.states.iter().map(|s| s[k].get(0, 0).re).collect())
    }

    pub fn reduced(&self, index: usize, qubit: usize) -> Result<&DensityMatrix> {
        let k = self.slot(qubit)?;
        Ok(&self.states[index][k])
    }

    /// Largest `|rho_01|` of any recorded qubit at any sample.
    pub fn max_coherence(&self) -> f64 {
        self.states.iter().flatten().map(|r| r.get(0, 1).norm()).fold(0.0, f64::max)
    }

    /// Worst value of every diagnostic over the run.
    pub fn worst_diagnostics(&self) -> StateDiagnostics {
        self.diagnostics
            .iter()
            .copied()
            .reduce(StateDiagnostics::worst)
            .unwrap_or_default()
    }
}

/// Sample times must be finite, non-negative and strictly increasing.
pub fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidParameter("time grid must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Single-qubit reductions of a joint state onto the factors in `keep`.
pub(crate) fn reduce_all(layout: &HilbertLayout, rho: &CMat, keep: &[usize]) -> Result<Vec<DensityMatrix>> {
    keep.iter()
        .map(|&k| {
            let (l, m) = partial_trace_raw(layout, rho.as_ref(), &[k])?;
            Ok(DensityMatrix::new_unchecked(l, m))
        })
        .collect()
}
