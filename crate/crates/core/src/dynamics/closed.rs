//! Exact unitary evolution of a system together with its finite environments.
//!
//! With `H = V diag(lambda) V^dagger` and `rho~ = V^dagger rho0 V`, the
//! expectation of an observable `M` is `a^dagger W a` where
//! `W = M~^T o rho~` (entrywise product) and `a_j = exp(i lambda_j t)`. Many
//! times are evaluated at once as a matrix product.

use faer::{c64, Mat};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantum::{embed, hermitian_eigen, CMat, DensityMatrix, HilbertLayout, Operator, StateDiagnostics};

/// Times evaluated per matrix product.
const CHUNK: usize = 256;

#[derive(Debug, Clone)]
pub struct ClosedEvolution {
    layout: HilbertLayout,
    values: Vec<f64>,
    vectors: CMat,
    rho_tilde: CMat,
    keep: Vec<usize>,
    weights: Vec<QubitWeights>,
}

/// Weight matrices for the entries `rho_00`, `rho_11`, `rho_01` of one
/// reduced qubit.
#[derive(Debug, Clone)]
struct QubitWeights {
    w00: CMat,
    w11: CMat,
    w01: CMat,
}

impl ClosedEvolution {
    /// Diagonalises `h` and prepares the reduced observables of the qubits in `keep`.
    pub fn new(h: &Operator, rho0: &DensityMatrix, keep: &[usize]) -> Result<Self> {
        if h.layout() != rho0.layout() {
            return Err(Error::DimensionMismatch(format!(
                "Hamiltonian on {:?}, state on {:?}",
                h.layout().factor_dims(),
                rho0.layout().factor_dims()
            )));
        }
        let defect = h.hermiticity_defect();
        if defect > 1e-10 * h.max_abs().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        if keep.is_empty() {
            return Err(Error::InvalidParameter("no qubits to track".into()));
        }
        let eig = hermitian_eigen(h.matrix().as_ref())?;
        let rho_tilde = eig.vectors.adjoint() * rho0.matrix() * &eig.vectors;
        let mut evo = Self {
            layout: h.layout().clone(),
            values: eig.values,
            vectors: eig.vectors,
            rho_tilde,
            keep: keep.to_vec(),
            weights: Vec::new(),
        };
        evo.weights = keep.iter().map(|&q| evo.qubit_weights(q)).collect::<Result<_>>()?;
        Ok(evo)
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn keep(&self) -> &[usize] {
        &self.keep
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Full joint state at time `t`.
    pub fn state_at(&self, t: f64) -> Result<DensityMatrix> {
        let d = self.dim();
        let phased = Mat::from_fn(d, d, |j, k| {
            self.rho_tilde[(j, k)] * c64::from_polar(1.0, -(self.values[j] - self.values[k]) * t)
        });
        let m = &self.vectors * phased * self.vectors.adjoint();
        Ok(DensityMatrix::new_unchecked(self.layout.clone(), crate::quantum::hermitize(m.as_ref())))
    }

    fn weights(&self, op: &CMat) -> CMat {
        let m = self.vectors.adjoint() * op * &self.vectors;
        Mat::from_fn(self.dim(), self.dim(), |j, k| m[(k, j)] * self.rho_tilde[(j, k)])
    }

    fn qubit_weights(&self, qubit: usize) -> Result<QubitWeights> {
        if self.layout.factor_dims().get(qubit) != Some(&2) {
            return Err(Error::IndexOutOfRange { index: qubit, factors: self.layout.n_factors() });
        }
        let unit = |r: usize, c: usize| Mat::from_fn(2, 2, |i, j| c64::new(((i, j) == (r, c)) as u8 as f64, 0.0));
        let op = |r, c| -> Result<CMat> { Ok(embed(&unit(r, c), qubit, &self.layout)?.into_matrix()) };
        Ok(QubitWeights {
            w00: self.weights(&op(0, 0)?),
            w11: self.weights(&op(1, 1)?),
            // Tr(rho |1><0|) = rho_01
            w01: self.weights(&op(1, 0)?),
        })
    }

    /// Reduced states of the tracked qubits at every time, with diagnostics
    /// read from those reduced states.
    pub fn reduced_series(&self, times: &[f64]) -> (Vec<Vec<DensityMatrix>>, Vec<StateDiagnostics>) {
        let weights = &self.weights;
        let d = self.dim();
        let chunks: Vec<Vec<Vec<[c64; 3]>>> = times
            .par_chunks(CHUNK)
            .map(|ts| {
                let a = Mat::from_fn(d, ts.len(), |j, c| c64::from_polar(1.0, self.values[j] * ts[c]));
                let quad = |w: &CMat| -> Vec<c64> {
                    let b = w * &a;
                    (0..ts.len()).map(|c| (0..d).map(|j| a[(j, c)].conj() * b[(j, c)]).sum()).collect()
                };
                weights
                    .iter()
                    .map(|w| {
                        let (p0, p1, s) = (quad(&w.w00), quad(&w.w11), quad(&w.w01));
                        (0..ts.len()).map(|c| [p0[c], p1[c], s[c]]).collect()
                    })
                    .collect()
            })
            .collect();

        let one = HilbertLayout::qubits(1);
        let mut states = Vec::with_capacity(times.len());
        let mut diags = Vec::with_capacity(times.len());
        for chunk in &chunks {
            for c in 0..chunk[0].len() {
                let mut row = Vec::with_capacity(self.keep.len());
                let mut diag: Option<StateDiagnostics> = None;
                for per_qubit in chunk {
                    let [p0, p1, s] = per_qubit[c];
                    let m = Mat::from_fn(2, 2, |i, j| match (i, j) {
                        (0, 0) => c64::new(p0.re, 0.0),
                        (1, 1) => c64::new(p1.re, 0.0),
                        (0, 1) => s,
                        _ => s.conj(),
                    });
                    let mut dg = StateDiagnostics::of(m.as_ref());
                    // the imaginary parts of the populations measure round-off
                    dg.hermiticity = dg.hermiticity.max(p0.im.abs()).max(p1.im.abs());
                    diag = Some(diag.map_or(dg, |x| x.worst(dg)));
                    row.push(DensityMatrix::new_unchecked(one.clone(), m));
                }
                states.push(row);
                diags.push(diag.unwrap_or_default());
            }
        }
        (states, diags)
    }

    /// Reduced states of the tracked qubits at a single time.
    pub fn reduced_at(&self, t: f64) -> Vec<DensityMatrix> {
        let (mut s, _) = self.reduced_series(&[t]);
        s.pop().unwrap_or_default()
    }
}
