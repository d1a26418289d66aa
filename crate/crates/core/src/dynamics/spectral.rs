//! Exact propagation through the eigendecomposition of a block generator.

use faer::linalg::solvers::DenseSolveCore;
use faer::{c64, Mat};

use crate::dynamics::sector::BlockGenerator;
use crate::error::{Error, Result};
use crate::quantum::CMat;

/// Beyond this eigenvector condition number the generator is treated as
/// numerically defective.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    values: Vec<c64>,
    vectors: CMat,
    coeffs: Vec<c64>,
    condition: f64,
}

fn frobenius(m: &CMat) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

impl SpectralPropagator {
    /// Diagonalises the generator and expands `x0` in its eigenvectors.
    /// Returns `None` when the eigenvector matrix is too ill-conditioned.
    pub fn new(gen: &BlockGenerator, x0: &[c64], max_condition: f64) -> Result<Option<Self>> {
        let sup = gen.superoperator();
        let n = sup.nrows();
        if x0.len() != n {
            return Err(Error::DimensionMismatch(format!("packed state of length {} for sector dimension {n}", x0.len())));
        }
        let eig = sup.eigen().map_err(|e| Error::Decomposition(format!("{e:?}")))?;
        let vectors = eig.U().to_owned();
        let s = eig.S();
        let values: Vec<c64> = (0..n).map(|i| s[i]).collect();
        let inv = vectors.partial_piv_lu().inverse();
        let condition = frobenius(&vectors) * frobenius(&inv) / n as f64;
        if !condition.is_finite() || condition > max_condition {
            return Ok(None);
        }
        let x = Mat::from_fn(n, 1, |i, _| x0[i]);
        let c = &inv * &x;
        let coeffs = (0..n).map(|i| c[(i, 0)]).collect();
        Ok(Some(Self { values, vectors, coeffs, condition }))
    }

    /// Eigenvector condition estimate `||V||_F ||V^-1||_F / n`.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn eigenvalues(&self) -> &[c64] {
        &self.values
    }

    /// Packed state at time `t`.
    pub fn state_at(&self, t: f64) -> Vec<c64> {
        let n = self.values.len();
        let w: Vec<c64> = self.values.iter().zip(&self.coeffs).map(|(l, c)| (*l * t).exp() * c).collect();
        let mut out = vec![c64::new(0.0, 0.0); n];
        for (k, wk) in w.iter().enumerate() {
            if wk.norm() == 0.0 {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.vectors[(i, k)] * wk;
            }
        }
        out
    }
}
