//! Wootters concurrence of two-qubit states.

use faer::Mat;

use crate::error::{Error, Result};
use crate::quantum::{hermitian_eigen, hermitian_eigenvalues, pauli, CMat, DensityMatrix};

/// `C = max(0, l1 - l2 - l3 - l4)` with `l_i` the decreasing square roots of
/// the eigenvalues of `rho (Y x Y) rho* (Y x Y)`, conjugation taken in the
/// computational basis.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.layout().factor_dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "concurrence needs two qubits, got factors {:?}",
            rho.layout().factor_dims()
        )));
    }
    let m = rho.matrix();
    let y = pauli::y();
    let yy = Mat::from_fn(4, 4, |i, j| y[(i / 2, j / 2)] * y[(i % 2, j % 2)]);
    let flipped: CMat = &yy * m.conjugate() * &yy;

    // sqrt(rho) rho~ sqrt(rho) is Hermitian with the same spectrum as rho rho~
    let eig = hermitian_eigen(m.as_ref())?;
    let sqrt_vals = Mat::from_fn(4, 4, |i, j| {
        if i == j {
            faer::c64::new(eig.values[i].max(0.0).sqrt(), 0.0)
        } else {
            faer::c64::new(0.0, 0.0)
        }
    });
    let sqrt_rho = &eig.vectors * sqrt_vals * eig.vectors.adjoint();
    let r = &sqrt_rho * flipped * &sqrt_rho;
    let mut l: Vec<f64> = hermitian_eigenvalues(r.as_ref()).into_iter().map(|v| v.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}
