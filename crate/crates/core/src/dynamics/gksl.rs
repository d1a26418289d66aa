//! Dense GKSL generator: reference right-hand side, Liouvillian matrix and
//! steady state.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::model::JumpTerm;
use crate::quantum::{hermitize, max_abs, CMat, DensityMatrix, Operator};

/// Eigenvalues closer than this to zero count towards the null space.
pub const NULL_EIGENVALUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct GKSLGenerator {
    pub h: Operator,
    pub jumps: Vec<JumpTerm>,
}

impl GKSLGenerator {
    pub fn new(h: Operator, jumps: Vec<JumpTerm>) -> Result<Self> {
        let defect = h.hermiticity_defect();
        if defect > 1e-10 * h.max_abs().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        for j in &jumps {
            if j.op.layout() != h.layout() {
                return Err(Error::DimensionMismatch(format!(
                    "jump on {:?} for a Hamiltonian on {:?}",
                    j.op.layout().factor_dims(),
                    h.layout().factor_dims()
                )));
            }
            if !(j.rate >= 0.0) {
                return Err(Error::InvalidParameter(format!("jump rate {}", j.rate)));
            }
        }
        Ok(Self { h, jumps })
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// Jumps with a strictly positive rate.
    pub fn active_jumps(&self) -> impl Iterator<Item = &JumpTerm> {
        self.jumps.iter().filter(|j| j.rate > 0.0)
    }

    /// `H - (i/2) sum_k gamma_k L_k^dagger L_k`.
    pub fn effective_hamiltonian(&self) -> CMat {
        let mut heff = self.h.matrix().clone();
        for j in self.active_jumps() {
            let l = j.op.matrix();
            let ldl = l.adjoint() * l;
            heff -= ldl * faer::Scale(c64::new(0.0, 0.5 * j.rate));
        }
        heff
    }

    /// Appends further jump terms on the same space.
    pub fn with_jumps(mut self, extra: Vec<JumpTerm>) -> Result<Self> {
        self.jumps.extend(extra);
        Self::new(self.h, self.jumps)
    }
}

/// `-i[H, rho] + sum_k gamma_k (L rho L^dagger - {L^dagger L, rho}/2)`.
pub fn gksl_rhs(gen: &GKSLGenerator, rho: &CMat) -> Result<CMat> {
    let d = gen.dim();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch(format!("{}x{} state for a generator of dimension {d}", rho.nrows(), rho.ncols())));
    }
    let h = gen.h.matrix();
    let mut out = (h * rho - rho * h) * faer::Scale(c64::new(0.0, -1.0));
    for j in gen.active_jumps() {
        let l = j.op.matrix();
        let ldl = l.adjoint() * l;
        let term = l * rho * l.adjoint() - (&ldl * rho + rho * &ldl) * faer::Scale(c64::new(0.5, 0.0));
        out += term * faer::Scale(c64::new(j.rate, 0.0));
    }
    Ok(out)
}

/// Column-stacking superoperator: `vec(A X B) = (B^T kron A) vec(X)`.
pub fn liouvillian(gen: &GKSLGenerator) -> CMat {
    let d = gen.dim();
    let n = d * d;
    let mut sup = CMat::zeros(n, n);
    let heff = gen.effective_hamiltonian();
    let a = Mat::from_fn(d, d, |i, j| heff[(i, j)] * c64::new(0.0, -1.0));
    // A X + X A^dagger
    for q in 0..d {
        for p in 0..d {
            let row = p + q * d;
            for k in 0..d {
                sup[(row, k + q * d)] += a[(p, k)];
                sup[(row, p + k * d)] += a[(q, k)].conj();
            }
        }
    }
    for j in gen.active_jumps() {
        let l = j.op.matrix();
        let nz: Vec<(usize, usize, c64)> = (0..d)
            .flat_map(|c| (0..d).map(move |r| (r, c)))
            .filter_map(|(r, c)| {
                let v = l[(r, c)];
                (v != c64::new(0.0, 0.0)).then_some((r, c, v))
            })
            .collect();
        for &(r1, c1, v1) in &nz {
            for &(r2, c2, v2) in &nz {
                sup[(r1 + r2 * d, c1 + c2 * d)] += v1 * v2.conj() * j.rate;
            }
        }
    }
    sup
}

pub fn vectorize(m: &CMat) -> Vec<c64> {
    let d = m.nrows();
    (0..d * d).map(|k| m[(k % d, k / d)]).collect()
}

pub fn unvectorize(v: &[c64], d: usize) -> CMat {
    Mat::from_fn(d, d, |i, j| v[i + j * d])
}

/// Eigenvalues of the Liouvillian.
pub fn liouvillian_spectrum(gen: &GKSLGenerator) -> Result<Vec<c64>> {
    liouvillian(gen).eigenvalues().map_err(|e| Error::Decomposition(format!("{e:?}")))
}

/// Dimension of the (numerical) null space of the Liouvillian.
pub fn null_space_dimension(gen: &GKSLGenerator) -> Result<usize> {
    Ok(liouvillian_spectrum(gen)?.iter().filter(|z| z.norm() < NULL_EIGENVALUE_TOL).count())
}

/// The unique stationary state; errors when the null space is degenerate.
pub fn steady_state(gen: &GKSLGenerator) -> Result<DensityMatrix> {
    let d = gen.dim();
    let nulls = null_space_dimension(gen)?;
    if nulls != 1 {
        return Err(Error::DegenerateSteadyState(nulls));
    }
    // replace one equation by the trace condition
    let mut sup = liouvillian(gen);
    let n = d * d;
    for c in 0..n {
        sup[(0, c)] = c64::new(0.0, 0.0);
    }
    for i in 0..d {
        sup[(0, i + i * d)] = c64::new(1.0, 0.0);
    }
    let mut rhs = CMat::zeros(n, 1);
    rhs[(0, 0)] = c64::new(1.0, 0.0);
    let x = sup.partial_piv_lu().solve(&rhs);
    let v: Vec<c64> = (0..n).map(|k| x[(k, 0)]).collect();
    let mut rho = hermitize(unvectorize(&v, d).as_ref());
    let tr: c64 = (0..d).map(|i| rho[(i, i)]).sum();
    rho *= faer::Scale(c64::new(1.0 / tr.re, 0.0));
    let residual = max_abs(gksl_rhs(gen, &rho)?.as_ref());
    if residual > 1e-10 {
        return Err(Error::Decomposition(format!("stationary residual {residual:e}")));
    }
    DensityMatrix::new(gen.h.layout().clone(), rho)
}
