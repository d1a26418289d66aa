//! Dense complex operators on labelled tensor-product spaces.
//!
//! Basis convention for every qubit factor: index 0 is the excited state
//! (energy `+E/2`), index 1 the ground state. Multi-factor indices are
//! row-major, so the first factor is the most significant digit.

use faer::{c64, Mat, MatRef, Side};

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-8;

pub type CMat = Mat<c64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertLayout {
    dims: Vec<usize>,
}

impl HilbertLayout {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::InvalidParameter("layout needs at least one factor".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidParameter(format!("factor dimension {d} < 2")));
        }
        Ok(Self { dims })
    }

    pub fn qubits(n: usize) -> Self {
        Self { dims: vec![2; n.max(1)] }
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn concat(&self, other: &HilbertLayout) -> HilbertLayout {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        HilbertLayout { dims }
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.dims.len() {
            return Err(Error::IndexOutOfRange { index, factors: self.dims.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Operator {
    layout: HilbertLayout,
    mat: CMat,
}

impl Operator {
    pub fn new(layout: HilbertLayout, mat: CMat) -> Result<Self> {
        let d = layout.total_dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a layout of dimension {d}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { layout, mat })
    }

    /// Wraps a square matrix as an operator on a single factor.
    pub fn from_matrix(mat: CMat) -> Result<Self> {
        let layout = HilbertLayout::new(vec![mat.nrows()])?;
        Self::new(layout, mat)
    }

    pub fn zeros(layout: HilbertLayout) -> Self {
        let d = layout.total_dim();
        Self { layout, mat: CMat::zeros(d, d) }
    }

    pub fn identity(layout: HilbertLayout) -> Self {
        let d = layout.total_dim();
        Self { layout, mat: CMat::identity(d, d) }
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    pub fn adjoint(&self) -> Operator {
        Operator { layout: self.layout.clone(), mat: self.mat.adjoint().to_owned() }
    }

    pub fn scale(&self, s: c64) -> Operator {
        Operator { layout: self.layout.clone(), mat: Mat::from_fn(self.dim(), self.dim(), |i, j| self.mat[(i, j)] * s) }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.same_layout(other)?;
        Ok(Operator { layout: self.layout.clone(), mat: &self.mat + &other.mat })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.same_layout(other)?;
        Ok(Operator { layout: self.layout.clone(), mat: &self.mat - &other.mat })
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.same_layout(other)?;
        Ok(Operator { layout: self.layout.clone(), mat: &self.mat * &other.mat })
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(self.mat.as_ref())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(self.mat.as_ref())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Same entries, relabelled onto another layout of equal total dimension.
    pub fn with_layout(self, layout: HilbertLayout) -> Result<Operator> {
        Operator::new(layout, self.mat)
    }

    fn same_layout(&self, other: &Operator) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::DimensionMismatch(format!(
                "layouts {:?} and {:?}",
                self.layout.dims, other.layout.dims
            )));
        }
        Ok(())
    }

    fn require_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        let scale = self.max_abs().max(1.0);
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(defect));
        }
        Ok(())
    }
}

/// A validated density matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    layout: HilbertLayout,
    mat: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(layout: HilbertLayout, mat: CMat) -> Result<Self> {
        let op = Operator::new(layout, mat)?;
        let herm = op.hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("hermiticity defect {herm:e}")));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = min_eigenvalue(op.mat.as_ref());
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:e}")));
        }
        Ok(Self { layout: op.layout, mat: op.mat })
    }

    pub fn from_operator(op: Operator) -> Result<Self> {
        Self::new(op.layout, op.mat)
    }

    /// Skips validation. For states produced by trusted propagators whose
    /// diagnostics are reported separately.
    pub(crate) fn new_unchecked(layout: HilbertLayout, mat: CMat) -> Self {
        Self { layout, mat }
    }

    pub fn pure(layout: HilbertLayout, psi: &[c64]) -> Result<Self> {
        let d = layout.total_dim();
        if psi.len() != d {
            return Err(Error::DimensionMismatch(format!("state vector of length {} for dimension {d}", psi.len())));
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let mat = Mat::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / (norm * norm));
        Self::new(layout, mat)
    }

    pub fn maximally_mixed(layout: HilbertLayout) -> Self {
        let d = layout.total_dim();
        let mat = Mat::from_fn(d, d, |i, j| if i == j { c64::new(1.0 / d as f64, 0.0) } else { c64::new(0.0, 0.0) });
        Self { layout, mat }
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    pub fn as_operator(&self) -> Operator {
        Operator { layout: self.layout.clone(), mat: self.mat.clone() }
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    pub fn purity(&self) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for j in 0..d {
            for i in 0..d {
                acc += self.mat[(i, j)].norm_sqr();
            }
        }
        acc
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.mat.as_ref())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(self.mat.as_ref())
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        StateDiagnostics::of(self.mat.as_ref())
    }
}

/// Per-state invariant residuals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateDiagnostics {
    pub trace_residual: f64,
    pub hermiticity: f64,
    pub min_eig: f64,
}

impl StateDiagnostics {
    pub fn of(m: MatRef<'_, c64>) -> Self {
        let tr: c64 = (0..m.nrows()).map(|i| m[(i, i)]).sum();
        Self {
            trace_residual: (tr - c64::new(1.0, 0.0)).norm(),
            hermiticity: hermiticity_defect(m),
            min_eig: min_eigenvalue(m),
        }
    }

    /// Combines two diagnostics, keeping the worst value of each field.
    pub fn worst(self, other: Self) -> Self {
        Self {
            trace_residual: self.trace_residual.max(other.trace_residual),
            hermiticity: self.hermiticity.max(other.hermiticity),
            min_eig: self.min_eig.min(other.min_eig),
        }
    }

    pub fn within(&self, trace_tol: f64, herm_tol: f64, pos_tol: f64) -> bool {
        self.trace_residual <= trace_tol && self.hermiticity <= herm_tol && self.min_eig >= -pos_tol
    }
}

pub fn max_abs(m: MatRef<'_, c64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

pub fn hermiticity_defect(m: MatRef<'_, c64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..=j.min(m.nrows().saturating_sub(1)) {
            best = best.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    best
}

/// Hermitian part `(A + A^dagger)/2`.
pub fn hermitize(m: MatRef<'_, c64>) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

pub fn hermitian_eigenvalues(m: MatRef<'_, c64>) -> Vec<f64> {
    let h = hermitize(m);
    match h.self_adjoint_eigenvalues(Side::Lower) {
        Ok(v) => v,
        Err(_) => vec![f64::NAN; m.nrows()],
    }
}

pub fn min_eigenvalue(m: MatRef<'_, c64>) -> f64 {
    hermitian_eigenvalues(m).into_iter().fold(f64::INFINITY, f64::min)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn hermitian_eigen(m: MatRef<'_, c64>) -> Result<HermitianEigen> {
    let h = hermitize(m);
    let eig = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let s = eig.S();
    let values = (0..h.nrows()).map(|i| s[i].re).collect();
    Ok(HermitianEigen { values, vectors: eig.U().to_owned() })
}

fn kron(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> CMat {
    let (ra, ca, rb, cb) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    Operator { layout: a.layout.concat(&b.layout), mat: kron(a.mat.as_ref(), b.mat.as_ref()) }
}

pub fn tensor_all(ops: &[Operator]) -> Result<Operator> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("tensor product of an empty list".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, op| tensor(&acc, op)))
}

pub fn tensor_states(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix { layout: a.layout.concat(&b.layout), mat: kron(a.mat.as_ref(), b.mat.as_ref()) }
}

pub fn tensor_states_all(states: &[DensityMatrix]) -> Result<DensityMatrix> {
    let (first, rest) = states
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("tensor product of an empty list".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, s| tensor_states(&acc, s)))
}

/// Places `op` on factor `at`, identity elsewhere.
pub fn embed(op: &CMat, at: usize, layout: &HilbertLayout) -> Result<Operator> {
    embed_many(&[(at, op)], layout)
}

/// Places each `(factor, op)` on its factor; factors must be distinct.
pub fn embed_many(ops: &[(usize, &CMat)], layout: &HilbertLayout) -> Result<Operator> {
    let mut slots: Vec<Option<&CMat>> = vec![None; layout.n_factors()];
    for &(at, op) in ops {
        layout.check_index(at)?;
        let d = layout.dims[at];
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on factor {at} of dimension {d}",
                op.nrows(),
                op.ncols()
            )));
        }
        if slots[at].is_some() {
            return Err(Error::InvalidParameter(format!("factor {at} given twice")));
        }
        slots[at] = Some(op);
    }
    let mut mat = CMat::identity(1, 1);
    for (k, slot) in slots.iter().enumerate() {
        mat = match slot {
            Some(op) => kron(mat.as_ref(), op.as_ref()),
            None => {
                let d = layout.dims[k];
                kron(mat.as_ref(), CMat::identity(d, d).as_ref())
            }
        };
    }
    Operator::new(layout.clone(), mat)
}

/// Reduced state on the factors in `keep`, which retain their original order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let (layout, mat) = partial_trace_raw(&rho.layout, rho.mat.as_ref(), keep)?;
    Ok(DensityMatrix { layout, mat })
}

pub(crate) fn partial_trace_raw(
    layout: &HilbertLayout,
    m: MatRef<'_, c64>,
    keep: &[usize],
) -> Result<(HilbertLayout, CMat)> {
    if keep.is_empty() {
        return Err(Error::InvalidParameter("partial trace with an empty keep set".into()));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &k in &sorted {
        layout.check_index(k)?;
    }
    let dims = &layout.dims;
    let n = dims.len();
    let traced: Vec<usize> = (0..n).filter(|k| !sorted.contains(k)).collect();

    let mut stride = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        stride[k] = stride[k + 1] * dims[k + 1];
    }
    let offsets = |factors: &[usize]| -> Vec<usize> {
        let total: usize = factors.iter().map(|&k| dims[k]).product();
        (0..total)
            .map(|mut idx| {
                let mut off = 0;
                for &k in factors.iter().rev() {
                    off += (idx % dims[k]) * stride[k];
                    idx /= dims[k];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&sorted);
    let traced_off = if traced.is_empty() { vec![0] } else { offsets(&traced) };

    let dk = kept_off.len();
    let mut out = CMat::zeros(dk, dk);
    for (b, &ob) in kept_off.iter().enumerate() {
        for (a, &oa) in kept_off.iter().enumerate() {
            let mut acc = c64::new(0.0, 0.0);
            for &oc in &traced_off {
                acc += m[(oa + oc, ob + oc)];
            }
            out[(a, b)] = acc;
        }
    }
    let kept_layout = HilbertLayout { dims: sorted.iter().map(|&k| dims[k]).collect() };
    Ok((kept_layout, out))
}

/// Gibbs state `exp(-beta h)/Z`. `beta = +inf` gives the ground projector.
pub fn thermal_state(h: &Operator, beta: f64) -> Result<DensityMatrix> {
    h.require_hermitian()?;
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidParameter(format!("inverse temperature {beta}")));
    }
    let eig = hermitian_eigen(h.mat.as_ref())?;
    let e0 = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = if beta.is_infinite() {
        let deg = eig.values.iter().filter(|&&e| (e - e0).abs() <= 1e-10 * e0.abs().max(1.0)).count();
        if deg > 1 {
            return Err(Error::DegenerateGround(deg));
        }
        eig.values.iter().map(|&e| if e == e0 { 1.0 } else { 0.0 }).collect()
    } else {
        let w: Vec<f64> = eig.values.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    };
    let mat = spectral_sum(&eig.vectors, |k| c64::new(weights[k], 0.0));
    Ok(DensityMatrix { layout: h.layout.clone(), mat: hermitize(mat.as_ref()) })
}

/// `exp(-i h t)` from the spectral decomposition of `h`.
pub fn unitary_propagator(h: &Operator, t: f64) -> Result<Operator> {
    h.require_hermitian()?;
    let eig = hermitian_eigen(h.mat.as_ref())?;
    let mat = spectral_sum(&eig.vectors, |k| c64::cis(-eig.values[k] * t));
    Ok(Operator { layout: h.layout.clone(), mat })
}

/// `V diag(f) V^dagger`.
fn spectral_sum(v: &CMat, f: impl Fn(usize) -> c64) -> CMat {
    let d = v.nrows();
    let scaled = Mat::from_fn(d, d, |i, k| v[(i, k)] * f(k));
    &scaled * v.adjoint()
}

pub mod pauli {
    use super::CMat;
    use faer::{c64, Mat};

    fn m2(a: [[c64; 2]; 2]) -> CMat {
        Mat::from_fn(2, 2, |i, j| a[i][j])
    }

    const O: c64 = c64 { re: 0.0, im: 0.0 };
    const I: c64 = c64 { re: 1.0, im: 0.0 };
    const J: c64 = c64 { re: 0.0, im: 1.0 };

    pub fn identity() -> CMat {
        CMat::identity(2, 2)
    }

    pub fn x() -> CMat {
        m2([[O, I], [I, O]])
    }

    pub fn y() -> CMat {
        m2([[O, -J], [J, O]])
    }

    pub fn z() -> CMat {
        m2([[I, O], [O, -I]])
    }

    /// Raising operator `|0><1|`: ground to excited.
    pub fn plus() -> CMat {
        m2([[O, I], [O, O]])
    }

    /// Lowering operator `|1><0|`: excited to ground.
    pub fn minus() -> CMat {
        m2([[O, O], [I, O]])
    }

    /// Projector onto the excited state `|0>`.
    pub fn excited() -> CMat {
        m2([[I, O], [O, O]])
    }
}

/// Computational basis ket for a bit string such as `"010"`.
pub fn basis_ket(bits: &str) -> Vec<c64> {
    let n = bits.len();
    let idx = usize::from_str_radix(bits, 2).expect("bit string");
    let mut v = vec![c64::new(0.0, 0.0); 1 << n];
    v[idx] = c64::new(1.0, 0.0);
    v
}

/// `|a><b|` for two kets of equal length.
pub fn outer(a: &[c64], b: &[c64]) -> CMat {
    Mat::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
}

pub fn apply(m: &CMat, v: &[c64]) -> Vec<c64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: MatRef<'_, c64>, b: MatRef<'_, c64>, tol: f64) -> bool {
        a.nrows() == b.nrows() && max_abs((a - b).as_ref()) <= tol
    }

    fn qubit_h(e: f64) -> Operator {
        Operator::from_matrix(Mat::from_fn(2, 2, |i, j| pauli::z()[(i, j)] * (e / 2.0))).unwrap()
    }

    #[test]
    fn identities_tensor_to_identity() {
        let i2 = Operator::identity(HilbertLayout::qubits(1));
        let i4 = tensor(&i2, &i2);
        assert_eq!(i4.layout().factor_dims(), &[2, 2]);
        assert!(close(i4.matrix().as_ref(), CMat::identity(4, 4).as_ref(), 0.0));
    }

    #[test]
    fn kronecker_spectrum_of_sigma_z() {
        let z = Operator::from_matrix(pauli::z()).unwrap();
        let i2 = Operator::identity(HilbertLayout::qubits(1));
        let mut ev = hermitian_eigenvalues(tensor(&z, &i2).matrix().as_ref());
        ev.sort_by(f64::total_cmp);
        assert_eq!(ev, vec![-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn product_of_projectors_selects_basis_index() {
        let p0 = Operator::from_matrix(outer(&basis_ket("0"), &basis_ket("0"))).unwrap();
        let p1 = Operator::from_matrix(outer(&basis_ket("1"), &basis_ket("1"))).unwrap();
        let p = tensor(&p0, &p1);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == 1 && j == 1 { 1.0 } else { 0.0 };
                assert_eq!(p.get(i, j).re, want);
            }
        }
    }

    #[test]
    fn embed_places_factor_in_order() {
        let layout = HilbertLayout::qubits(2);
        let e = embed(&pauli::z(), 0, &layout).unwrap();
        let direct = tensor(&Operator::from_matrix(pauli::z()).unwrap(), &Operator::identity(HilbertLayout::qubits(1)));
        assert!(close(e.matrix().as_ref(), direct.matrix().as_ref(), 0.0));
    }

    #[test]
    fn disjoint_embeddings_commute() {
        let layout = HilbertLayout::qubits(3);
        let a = embed(&pauli::x(), 1, &layout).unwrap();
        let b = embed(&pauli::x(), 2, &layout).unwrap();
        assert_eq!(a.commutator(&b).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn raising_maps_ground_to_excited() {
        let sp = embed(&pauli::plus(), 0, &HilbertLayout::qubits(1)).unwrap();
        let out = apply(sp.matrix(), &basis_ket("1"));
        assert_eq!(out, basis_ket("0"));
    }

    #[test]
    fn embed_rejects_bad_index() {
        let err = embed(&pauli::x(), 3, &HilbertLayout::qubits(2)).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 3, factors: 2 }));
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let a = thermal_state(&qubit_h(1.0), 0.7).unwrap();
        let b = thermal_state(&qubit_h(2.0), 1.3).unwrap();
        let ab = tensor_states(&a, &b);
        let ra = partial_trace(&ab, &[0]).unwrap();
        let rb = partial_trace(&ab, &[1]).unwrap();
        assert!(close(ra.matrix().as_ref(), a.matrix().as_ref(), 1e-15));
        assert!(close(rb.matrix().as_ref(), b.matrix().as_ref(), 1e-15));
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi: Vec<c64> = [s, 0.0, 0.0, s].iter().map(|&x| c64::new(x, 0.0)).collect();
        let bell = DensityMatrix::pure(HilbertLayout::qubits(2), &psi).unwrap();
        let half = Mat::from_fn(2, 2, |i, j| c64::new(if i == j { 0.5 } else { 0.0 }, 0.0));
        for k in 0..2 {
            let r = partial_trace(&bell, &[k]).unwrap();
            assert!(close(r.matrix().as_ref(), half.as_ref(), 1e-15));
        }
    }

    #[test]
    fn partial_trace_keeps_original_order() {
        let layout = HilbertLayout::new(vec![2, 3, 2]).unwrap();
        let h = embed_many(
            &[(0, &Mat::from_fn(2, 2, |i, j| c64::new((i + 2 * j) as f64, 0.0) + c64::new((j + 2 * i) as f64, 0.0)))],
            &layout,
        )
        .unwrap();
        let rho = thermal_state(&h, 0.3).unwrap();
        let r = partial_trace(&rho, &[2, 0]).unwrap();
        assert_eq!(r.layout().factor_dims(), &[2, 2]);
        assert!((r.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_empty_keep() {
        let rho = DensityMatrix::maximally_mixed(HilbertLayout::qubits(2));
        assert!(partial_trace(&rho, &[]).is_err());
    }

    #[test]
    fn infinite_temperature_is_maximally_mixed() {
        let h = embed(&pauli::z(), 1, &HilbertLayout::qubits(2)).unwrap();
        let rho = thermal_state(&h, 0.0).unwrap();
        let mm = DensityMatrix::maximally_mixed(HilbertLayout::qubits(2));
        assert!(close(rho.matrix().as_ref(), mm.matrix().as_ref(), 1e-15));
    }

    #[test]
    fn qubit_gibbs_weight() {
        let rho = thermal_state(&qubit_h(1.0), 1.0).unwrap();
        let want = 1.0 / (1.0 + std::f64::consts::E);
        assert!((rho.get(0, 0).re - want).abs() < 1e-15);
        assert!((want - 0.26894).abs() < 1e-5);
    }

    #[test]
    fn zero_temperature_is_ground_projector() {
        let rho = thermal_state(&qubit_h(1.0), f64::INFINITY).unwrap();
        assert!((rho.get(1, 1).re - 1.0).abs() < 1e-15);
        let degenerate = Operator::zeros(HilbertLayout::qubits(1));
        assert!(matches!(thermal_state(&degenerate, f64::INFINITY), Err(Error::DegenerateGround(2))));
    }

    #[test]
    fn large_beta_does_not_overflow() {
        let rho = thermal_state(&qubit_h(1.0), 1e4).unwrap();
        assert!(rho.get(0, 0).re.is_finite());
        assert!((rho.get(1, 1).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn thermal_state_rejects_non_hermitian() {
        let op = Operator::from_matrix(pauli::plus()).unwrap();
        assert!(matches!(thermal_state(&op, 1.0), Err(Error::NotHermitian(_))));
        assert!(matches!(unitary_propagator(&op, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let h = Operator::from_matrix(pauli::x()).unwrap();
        let u = unitary_propagator(&h, 0.0).unwrap();
        assert!(close(u.matrix().as_ref(), CMat::identity(2, 2).as_ref(), 1e-15));
    }

    #[test]
    fn propagator_group_property() {
        let h = tensor(&qubit_h(1.3), &Operator::from_matrix(pauli::x()).unwrap())
            .add(&embed(&pauli::y(), 0, &HilbertLayout::qubits(2)).unwrap())
            .unwrap();
        let u1 = unitary_propagator(&h, 0.37).unwrap();
        let u2 = unitary_propagator(&h, 1.91).unwrap();
        let u12 = unitary_propagator(&h, 0.37 + 1.91).unwrap();
        assert!(close(u1.mul(&u2).unwrap().matrix().as_ref(), u12.matrix().as_ref(), 1e-10));
        let uu = u12.mul(&u12.adjoint()).unwrap();
        assert!(close(uu.matrix().as_ref(), CMat::identity(4, 4).as_ref(), 1e-10));
    }

    #[test]
    fn sigma_x_half_pi_flips_excited_to_ground() {
        let h = Operator::from_matrix(pauli::x()).unwrap();
        let u = unitary_propagator(&h, std::f64::consts::FRAC_PI_2).unwrap();
        let out = apply(u.matrix(), &basis_ket("0"));
        assert!(out[0].norm() < 1e-15);
        assert!((out[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        let layout = HilbertLayout::qubits(1);
        let bad_trace = Mat::from_fn(2, 2, |i, j| c64::new(if i == j { 0.6 } else { 0.0 }, 0.0));
        assert!(DensityMatrix::new(layout.clone(), bad_trace).is_err());
        let negative = Mat::from_fn(2, 2, |i, j| c64::new(if i == j { [1.2, -0.2][i] } else { 0.0 }, 0.0));
        assert!(DensityMatrix::new(layout.clone(), negative).is_err());
        let non_herm = Mat::from_fn(2, 2, |i, j| c64::new(0.5, if i < j { 0.1 } else { 0.0 }) * if i == j { 1.0 } else { 0.2 });
        assert!(DensityMatrix::new(layout, non_herm).is_err());
    }

    #[test]
    fn layout_rejects_trivial_factors() {
        assert!(HilbertLayout::new(vec![2, 1]).is_err());
        assert!(HilbertLayout::new(Vec::new()).is_err());
        assert_eq!(HilbertLayout::new(vec![2, 3, 4]).unwrap().total_dim(), 24);
    }
}
