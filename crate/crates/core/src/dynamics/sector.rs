//! Block-sparse form of a GKSL generator.
//!
//! Many generators here conserve a charge (a weighted excitation number), so
//! a state that starts block diagonal in the computational basis stays block
//! diagonal. [`BlockStructure::detect`] finds the finest such partition from
//! the sparsity of the effective Hamiltonian, the jumps and the initial
//! state; every block-diagonal operator is then stored as a flat vector of
//! row-major blocks. Without any structure the partition is a single block
//! and the representation is plain dense.

use std::collections::BTreeMap;

use faer::{c64, Mat, MatRef};

use crate::dynamics::gksl::GKSLGenerator;
use crate::error::{Error, Result};
use crate::quantum::{max_abs, CMat, StateDiagnostics};

/// Entries below this, relative to the operator scale, are structural zeros.
const STRUCTURAL_ZERO: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct BlockStructure {
    dim: usize,
    blocks: Vec<Vec<usize>>,
    /// `(block, local index)` of every basis index.
    loc: Vec<(usize, usize)>,
    offsets: Vec<usize>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

fn nonzeros(m: MatRef<'_, c64>) -> Vec<(usize, usize, c64)> {
    let cut = STRUCTURAL_ZERO * max_abs(m).max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let v = m[(r, c)];
            if v.norm() > cut {
                out.push((r, c, v));
            }
        }
    }
    out
}

impl BlockStructure {
    pub fn dense(dim: usize) -> Self {
        Self::from_blocks(dim, vec![(0..dim).collect()])
    }

    fn from_blocks(dim: usize, blocks: Vec<Vec<usize>>) -> Self {
        let mut loc = vec![(0, 0); dim];
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut off = 0;
        for (b, idx) in blocks.iter().enumerate() {
            offsets.push(off);
            off += idx.len() * idx.len();
            for (k, &i) in idx.iter().enumerate() {
                loc[i] = (b, k);
            }
        }
        offsets.push(off);
        Self { dim, blocks, loc, offsets }
    }

    /// Finest partition that is invariant under the generator and contains
    /// the support of `rho0`.
    pub fn detect(heff: &CMat, jumps: &[(f64, CMat)], rho0: &CMat) -> Self {
        let d = heff.nrows();
        let mut uf = UnionFind((0..d).collect());
        for (r, c, _) in nonzeros(heff.as_ref()).into_iter().chain(nonzeros(rho0.as_ref())) {
            uf.union(r, c);
        }
        let supports: Vec<Vec<(usize, usize, c64)>> = jumps.iter().map(|(_, l)| nonzeros(l.as_ref())).collect();
        loop {
            let mut changed = false;
            for nz in &supports {
                for &(r1, c1, _) in nz {
                    for &(r2, c2, _) in nz {
                        if uf.find(c1) == uf.find(c2) && uf.union(r1, r2) {
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..d {
            let root = uf.find(i);
            groups.entry(root).or_default().push(i);
        }
        Self::from_blocks(d, groups.into_values().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Length of the flat block vector.
    pub fn sector_dim(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    fn flat_index(&self, r: usize, c: usize) -> Option<usize> {
        let (br, ir) = self.loc[r];
        let (bc, ic) = self.loc[c];
        (br == bc).then(|| self.offsets[br] + ir * self.blocks[br].len() + ic)
    }

    /// Largest entry of `m` outside the block pattern.
    pub fn leakage(&self, m: &CMat) -> f64 {
        let mut worst = 0.0f64;
        for c in 0..self.dim {
            for r in 0..self.dim {
                if self.flat_index(r, c).is_none() {
                    worst = worst.max(m[(r, c)].norm());
                }
            }
        }
        worst
    }

    pub fn pack(&self, m: &CMat) -> Vec<c64> {
        let mut v = vec![c64::new(0.0, 0.0); self.sector_dim()];
        for (b, idx) in self.blocks.iter().enumerate() {
            let n = idx.len();
            for (i, &r) in idx.iter().enumerate() {
                for (j, &c) in idx.iter().enumerate() {
                    v[self.offsets[b] + i * n + j] = m[(r, c)];
                }
            }
        }
        v
    }

    pub fn unpack(&self, v: &[c64]) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for (b, idx) in self.blocks.iter().enumerate() {
            let n = idx.len();
            for (i, &r) in idx.iter().enumerate() {
                for (j, &c) in idx.iter().enumerate() {
                    m[(r, c)] = v[self.offsets[b] + i * n + j];
                }
            }
        }
        m
    }

    fn block<'a>(&self, v: &'a [c64], b: usize) -> MatRef<'a, c64> {
        let n = self.blocks[b].len();
        MatRef::from_row_major_slice(&v[self.offsets[b]..self.offsets[b + 1]], n, n)
    }

    pub fn trace(&self, v: &[c64]) -> c64 {
        let mut acc = c64::new(0.0, 0.0);
        for (b, idx) in self.blocks.iter().enumerate() {
            let n = idx.len();
            for i in 0..n {
                acc += v[self.offsets[b] + i * n + i];
            }
        }
        acc
    }

    /// Invariant residuals of a packed state, block by block.
    pub fn diagnostics(&self, v: &[c64]) -> StateDiagnostics {
        let mut diag = StateDiagnostics { trace_residual: 0.0, hermiticity: 0.0, min_eig: f64::INFINITY };
        for b in 0..self.n_blocks() {
            let s = StateDiagnostics::of(self.block(v, b));
            diag.hermiticity = diag.hermiticity.max(s.hermiticity);
            diag.min_eig = diag.min_eig.min(s.min_eig);
        }
        diag.trace_residual = (self.trace(v) - c64::new(1.0, 0.0)).norm();
        diag
    }
}

/// One entry of the dissipative sandwich `sum_k gamma_k L_k X L_k^dagger`:
/// `out[target] += coef * in[source]` in flat block coordinates.
#[derive(Debug, Clone, Copy)]
struct SandwichEntry {
    target: u32,
    source: u32,
    coef: c64,
}

/// A GKSL generator in block-sparse form.
#[derive(Debug, Clone)]
pub struct BlockGenerator {
    structure: BlockStructure,
    /// `-i H_eff` restricted to each block.
    a_blocks: Vec<CMat>,
    sandwich: Vec<SandwichEntry>,
}

impl BlockGenerator {
    /// Builds the block form of `gen` adapted to the initial state `rho0`.
    pub fn new(gen: &GKSLGenerator, rho0: &CMat) -> Result<Self> {
        let heff = gen.effective_hamiltonian();
        let jumps: Vec<(f64, CMat)> = gen.active_jumps().map(|j| (j.rate, j.op.matrix().clone())).collect();
        let structure = BlockStructure::detect(&heff, &jumps, rho0);
        Self::with_structure(structure, &heff, &jumps)
    }

    /// Same generator, stored densely.
    pub fn dense(gen: &GKSLGenerator) -> Result<Self> {
        let heff = gen.effective_hamiltonian();
        let jumps: Vec<(f64, CMat)> = gen.active_jumps().map(|j| (j.rate, j.op.matrix().clone())).collect();
        Self::with_structure(BlockStructure::dense(gen.dim()), &heff, &jumps)
    }

    fn with_structure(structure: BlockStructure, heff: &CMat, jumps: &[(f64, CMat)]) -> Result<Self> {
        let a_blocks = structure
            .blocks
            .iter()
            .map(|idx| Mat::from_fn(idx.len(), idx.len(), |i, j| heff[(idx[i], idx[j])] * c64::new(0.0, -1.0)))
            .collect();

        let mut acc: BTreeMap<(u32, u32), c64> = BTreeMap::new();
        for (rate, l) in jumps {
            let nz = nonzeros(l.as_ref());
            for &(r1, c1, v1) in &nz {
                for &(r2, c2, v2) in &nz {
                    let Some(source) = structure.flat_index(c1, c2) else { continue };
                    let target = structure.flat_index(r1, r2).ok_or_else(|| {
                        Error::Decomposition("jump operator does not respect the block structure".into())
                    })?;
                    *acc.entry((target as u32, source as u32)).or_insert(c64::new(0.0, 0.0)) += v1 * v2.conj() * *rate;
                }
            }
        }
        let sandwich = acc.into_iter().map(|((target, source), coef)| SandwichEntry { target, source, coef }).collect();
        Ok(Self { structure, a_blocks, sandwich })
    }

    pub fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    pub fn sector_dim(&self) -> usize {
        self.structure.sector_dim()
    }

    /// Generator applied to a Hermitian packed state.
    pub fn apply_hermitian(&self, x: &[c64], out: &mut [c64]) {
        let s = &self.structure;
        for (b, a) in self.a_blocks.iter().enumerate() {
            let n = a.nrows();
            let off = s.offsets[b];
            let p = a * s.block(x, b);
            for i in 0..n {
                for j in 0..n {
                    out[off + i * n + j] = p[(i, j)] + p[(j, i)].conj();
                }
            }
        }
        for e in &self.sandwich {
            out[e.target as usize] += e.coef * x[e.source as usize];
        }
    }

    /// Generator applied to an arbitrary packed operator.
    pub fn apply(&self, x: &[c64], out: &mut [c64]) {
        let s = &self.structure;
        for (b, a) in self.a_blocks.iter().enumerate() {
            let n = a.nrows();
            let off = s.offsets[b];
            let xb = s.block(x, b);
            let p = a * xb;
            let q = xb * a.adjoint();
            for i in 0..n {
                for j in 0..n {
                    out[off + i * n + j] = p[(i, j)] + q[(i, j)];
                }
            }
        }
        for e in &self.sandwich {
            out[e.target as usize] += e.coef * x[e.source as usize];
        }
    }

    /// Matrix of the generator on the packed (row-major block) space.
    pub fn superoperator(&self) -> CMat {
        let s = &self.structure;
        let n_s = s.sector_dim();
        let mut sup = CMat::zeros(n_s, n_s);
        for (b, a) in self.a_blocks.iter().enumerate() {
            let n = a.nrows();
            let off = s.offsets[b];
            for i in 0..n {
                for j in 0..n {
                    let row = off + i * n + j;
                    for k in 0..n {
                        sup[(row, off + k * n + j)] += a[(i, k)];
                        sup[(row, off + i * n + k)] += a[(j, k)].conj();
                    }
                }
            }
        }
        for e in &self.sandwich {
            sup[(e.target as usize, e.source as usize)] += e.coef;
        }
        sup
    }
}
