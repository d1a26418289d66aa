//! Lindblad jump operators: the tabulated refrigerator and noise sets, and a
//! generic eigenoperator decomposition used to build and cross-check them.

use std::fmt;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::rates::{decay_rate, MarkovianEnv};
use crate::quantum::{basis_ket, embed, hermitian_eigen, max_abs, outer, pauli, CMat, HilbertLayout, Operator};

/// Gaps closer than this are treated as one transition frequency.
pub const GAP_MERGE_TOL: f64 = 1e-9;

/// Matrix entries below this (relative to the largest entry) are flushed to zero.
const FLUSH_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseAxis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    /// Thermal bath attached to the given qubit (0-based).
    Bath(usize),
    NoiseI,
    NoiseII(NoiseAxis),
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::Bath(i) => write!(f, "bath{}", i + 1),
            Channel::NoiseI => write!(f, "noise-I"),
            Channel::NoiseII(a) => write!(f, "noise-II-{a:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseModel {
    I,
    II,
}

impl std::str::FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(NoiseModel::I),
            "II" | "2" => Ok(NoiseModel::II),
            other => Err(Error::Config(format!("unknown noise model `{other}` (expected I or II)"))),
        }
    }
}

/// A jump operator with its transition frequency and rate.
#[derive(Debug, Clone)]
pub struct JumpTerm {
    pub op: Operator,
    pub freq: f64,
    pub rate: f64,
    pub channel: Channel,
}

impl JumpTerm {
    pub fn new(op: Operator, freq: f64, rate: f64, channel: Channel) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!("negative or non-finite jump rate {rate}")));
        }
        if op.max_abs() == 0.0 {
            return Err(Error::InvalidParameter("zero jump operator".into()));
        }
        Ok(Self { op, freq, rate, channel })
    }

    /// Partner term at `-freq` with the adjoint operator.
    pub fn reversed(&self) -> JumpTerm {
        JumpTerm { op: self.op.adjoint(), freq: -self.freq, rate: self.rate, channel: self.channel }
    }
}

/// Fills in `rate = strength * gamma(freq)` for every term.
pub fn assign_rates(terms: &mut [JumpTerm], env: &MarkovianEnv, strength: f64) -> Result<()> {
    if !(strength >= 0.0 && strength.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise strength {strength}")));
    }
    for t in terms.iter_mut() {
        t.rate = strength * decay_rate(t.freq, env)?;
    }
    Ok(())
}

fn flush(m: &mut CMat) {
    let cut = FLUSH_TOL * max_abs(m.as_ref());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            let re = if z.re.abs() <= cut { 0.0 } else { z.re };
            let im = if z.im.abs() <= cut { 0.0 } else { z.im };
            m[(i, j)] = c64::new(re, im);
        }
    }
}

/// Eigenoperator decomposition of `coupling` with respect to `h`.
///
/// For every distinct gap `w = e' - e` the term is `sum P(e) A P(e')` over
/// all eigenprojector pairs with that gap; numerically zero terms are
/// dropped. Rates are left at zero. Terms come out sorted by frequency.
pub fn derive_jump_operators(h: &Operator, coupling: &Operator, channel: Channel) -> Result<Vec<JumpTerm>> {
    if h.layout() != coupling.layout() {
        return Err(Error::DimensionMismatch("Hamiltonian and coupling live on different spaces".into()));
    }
    if !h.is_hermitian(1e-10 * h.max_abs().max(1.0)) {
        return Err(Error::NotHermitian(h.hermiticity_defect()));
    }
    let d = h.dim();
    let eig = hermitian_eigen(h.matrix().as_ref())?;

    // cluster the (ascending) eigenvalues into levels
    let mut levels: Vec<(f64, Vec<usize>)> = Vec::new();
    for (k, &e) in eig.values.iter().enumerate() {
        match levels.last_mut() {
            Some((e0, idx)) if (e - *e0).abs() <= GAP_MERGE_TOL => idx.push(k),
            _ => levels.push((e, vec![k])),
        }
    }
    let projectors: Vec<CMat> = levels
        .iter()
        .map(|(_, idx)| {
            let v = Mat::from_fn(d, idx.len(), |i, c| eig.vectors[(i, idx[c])]);
            &v * v.adjoint()
        })
        .collect();

    let a = coupling.matrix();
    let mut terms: Vec<(f64, CMat)> = Vec::new();
    for (k, pk) in projectors.iter().enumerate() {
        let left = pk * a;
        for (l, pl) in projectors.iter().enumerate() {
            let w = levels[l].0 - levels[k].0;
            let piece = &left * pl;
            match terms.iter_mut().find(|(w0, _)| (w0 - w).abs() <= GAP_MERGE_TOL) {
                Some((_, acc)) => *acc += &piece,
                None => terms.push((w, piece)),
            }
        }
    }

    let scale = max_abs(a.as_ref()).max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for (w, mut m) in terms {
        if max_abs(m.as_ref()) <= 1e-10 * scale {
            continue;
        }
        flush(&mut m);
        let w = if w.abs() <= GAP_MERGE_TOL { 0.0 } else { w };
        out.push(JumpTerm { op: Operator::new(h.layout().clone(), m)?, freq: w, rate: 0.0, channel });
    }
    out.sort_by(|x, y| x.freq.total_cmp(&y.freq));
    Ok(out)
}

/// Kets of the three-qubit computational basis plus the symbols `+` and `-`
/// for `(|101> +- |010>)/sqrt 2`.
fn ket3(label: &str) -> Vec<c64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match label {
        "+" | "-" => {
            let sign = if label == "+" { 1.0 } else { -1.0 };
            let (a, b) = (basis_ket("101"), basis_ket("010"));
            a.iter().zip(&b).map(|(x, y)| (x + y * sign) * s).collect()
        }
        bits => basis_ket(bits),
    }
}

fn ketbra_sum(terms: &[(f64, &str, &str)]) -> CMat {
    let mut m = CMat::zeros(8, 8);
    for &(c, ket, bra) in terms {
        m += outer(&ket3(ket), &ket3(bra)) * faer::Scale(c64::new(c, 0.0));
    }
    m
}

/// `(coefficient, ket, bra)` terms of one operator, keyed by frequency.
type KetBraTable<'a> = Vec<(f64, Vec<(f64, &'a str, &'a str)>)>;

/// The tabulated jump operators of one thermal channel of the three-qubit
/// refrigerator at positive frequencies `E_i`, `E_i + g`, `E_i - g`.
fn tabulated_positive(channel: usize, energies: [f64; 3], g: f64) -> Result<Vec<(f64, CMat)>> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let e = energies;
    let table: KetBraTable = match channel {
        0 => vec![
            (e[0], vec![(1.0, "111", "011"), (1.0, "100", "000")]),
            (e[0] + g, vec![(r, "110", "+"), (r, "-", "001")]),
            (e[0] - g, vec![(r, "+", "001"), (-r, "110", "-")]),
        ],
        1 => vec![
            (e[1], vec![(1.0, "110", "100"), (1.0, "011", "001")]),
            (e[1] + g, vec![(r, "111", "+"), (-r, "-", "000")]),
            (e[1] - g, vec![(r, "+", "000"), (r, "111", "-")]),
        ],
        2 => vec![
            (e[2], vec![(1.0, "111", "110"), (1.0, "001", "000")]),
            (e[2] + g, vec![(r, "011", "+"), (r, "-", "100")]),
            (e[2] - g, vec![(r, "+", "100"), (-r, "011", "-")]),
        ],
        other => return Err(Error::IndexOutOfRange { index: other, factors: 3 }),
    };
    Ok(table.into_iter().map(|(w, t)| (w, ketbra_sum(&t))).collect())
}

fn with_adjoints(positive: Vec<(f64, CMat)>, channel: Channel) -> Result<Vec<JumpTerm>> {
    let layout = HilbertLayout::qubits(3);
    let mut out = Vec::with_capacity(2 * positive.len());
    for (w, m) in positive {
        let t = JumpTerm { op: Operator::new(layout.clone(), m)?, freq: w, rate: 0.0, channel };
        out.push(t.reversed());
        out.push(t);
    }
    out.sort_by(|x, y| x.freq.total_cmp(&y.freq));
    Ok(out)
}

/// The tabulated three-qubit jump set for all three thermal channels:
/// nine operators and their adjoints at negated frequencies. Rates are zero.
pub fn tabulated_jump_set(e1: f64, e2: f64, e3: f64, g: f64) -> Result<Vec<JumpTerm>> {
    let mut out = Vec::new();
    for ch in 0..3 {
        out.extend(tabulated_channel(ch, [e1, e2, e3], g)?);
    }
    Ok(out)
}

/// Tabulated operators of one thermal channel (six terms, rates zero).
pub fn tabulated_channel(channel: usize, energies: [f64; 3], g: f64) -> Result<Vec<JumpTerm>> {
    with_adjoints(tabulated_positive(channel, energies, g)?, Channel::Bath(channel))
}

/// Noise jump terms acting on the cold qubit of the three-qubit refrigerator.
///
/// Model I is amplitude damping through the cold-qubit channel. Model II
/// adds the `i`-rotated copy of that channel and a dephasing channel with
/// terms at `0` and `+-2g`. Rates are `strength * gamma(freq)` of `noise_env`.
pub fn noise_jump_set(
    model: NoiseModel,
    energies: [f64; 3],
    g: f64,
    noise_env: &MarkovianEnv,
    strength: f64,
) -> Result<Vec<JumpTerm>> {
    noise_env.validate()?;
    let cold = tabulated_positive(0, energies, g)?;
    let mut terms = match model {
        NoiseModel::I => with_adjoints(cold, Channel::NoiseI)?,
        NoiseModel::II => {
            let mut v = with_adjoints(cold.clone(), Channel::NoiseII(NoiseAxis::X))?;
            let rotated = cold.into_iter().map(|(w, m)| (w, m * faer::Scale(c64::new(0.0, 1.0)))).collect();
            v.extend(with_adjoints(rotated, Channel::NoiseII(NoiseAxis::Y))?);
            v.extend(dephasing_terms(g)?);
            v
        }
    };
    assign_rates(&mut terms, noise_env, strength)?;
    Ok(terms)
}

fn dephasing_terms(g: f64) -> Result<Vec<JumpTerm>> {
    let z = Channel::NoiseII(NoiseAxis::Z);
    let layout = HilbertLayout::qubits(3);
    let l0 = ketbra_sum(&[
        (1.0, "000", "000"),
        (1.0, "001", "001"),
        (1.0, "011", "011"),
        (-1.0, "100", "100"),
        (-1.0, "110", "110"),
        (-1.0, "111", "111"),
    ]);
    let up = ketbra_sum(&[(-1.0, "-", "+")]);
    let down = ketbra_sum(&[(-1.0, "+", "-")]);
    Ok(vec![
        JumpTerm { op: Operator::new(layout.clone(), down)?, freq: -2.0 * g, rate: 0.0, channel: z },
        JumpTerm { op: Operator::new(layout.clone(), l0)?, freq: 0.0, rate: 0.0, channel: z },
        JumpTerm { op: Operator::new(layout, up)?, freq: 2.0 * g, rate: 0.0, channel: z },
    ])
}

/// Derived thermal jump set for a bath coupled through `sigma_x` of `qubit`.
pub fn thermal_bath_jumps(h_sys: &Operator, qubit: usize, env: &MarkovianEnv) -> Result<Vec<JumpTerm>> {
    let coupling = embed(&pauli::x(), qubit, h_sys.layout())?;
    let mut terms = derive_jump_operators(h_sys, &coupling, Channel::Bath(qubit))?;
    assign_rates(&mut terms, env, 1.0)?;
    Ok(terms)
}

/// True when `a = e^{i phi} b` for some phase, to tolerance `tol`.
pub fn equal_up_to_phase(a: &CMat, b: &CMat, tol: f64) -> bool {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return false;
    }
    let mut best = (0, 0, 0.0);
    for j in 0..b.ncols() {
        for i in 0..b.nrows() {
            let n = b[(i, j)].norm();
            if n > best.2 {
                best = (i, j, n);
            }
        }
    }
    if best.2 == 0.0 {
        return max_abs(a.as_ref()) <= tol;
    }
    let phase = a[(best.0, best.1)] / b[(best.0, best.1)];
    if (phase.norm() - 1.0).abs() > tol {
        return false;
    }
    let diff = Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] - b[(i, j)] * phase);
    max_abs(diff.as_ref()) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::hamiltonian::build_three_qubit_hamiltonian;
    use crate::model::rates::ZeroFrequencyPolicy;
    use crate::quantum::apply;

    const E: [f64; 3] = [1.0, 2.0, 1.0];
    const G: f64 = 0.8;

    fn h3() -> Operator {
        build_three_qubit_hamiltonian(E[0], E[1], E[2], G).unwrap()
    }

    fn find(set: &[JumpTerm], ch: Channel, w: f64) -> &JumpTerm {
        set.iter().find(|t| t.channel == ch && (t.freq - w).abs() < 1e-12).expect("term present")
    }

    fn close(a: &[c64], b: &[c64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-14)
    }

    #[test]
    fn cold_channel_lowering_action() {
        let set = tabulated_jump_set(1.0, 2.0, 1.0, G).unwrap();
        let l = find(&set, Channel::Bath(0), 1.0);
        assert!(close(&apply(l.op.matrix(), &basis_ket("011")), &basis_ket("111")));
        assert!(close(&apply(l.op.matrix(), &basis_ket("000")), &basis_ket("100")));
    }

    #[test]
    fn hot_channel_symmetric_states() {
        let set = tabulated_jump_set(1.0, 2.0, 1.0, G).unwrap();
        let l = find(&set, Channel::Bath(1), 2.0 + G);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let want: Vec<c64> = basis_ket("111").iter().map(|x| x * r).collect();
        assert!(close(&apply(l.op.matrix(), &ket3("+")), &want));
        let want: Vec<c64> = ket3("-").iter().map(|x| -x * r).collect();
        assert!(close(&apply(l.op.matrix(), &basis_ket("000")), &want));
    }

    #[test]
    fn tabulated_terms_are_eigenoperators() {
        let h = h3();
        for t in tabulated_jump_set(1.0, 2.0, 1.0, G).unwrap() {
            let c = h.commutator(&t.op).unwrap();
            let target = t.op.scale(c64::new(-t.freq, 0.0));
            assert!(c.sub(&target).unwrap().max_abs() < 1e-12, "{:?} at {}", t.channel, t.freq);
        }
    }

    #[test]
    fn adjoint_pairs() {
        let set = tabulated_jump_set(1.0, 2.0, 1.0, G).unwrap();
        assert_eq!(set.len(), 18);
        for t in &set {
            let partner = find(&set, t.channel, -t.freq);
            assert!(partner.op.sub(&t.op.adjoint()).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn derivation_reproduces_table_per_channel() {
        let h = h3();
        let layout = HilbertLayout::qubits(3);
        for ch in 0..3 {
            let coupling = embed(&pauli::x(), ch, &layout).unwrap();
            let derived = derive_jump_operators(&h, &coupling, Channel::Bath(ch)).unwrap();
            let table = tabulated_channel(ch, E, G).unwrap();
            let fd: Vec<f64> = derived.iter().map(|t| t.freq).collect();
            let ft: Vec<f64> = table.iter().map(|t| t.freq).collect();
            assert_eq!(fd.len(), ft.len(), "channel {ch}: {fd:?} vs {ft:?}");
            for (a, b) in fd.iter().zip(&ft) {
                assert!((a - b).abs() < 1e-12);
            }
            for (d, t) in derived.iter().zip(&table) {
                assert!(equal_up_to_phase(d.op.matrix(), t.op.matrix(), 1e-12), "channel {ch} freq {}", d.freq);
            }
        }
    }

    #[test]
    fn commuting_coupling_gives_only_zero_frequency() {
        let h = h3();
        let id = Operator::identity(HilbertLayout::qubits(3));
        let terms = derive_jump_operators(&h, &id, Channel::Bath(0)).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].freq, 0.0);
    }

    #[test]
    fn degenerate_transitions_merge() {
        let h = h3();
        let coupling = embed(&pauli::x(), 0, &HilbertLayout::qubits(3)).unwrap();
        let terms = derive_jump_operators(&h, &coupling, Channel::Bath(0)).unwrap();
        let l = terms.iter().find(|t| (t.freq - 1.0).abs() < 1e-12).unwrap();
        let nnz = (0..8).flat_map(|i| (0..8).map(move |j| (i, j))).filter(|&(i, j)| l.op.get(i, j).norm() > 1e-12).count();
        assert_eq!(nnz, 2);
    }

    fn noise_env() -> MarkovianEnv {
        MarkovianEnv::ohmic(0.01, 1.0).unwrap().with_zero_frequency(ZeroFrequencyPolicy::OhmicLimit)
    }

    #[test]
    fn zero_strength_noise_has_zero_rates() {
        for model in [NoiseModel::I, NoiseModel::II] {
            let set = noise_jump_set(model, E, G, &noise_env(), 0.0).unwrap();
            assert!(!set.is_empty());
            assert!(set.iter().all(|t| t.rate == 0.0));
        }
    }

    #[test]
    fn noise_model_ii_dephasing_terms() {
        let set = noise_jump_set(NoiseModel::II, E, G, &noise_env(), 1.0).unwrap();
        let z = Channel::NoiseII(NoiseAxis::Z);
        let l0 = find(&set, z, 0.0);
        let diag = ["000", "001", "011", "100", "110", "111"];
        let sign = [1.0, 1.0, 1.0, -1.0, -1.0, -1.0];
        for (bits, s) in diag.iter().zip(sign) {
            let k = usize::from_str_radix(bits, 2).unwrap();
            assert_eq!(l0.op.get(k, k).re, s);
        }
        let (a, b) = (usize::from_str_radix("010", 2).unwrap(), usize::from_str_radix("101", 2).unwrap());
        assert_eq!(l0.op.get(a, b).norm(), 0.0);
        assert!((l0.rate - 0.01).abs() < 1e-15);

        let up = find(&set, z, 2.0 * G);
        let want = outer(&ket3("-"), &ket3("+")) * faer::Scale(c64::new(-1.0, 0.0));
        assert!(max_abs((up.op.matrix() - &want).as_ref()) < 1e-15);
    }

    #[test]
    fn noise_model_ii_matches_derivation() {
        let h = h3();
        let layout = HilbertLayout::qubits(3);
        let set = noise_jump_set(NoiseModel::II, E, G, &noise_env(), 1.0).unwrap();
        for (axis, op) in [(NoiseAxis::X, pauli::x()), (NoiseAxis::Y, pauli::y()), (NoiseAxis::Z, pauli::z())] {
            let coupling = embed(&op, 0, &layout).unwrap();
            let derived = derive_jump_operators(&h, &coupling, Channel::NoiseII(axis)).unwrap();
            let listed: Vec<&JumpTerm> = set.iter().filter(|t| t.channel == Channel::NoiseII(axis)).collect();
            assert_eq!(derived.len(), listed.len(), "{axis:?}");
            for d in &derived {
                let l = find(&set, Channel::NoiseII(axis), d.freq);
                assert!(equal_up_to_phase(d.op.matrix(), l.op.matrix(), 1e-12), "{axis:?} {}", d.freq);
            }
        }
    }

    #[test]
    fn noise_rates_scale_with_strength() {
        let env = MarkovianEnv::ohmic(0.001, 1.0).unwrap();
        let set = noise_jump_set(NoiseModel::I, E, G, &env, 2.5).unwrap();
        for t in &set {
            assert!((t.rate - 2.5 * decay_rate(t.freq, &env).unwrap()).abs() < 1e-18);
        }
        assert!(noise_jump_set(NoiseModel::II, E, G, &env, 1.0).is_err());
    }

    #[test]
    fn phase_comparison() {
        let a = pauli::plus();
        let b = a.clone() * faer::Scale(c64::cis(0.3));
        assert!(equal_up_to_phase(&a, &b, 1e-14));
        assert!(!equal_up_to_phase(&a, &(a.clone() * faer::Scale(c64::new(2.0, 0.0))), 1e-14));
        assert!(!equal_up_to_phase(&a, &pauli::minus(), 1e-14));
    }

    #[test]
    fn noise_model_parsing() {
        assert_eq!("ii".parse::<NoiseModel>().unwrap(), NoiseModel::II);
        assert_eq!("I".parse::<NoiseModel>().unwrap(), NoiseModel::I);
        assert!("III".parse::<NoiseModel>().is_err());
    }
}
