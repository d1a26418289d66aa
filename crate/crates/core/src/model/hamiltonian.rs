//! System Hamiltonians of the two- and three-qubit refrigerators.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{basis_ket, embed, outer, pauli, HilbertLayout, Operator};

/// Resonance conditions that make the two-qubit exchange energy-neutral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwoQubitVariant {
    /// `E1 = E2`, coupling `|01><10| + h.c.`
    I,
    /// `E1 = -E2`, coupling `|00><11| + h.c.`
    Ii,
}

/// `sum_i (E_i / 2) sigma_z^i` on `energies.len()` qubits.
pub fn local_hamiltonian(energies: &[f64]) -> Result<Operator> {
    let layout = HilbertLayout::qubits(energies.len());
    let mut h = Operator::zeros(layout.clone());
    for (i, &e) in energies.iter().enumerate() {
        let z = Mat::from_fn(2, 2, |r, c| pauli::z()[(r, c)] * (e / 2.0));
        h = h.add(&embed(&z, i, &layout)?)?;
    }
    Ok(h)
}

/// Qubit Hamiltonian `(E / 2) sigma_z`.
pub fn qubit_hamiltonian(energy: f64) -> Operator {
    local_hamiltonian(&[energy]).expect("single qubit")
}

fn exchange(a: &str, b: &str, g: f64) -> Mat<c64> {
    let (ka, kb) = (basis_ket(a), basis_ket(b));
    let m = outer(&ka, &kb);
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * g)
}

/// `sum (E_i/2) sigma_z^i + g (|010><101| + |101><010|)`.
pub fn build_three_qubit_hamiltonian(e1: f64, e2: f64, e3: f64, g: f64) -> Result<Operator> {
    for (i, e) in [e1, e2, e3].into_iter().enumerate() {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidParameter(format!("energy E{} = {e} must be positive", i + 1)));
        }
    }
    if !g.is_finite() {
        return Err(Error::InvalidParameter(format!("interaction strength g = {g}")));
    }
    let h = local_hamiltonian(&[e1, e2, e3])?;
    let v = Operator::new(HilbertLayout::qubits(3), exchange("010", "101", g))?;
    h.add(&v)
}

/// Two-qubit refrigerator with either resonance condition.
pub fn build_two_qubit_hamiltonian(e1: f64, e2: f64, g: f64, variant: TwoQubitVariant) -> Result<Operator> {
    if e1 == 0.0 || !e1.is_finite() || !e2.is_finite() || !g.is_finite() {
        return Err(Error::InvalidParameter(format!("two-qubit parameters E1 = {e1}, E2 = {e2}, g = {g}")));
    }
    let (ok, pair) = match variant {
        TwoQubitVariant::I => (resonant(e1, e2), ("01", "10")),
        TwoQubitVariant::Ii => (resonant(e1, -e2), ("00", "11")),
    };
    if !ok {
        return Err(Error::InvalidParameter(format!(
            "resonance condition of variant {variant:?} violated by E1 = {e1}, E2 = {e2}"
        )));
    }
    let h = local_hamiltonian(&[e1, e2])?;
    let v = Operator::new(HilbertLayout::qubits(2), exchange(pair.0, pair.1, g))?;
    h.add(&v)
}

pub(crate) fn resonant(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::hermitian_eigenvalues;

    fn idx(bits: &str) -> usize {
        usize::from_str_radix(bits, 2).unwrap()
    }

    #[test]
    fn exchange_matrix_element() {
        let h = build_three_qubit_hamiltonian(1.0, 2.0, 1.0, 0.8).unwrap();
        assert_eq!(h.get(idx("010"), idx("101")).re, 0.8);
        assert_eq!(h.get(idx("101"), idx("010")).re, 0.8);
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn uncoupled_spectrum_is_diagonal() {
        let (e1, e2, e3) = (0.7, 1.9, 1.3);
        let h = build_three_qubit_hamiltonian(e1, e2, e3, 0.0).unwrap();
        for k in 0..8 {
            let s = |bit: usize| if (k >> bit) & 1 == 0 { 1.0 } else { -1.0 };
            let want = (s(2) * e1 + s(1) * e2 + s(0) * e3) / 2.0;
            assert!((h.get(k, k).re - want).abs() < 1e-15);
            for j in 0..8 {
                if j != k {
                    assert_eq!(h.get(k, j).norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn resonant_pair_splits_by_g() {
        let h = build_three_qubit_hamiltonian(1.0, 2.0, 1.0, 0.8).unwrap();
        let mut ev = hermitian_eigenvalues(h.matrix().as_ref());
        ev.sort_by(f64::total_cmp);
        let mut want = vec![-2.0, -1.0, -1.0, -0.8, 0.8, 1.0, 1.0, 2.0];
        want.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn rejects_nonpositive_energy() {
        assert!(build_three_qubit_hamiltonian(0.0, 1.0, 1.0, 0.1).is_err());
        assert!(build_three_qubit_hamiltonian(1.0, -2.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn two_qubit_variant_i() {
        let h = build_two_qubit_hamiltonian(0.5, 0.5, 0.3, TwoQubitVariant::I).unwrap();
        assert_eq!(h.get(idx("01"), idx("10")).re, 0.3);
        let h0 = build_two_qubit_hamiltonian(0.5, 0.5, 0.0, TwoQubitVariant::I).unwrap();
        let mut ev = hermitian_eigenvalues(h0.matrix().as_ref());
        ev.sort_by(f64::total_cmp);
        assert_eq!(ev, vec![-0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn two_qubit_variant_ii_block_structure() {
        let h = build_two_qubit_hamiltonian(0.5, -0.5, 0.3, TwoQubitVariant::Ii).unwrap();
        assert_eq!(h.get(idx("00"), idx("11")).re, 0.3);
        assert_eq!(h.get(idx("01"), idx("10")).norm(), 0.0);
        assert_eq!(h.get(idx("10"), idx("01")).norm(), 0.0);
    }

    #[test]
    fn two_qubit_condition_enforced() {
        assert!(build_two_qubit_hamiltonian(0.5, 0.6, 0.3, TwoQubitVariant::I).is_err());
        assert!(build_two_qubit_hamiltonian(0.5, 0.5, 0.3, TwoQubitVariant::Ii).is_err());
    }
}
