//! Full description of one refrigerator configuration.

use crate::error::{Error, Result};
use crate::model::hamiltonian::{
    build_three_qubit_hamiltonian, build_two_qubit_hamiltonian, qubit_hamiltonian, resonant, TwoQubitVariant,
};
use crate::model::jumps::{noise_jump_set, thermal_bath_jumps, JumpTerm, NoiseModel};
use crate::model::rates::MarkovianEnv;
use crate::model::spin_star::FiniteSpinEnv;
use crate::quantum::{tensor_states_all, thermal_state, DensityMatrix, HilbertLayout, Operator};

#[derive(Debug, Clone, PartialEq)]
pub enum QubitEnv {
    Markovian(MarkovianEnv),
    Finite(FiniteSpinEnv),
    /// No environment at all.
    Isolated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitSpec {
    pub energy: f64,
    /// Initial temperature of the qubit.
    pub tau: f64,
    pub env: QubitEnv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub model: NoiseModel,
    pub strength: f64,
    pub env: MarkovianEnv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefrigeratorModel {
    pub qubits: Vec<QubitSpec>,
    pub g: f64,
    /// Required for two-qubit models, ignored otherwise.
    pub variant: Option<TwoQubitVariant>,
    /// Enforce `E2 = E1 + E3` for three-qubit models.
    pub self_contained: bool,
    pub noise: Option<NoiseSpec>,
}

impl RefrigeratorModel {
    pub fn validate(&self) -> Result<()> {
        let n = self.qubits.len();
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidParameter(format!("{n} qubits; supported models have 1 to 3")));
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if !q.energy.is_finite() || q.energy == 0.0 {
                return Err(Error::InvalidParameter(format!("qubit {} energy {}", i + 1, q.energy)));
            }
            if !(q.tau > 0.0 && q.tau.is_finite()) {
                return Err(Error::InvalidParameter(format!("qubit {} temperature {}", i + 1, q.tau)));
            }
            match &q.env {
                QubitEnv::Markovian(env) => env.validate()?,
                QubitEnv::Finite(env) => env.validate()?,
                QubitEnv::Isolated => {}
            }
        }
        if n == 3 {
            let e = self.energies();
            if self.self_contained && !resonant(e[1], e[0] + e[2]) {
                return Err(Error::InvalidParameter(format!(
                    "self-contained refrigerator needs E2 = E1 + E3, got {} vs {}",
                    e[1],
                    e[0] + e[2]
                )));
            }
        }
        if n == 2 && self.variant.is_none() {
            return Err(Error::InvalidParameter("two-qubit model needs a resonance variant".into()));
        }
        if let Some(noise) = &self.noise {
            if n != 3 {
                return Err(Error::InvalidParameter("noise models are defined for three qubits only".into()));
            }
            noise.env.validate()?;
        }
        // the Hamiltonian constructors carry the remaining checks
        self.system_hamiltonian().map(|_| ())
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.qubits.iter().map(|q| q.energy).collect()
    }

    pub fn system_layout(&self) -> HilbertLayout {
        HilbertLayout::qubits(self.n_qubits())
    }

    pub fn system_hamiltonian(&self) -> Result<Operator> {
        let e = self.energies();
        match e.len() {
            1 => Ok(qubit_hamiltonian(e[0])),
            2 => build_two_qubit_hamiltonian(
                e[0],
                e[1],
                self.g,
                self.variant.ok_or_else(|| Error::InvalidParameter("missing two-qubit variant".into()))?,
            ),
            3 => build_three_qubit_hamiltonian(e[0], e[1], e[2], self.g),
            n => Err(Error::InvalidParameter(format!("{n} qubits"))),
        }
    }

    /// Product of the local Gibbs states `exp(-E_i sigma_z / (2 tau_i))`.
    pub fn initial_system_state(&self) -> Result<DensityMatrix> {
        let states: Vec<DensityMatrix> = self
            .qubits
            .iter()
            .map(|q| thermal_state(&qubit_hamiltonian(q.energy), 1.0 / q.tau))
            .collect::<Result<_>>()?;
        tensor_states_all(&states)
    }

    /// Thermal-bath and noise jump terms on the system space, rates filled in.
    pub fn system_jumps(&self) -> Result<Vec<JumpTerm>> {
        let h = self.system_hamiltonian()?;
        let mut out = Vec::new();
        for (i, q) in self.qubits.iter().enumerate() {
            if let QubitEnv::Markovian(env) = &q.env {
                out.extend(thermal_bath_jumps(&h, i, env)?);
            }
        }
        if let Some(noise) = &self.noise {
            let e = self.energies();
            out.extend(noise_jump_set(noise.model, [e[0], e[1], e[2]], self.g, &noise.env, noise.strength)?);
        }
        Ok(out)
    }

    /// `(qubit, environment)` for every qubit attached to a spin environment.
    pub fn finite_envs(&self) -> Vec<(usize, FiniteSpinEnv)> {
        self.qubits
            .iter()
            .enumerate()
            .filter_map(|(i, q)| match q.env {
                QubitEnv::Finite(env) => Some((i, env)),
                _ => None,
            })
            .collect()
    }

    pub fn has_markovian(&self) -> bool {
        self.noise.is_some() || self.qubits.iter().any(|q| matches!(q.env, QubitEnv::Markovian(_)))
    }

    pub fn has_finite(&self) -> bool {
        self.qubits.iter().any(|q| matches!(q.env, QubitEnv::Finite(_)))
    }
}

/// Three-qubit model with the standard energies `(1, 2, 1)`, temperatures
/// `(1, 1, 2)` and `g = 0.8`, every qubit on an Ohmic bath with the given couplings.
pub fn standard_markovian(alphas: [f64; 3]) -> Result<RefrigeratorModel> {
    let taus = [1.0, 1.0, 2.0];
    let energies = [1.0, 2.0, 1.0];
    let qubits = (0..3)
        .map(|i| {
            Ok(QubitSpec { energy: energies[i], tau: taus[i], env: QubitEnv::Markovian(MarkovianEnv::ohmic(alphas[i], taus[i])?) })
        })
        .collect::<Result<_>>()?;
    let m = RefrigeratorModel { qubits, g: 0.8, variant: None, self_contained: true, noise: None };
    m.validate()?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::jumps::Channel;

    #[test]
    fn standard_model_is_valid() {
        let m = standard_markovian([1e-3, 1e-4, 1e-2]).unwrap();
        assert_eq!(m.n_qubits(), 3);
        let jumps = m.system_jumps().unwrap();
        assert_eq!(jumps.len(), 18);
        assert!(jumps.iter().all(|j| j.rate > 0.0));
        assert_eq!(jumps.iter().filter(|j| j.channel == Channel::Bath(2)).count(), 6);
    }

    #[test]
    fn initial_state_is_product_of_gibbs_states() {
        let m = standard_markovian([1e-3, 1e-4, 1e-2]).unwrap();
        let rho = m.initial_system_state().unwrap();
        let p = |e: f64, t: f64| 1.0 / (1.0 + (e / t).exp());
        // |000>: every qubit excited
        let want = p(1.0, 1.0) * p(2.0, 1.0) * p(1.0, 2.0);
        assert!((rho.get(0, 0).re - want).abs() < 1e-15);
    }

    #[test]
    fn self_contained_condition_enforced() {
        let mut m = standard_markovian([1e-3, 1e-4, 1e-2]).unwrap();
        m.qubits[1].energy = 2.5;
        assert!(m.validate().is_err());
        m.self_contained = false;
        assert!(m.validate().is_ok());
    }

    #[test]
    fn two_qubit_needs_variant() {
        let q = QubitSpec { energy: 0.5, tau: 1.0, env: QubitEnv::Isolated };
        let mut m = RefrigeratorModel { qubits: vec![q.clone(), q], g: 0.8, variant: None, self_contained: false, noise: None };
        assert!(m.validate().is_err());
        m.variant = Some(TwoQubitVariant::I);
        assert!(m.validate().is_ok());
    }
}
