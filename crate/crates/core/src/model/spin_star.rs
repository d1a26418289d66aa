//! Finite spin-star environments: `N` non-interacting spins coupled to one
//! central qubit by an XY exchange.

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{embed, embed_many, pauli, thermal_state, CMat, DensityMatrix, HilbertLayout, Operator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteSpinEnv {
    pub n_spins: usize,
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default = "default_alpha0")]
    pub alpha0: f64,
    pub tau: f64,
}

fn default_nu() -> f64 {
    1.0
}

fn default_alpha0() -> f64 {
    0.5
}

impl FiniteSpinEnv {
    pub fn new(n_spins: usize, tau: f64) -> Result<Self> {
        let env = Self { n_spins, nu: default_nu(), alpha0: default_alpha0(), tau };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins == 0 {
            return Err(Error::InvalidParameter("spin environment needs at least one spin".into()));
        }
        if !(self.alpha0 >= 0.0 && self.alpha0.is_finite()) {
            return Err(Error::InvalidParameter(format!("spin coupling alpha0 = {}", self.alpha0)));
        }
        if !self.nu.is_finite() {
            return Err(Error::InvalidParameter(format!("spin frequency nu = {}", self.nu)));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidParameter(format!("spin environment temperature {}", self.tau)));
        }
        Ok(())
    }

    pub fn layout(&self) -> HilbertLayout {
        HilbertLayout::qubits(self.n_spins)
    }

    /// Gibbs state of the environment Hamiltonian at the environment temperature.
    pub fn thermal_state(&self) -> Result<DensityMatrix> {
        thermal_state(&spin_star_hamiltonian(self)?, 1.0 / self.tau)
    }
}

/// Collective `J^+ = sum_k sigma_k^+` on the factors listed in `spins`.
pub fn collective_plus(spins: &[usize], layout: &HilbertLayout) -> Result<Operator> {
    let mut acc = Operator::zeros(layout.clone());
    for &k in spins {
        acc = acc.add(&embed(&pauli::plus(), k, layout)?)?;
    }
    Ok(acc)
}

/// `nu J^+ J^-` on the environment's own `N`-spin space.
pub fn spin_star_hamiltonian(env: &FiniteSpinEnv) -> Result<Operator> {
    env.validate()?;
    let layout = env.layout();
    let spins: Vec<usize> = (0..env.n_spins).collect();
    let jp = collective_plus(&spins, &layout)?;
    let jm = jp.adjoint();
    Ok(jp.mul(&jm)?.scale(c64::new(env.nu, 0.0)))
}

/// `2 alpha0 (sigma_q^+ J^- + sigma_q^- J^+)` with `J` summed over `env_factors`.
pub fn spin_star_interaction(
    qubit: usize,
    env_factors: &[usize],
    env: &FiniteSpinEnv,
    layout: &HilbertLayout,
) -> Result<Operator> {
    if env_factors.len() != env.n_spins {
        return Err(Error::DimensionMismatch(format!(
            "{} environment factors for {} spins",
            env_factors.len(),
            env.n_spins
        )));
    }
    if env_factors.contains(&qubit) {
        return Err(Error::InvalidParameter(format!("qubit {qubit} listed as its own environment")));
    }
    let sp = pauli::plus();
    let sm = pauli::minus();
    let mut acc = Operator::zeros(layout.clone());
    for &k in env_factors {
        let a = embed_many(&[(qubit, &sp), (k, &sm)], layout)?;
        acc = acc.add(&a)?.add(&a.adjoint())?;
    }
    Ok(acc.scale(c64::new(2.0 * env.alpha0, 0.0)))
}

/// Sum of `sigma_z / 2` over the listed factors.
pub fn excitation_operator(factors: &[usize], layout: &HilbertLayout) -> Result<Operator> {
    let half_z: CMat = faer::Mat::from_fn(2, 2, |i, j| pauli::z()[(i, j)] * 0.5);
    let mut acc = Operator::zeros(layout.clone());
    for &k in factors {
        acc = acc.add(&embed(&half_z, k, layout)?)?;
    }
    Ok(acc)
}
