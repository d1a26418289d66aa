//! Joint-space form of mixed Markovian and finite-environment dynamics.
//!
//! The system and every finite spin environment are evolved together under
//! `H_S + sum H_SB` while the Markovian jumps, derived from `H_S` alone, act
//! on the system factors only. Environment self-Hamiltonians enter through
//! the initial thermal states and nowhere else.

use std::collections::BTreeMap;

use crate::dynamics::gksl::GKSLGenerator;
use crate::error::{Error, Result};
use crate::model::{spin_star_interaction, JumpTerm, RefrigeratorModel};
use crate::quantum::{tensor, tensor_states, DensityMatrix, HilbertLayout, Operator};

#[derive(Debug, Clone)]
pub struct HybridModel {
    pub joint_layout: HilbertLayout,
    pub h_joint: Operator,
    /// System jumps extended by the identity on the environment factors.
    pub lifted_jumps: Vec<JumpTerm>,
    /// Environment factors of every qubit that has a finite environment.
    pub partition: BTreeMap<usize, Vec<usize>>,
    pub n_system: usize,
    pub rho0: DensityMatrix,
}

/// `op (x) I_env` for a system operator.
pub fn lift(op: &Operator, env_layout: &HilbertLayout) -> Operator {
    tensor(op, &Operator::identity(env_layout.clone()))
}

fn lift_jump(j: &JumpTerm, env_layout: Option<&HilbertLayout>) -> JumpTerm {
    match env_layout {
        Some(env) => JumpTerm { op: lift(&j.op, env), ..j.clone() },
        None => j.clone(),
    }
}

impl HybridModel {
    /// Builds the joint description of a refrigerator model. Environment spins
    /// are appended after the system qubits in qubit order.
    pub fn from_model(model: &RefrigeratorModel) -> Result<Self> {
        model.validate()?;
        let n_system = model.n_qubits();
        let h_sys = model.system_hamiltonian()?;
        let rho_sys = model.initial_system_state()?;
        let jumps = model.system_jumps()?;

        let finite = model.finite_envs();
        let env_dims: Vec<usize> = finite.iter().flat_map(|(_, e)| vec![2; e.n_spins]).collect();
        if env_dims.is_empty() {
            let h_joint = h_sys;
            return Ok(Self {
                joint_layout: h_joint.layout().clone(),
                h_joint,
                lifted_jumps: jumps,
                partition: BTreeMap::new(),
                n_system,
                rho0: rho_sys,
            });
        }
        let env_layout = HilbertLayout::new(env_dims)?;
        let joint_layout = model.system_layout().concat(&env_layout);

        let mut h_joint = lift(&h_sys, &env_layout);
        let mut partition = BTreeMap::new();
        let mut rho_env: Option<DensityMatrix> = None;
        let mut next = n_system;
        for (qubit, env) in &finite {
            let factors: Vec<usize> = (next..next + env.n_spins).collect();
            next += env.n_spins;
            h_joint = h_joint.add(&spin_star_interaction(*qubit, &factors, env, &joint_layout)?)?;
            let th = env.thermal_state()?;
            rho_env = Some(match rho_env {
                None => th,
                Some(acc) => tensor_states(&acc, &th),
            });
            partition.insert(*qubit, factors);
        }
        let rho_env = rho_env.ok_or_else(|| Error::InvalidParameter("no environment state".into()))?;
        let rho0 = tensor_states(&rho_sys, &rho_env);
        let lifted_jumps = jumps.iter().map(|j| lift_jump(j, Some(&env_layout))).collect();
        Ok(Self { joint_layout, h_joint, lifted_jumps, partition, n_system, rho0 })
    }

    pub fn dim(&self) -> usize {
        self.joint_layout.total_dim()
    }

    fn env_layout(&self) -> Result<Option<HilbertLayout>> {
        let dims = &self.joint_layout.factor_dims()[self.n_system..];
        if dims.is_empty() {
            Ok(None)
        } else {
            HilbertLayout::new(dims.to_vec()).map(Some)
        }
    }

    /// System qubit indices, which are also their joint-space factor indices.
    pub fn system_factors(&self) -> Vec<usize> {
        (0..self.n_system).collect()
    }

    pub fn generator(&self) -> Result<GKSLGenerator> {
        GKSLGenerator::new(self.h_joint.clone(), self.lifted_jumps.clone())
    }

    pub fn has_jumps(&self) -> bool {
        self.lifted_jumps.iter().any(|j| j.rate > 0.0)
    }
}

/// Adds noise jumps given on the system space.
pub trait AttachNoise: Sized {
    fn attach_noise(self, noise: Vec<JumpTerm>) -> Result<Self>;
}

impl AttachNoise for GKSLGenerator {
    fn attach_noise(self, noise: Vec<JumpTerm>) -> Result<Self> {
        self.with_jumps(noise)
    }
}

impl AttachNoise for HybridModel {
    fn attach_noise(mut self, noise: Vec<JumpTerm>) -> Result<Self> {
        let env = self.env_layout()?;
        let sys = HilbertLayout::qubits(self.n_system);
        for j in &noise {
            if j.op.layout() != &sys {
                return Err(Error::DimensionMismatch(format!(
                    "noise jump on {:?} for a {}-qubit system",
                    j.op.layout().factor_dims(),
                    self.n_system
                )));
            }
        }
        self.lifted_jumps.extend(noise.iter().map(|j| lift_jump(j, env.as_ref())));
        Ok(self)
    }
}
