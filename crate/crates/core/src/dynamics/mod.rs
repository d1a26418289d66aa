//! Propagators: Markovian (GKSL), exact closed evolution with finite
//! environments, and the hybrid joint-space master equation.

pub mod closed;
pub mod gksl;
pub mod hybrid;
pub mod rk;
pub mod sector;
pub mod spectral;
pub mod trajectory;

use serde::{Deserialize, Serialize};

pub use closed::ClosedEvolution;
pub use gksl::{gksl_rhs, liouvillian, liouvillian_spectrum, null_space_dimension, steady_state, GKSLGenerator};
pub use hybrid::{lift, AttachNoise, HybridModel};
pub use rk::{RkOptions, RkStats};
pub use sector::{BlockGenerator, BlockStructure};
pub use spectral::{SpectralPropagator, MAX_CONDITION};
pub use trajectory::{validate_times, Method, Trajectory};

use crate::error::{Error, Result};
use crate::quantum::{
    hermitize, CMat, DensityMatrix, HilbertLayout, Operator, StateDiagnostics, POSITIVITY_TOL, TRACE_TOL,
};
use trajectory::reduce_all;

/// Which Markovian solver to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    /// Spectral when the sector is small enough and well conditioned,
    /// adaptive Runge-Kutta otherwise.
    #[default]
    Auto,
    Spectral,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    pub solver: Solver,
    pub rk: RkOptions,
    pub max_condition: f64,
    /// Largest packed sector dimension handed to the dense eigensolver.
    pub max_spectral_dim: usize,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self { solver: Solver::Auto, rk: RkOptions::default(), max_condition: MAX_CONDITION, max_spectral_dim: 1200 }
    }
}

/// Re-evaluates the reduced states at arbitrary times after a run.
#[derive(Debug, Clone)]
enum Probe {
    None,
    Spectral { prop: Box<SpectralPropagator>, structure: BlockStructure, layout: HilbertLayout, keep: Vec<usize> },
    Closed(Box<ClosedEvolution>),
}

/// A computed trajectory plus, where the method allows it, exact access to
/// the state between samples.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub trajectory: Trajectory,
    probe: Probe,
}

impl Simulation {
    /// True when [`Simulation::reduced_at`] can evaluate off-grid times.
    pub fn can_probe(&self) -> bool {
        !matches!(self.probe, Probe::None)
    }

    /// Reduced states of the recorded qubits at time `t`, or `None` for
    /// step-based runs.
    pub fn reduced_at(&self, t: f64) -> Result<Option<Vec<DensityMatrix>>> {
        match &self.probe {
            Probe::None => Ok(None),
            Probe::Spectral { prop, structure, layout, keep } => {
                let m = hermitize(structure.unpack(&prop.state_at(t)).as_ref());
                reduce_all(layout, &m, keep).map(Some)
            }
            Probe::Closed(evo) => Ok(Some(evo.reduced_at(t))),
        }
    }
}

fn check_keep(layout: &HilbertLayout, keep: &[usize]) -> Result<()> {
    if keep.is_empty() {
        return Err(Error::InvalidParameter("no qubits to record".into()));
    }
    for &k in keep {
        if layout.factor_dims().get(k) != Some(&2) {
            return Err(Error::IndexOutOfRange { index: k, factors: layout.n_factors() });
        }
    }
    Ok(())
}

fn check_state(rho0: &DensityMatrix, dim: usize) -> Result<()> {
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch(format!("state of dimension {} for a generator of dimension {dim}", rho0.dim())));
    }
    let d = rho0.diagnostics();
    if !d.within(TRACE_TOL, 1e-10, POSITIVITY_TOL) {
        return Err(Error::InvalidState(format!("initial state fails validation: {d:?}")));
    }
    Ok(())
}

struct Samples {
    states: Vec<Vec<DensityMatrix>>,
    diagnostics: Vec<StateDiagnostics>,
}

impl Samples {
    fn with_capacity(n: usize) -> Self {
        Self { states: Vec::with_capacity(n), diagnostics: Vec::with_capacity(n) }
    }

    fn push(&mut self, structure: &BlockStructure, layout: &HilbertLayout, keep: &[usize], x: &[faer::c64]) -> Result<()> {
        self.diagnostics.push(structure.diagnostics(x));
        let m: CMat = structure.unpack(x);
        self.states.push(reduce_all(layout, &m, keep)?);
        Ok(())
    }
}


fn run_spectral(
    gen: &BlockGenerator,
    x0: &[faer::c64],
    times: &[f64],
    layout: &HilbertLayout,
    keep: &[usize],
    max_condition: f64,
) -> Result<Option<(Samples, SpectralPropagator)>> {
    let Some(prop) = SpectralPropagator::new(gen, x0, max_condition)? else { return Ok(None) };
    let s = gen.structure();
    let mut out = Samples::with_capacity(times.len());
    for &t in times {
        out.push(s, layout, keep, &prop.state_at(t))?;
    }
    Ok(Some((out, prop)))
}

fn run_adaptive(
    gen: &BlockGenerator,
    x0: &[faer::c64],
    times: &[f64],
    layout: &HilbertLayout,
    keep: &[usize],
    opts: &RkOptions,
) -> Result<Samples> {
    let s = gen.structure();
    let mut out = Samples::with_capacity(times.len());
    rk::integrate(gen, x0, times, opts, |_, x| out.push(s, layout, keep, x))?;
    Ok(out)
}

/// Propagates `rho0` under `gen`, recording the reduced states of the qubit
/// factors in `keep`.
pub fn simulate_gksl(
    gen: &GKSLGenerator,
    rho0: &DensityMatrix,
    times: &[f64],
    keep: &[usize],
    opts: &PropagationOptions,
) -> Result<Simulation> {
    validate_times(times)?;
    check_state(rho0, gen.dim())?;
    let layout = gen.h.layout().clone();
    check_keep(&layout, keep)?;

    let block = BlockGenerator::new(gen, rho0.matrix())?;
    let x0 = block.structure().pack(rho0.matrix());
    let spectral_allowed = match opts.solver {
        Solver::Auto => block.sector_dim() <= opts.max_spectral_dim,
        Solver::Spectral => true,
        Solver::Adaptive => false,
    };

    if spectral_allowed {
        if let Some((samples, prop)) = run_spectral(&block, &x0, times, &layout, keep, opts.max_condition)? {
            let drift_ok = samples.diagnostics.iter().all(|d| d.trace_residual <= TRACE_TOL);
            if drift_ok || opts.solver == Solver::Spectral {
                let structure = block.structure().clone();
                return Ok(Simulation {
                    trajectory: Trajectory {
                        times: times.to_vec(),
                        qubits: keep.to_vec(),
                        states: samples.states,
                        diagnostics: samples.diagnostics,
                        method: Method::Spectral,
                    },
                    probe: Probe::Spectral { prop: Box::new(prop), structure, layout, keep: keep.to_vec() },
                });
            }
        } else if opts.solver == Solver::Spectral {
            return Err(Error::Decomposition(format!(
                "generator eigenvectors are worse conditioned than {:e}",
                opts.max_condition
            )));
        }
    }

    let samples = run_adaptive(&block, &x0, times, &layout, keep, &opts.rk)?;
    Ok(Simulation {
        trajectory: Trajectory {
            times: times.to_vec(),
            qubits: keep.to_vec(),
            states: samples.states,
            diagnostics: samples.diagnostics,
            method: Method::Adaptive,
        },
        probe: Probe::None,
    })
}

/// Markovian evolution of every qubit of the generator's space.
pub fn propagate_gksl(
    gen: &GKSLGenerator,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &PropagationOptions,
) -> Result<Trajectory> {
    let keep: Vec<usize> = (0..gen.h.layout().n_factors()).collect();
    simulate_gksl(gen, rho0, times, &keep, opts).map(|s| s.trajectory)
}

/// Exact unitary evolution under `h_joint`, reduced onto `keep`.
pub fn simulate_closed(
    h_joint: &Operator,
    rho_joint0: &DensityMatrix,
    times: &[f64],
    keep: &[usize],
) -> Result<Simulation> {
    validate_times(times)?;
    check_state(rho_joint0, h_joint.dim())?;
    check_keep(h_joint.layout(), keep)?;
    let evo = ClosedEvolution::new(h_joint, rho_joint0, keep)?;
    let (states, diagnostics) = evo.reduced_series(times);
    Ok(Simulation {
        trajectory: Trajectory { times: times.to_vec(), qubits: keep.to_vec(), states, diagnostics, method: Method::Closed },
        probe: Probe::Closed(Box::new(evo)),
    })
}

pub fn propagate_closed(
    h_joint: &Operator,
    rho_joint0: &DensityMatrix,
    times: &[f64],
    keep: &[usize],
) -> Result<Trajectory> {
    simulate_closed(h_joint, rho_joint0, times, keep).map(|s| s.trajectory)
}

/// Joint-space evolution of a hybrid model, reduced onto the system qubits.
/// Without active jumps this is exact closed evolution.
pub fn simulate_hybrid(model: &HybridModel, times: &[f64], opts: &PropagationOptions) -> Result<Simulation> {
    let keep = model.system_factors();
    if !model.has_jumps() {
        return simulate_closed(&model.h_joint, &model.rho0, times, &keep);
    }
    simulate_gksl(&model.generator()?, &model.rho0, times, &keep, opts)
}

pub fn propagate_hybrid(model: &HybridModel, times: &[f64], opts: &PropagationOptions) -> Result<Trajectory> {
    simulate_hybrid(model, times, opts).map(|s| s.trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::refrigerator::standard_markovian;
    use crate::model::{FiniteSpinEnv, QubitEnv, RefrigeratorModel};
    use crate::quantum::max_abs;

    fn s3() -> (GKSLGenerator, DensityMatrix) {
        let m = standard_markovian([1e-4, 1e-3, 1e-2]).unwrap();
        let gen = GKSLGenerator::new(m.system_hamiltonian().unwrap(), m.system_jumps().unwrap()).unwrap();
        (gen, m.initial_system_state().unwrap())
    }

    fn max_state_gap(a: &Trajectory, b: &Trajectory) -> f64 {
        let mut worst = 0.0f64;
        for (sa, sb) in a.states.iter().zip(&b.states) {
            for (x, y) in sa.iter().zip(sb) {
                let d = x.matrix() - y.matrix();
                worst = worst.max(max_abs(d.as_ref()));
            }
        }
        worst
    }

    #[test]
    fn time_zero_returns_initial_marginals() {
        let (gen, rho0) = s3();
        let traj = propagate_gksl(&gen, &rho0, &[0.0], &PropagationOptions::default()).unwrap();
        let want = crate::quantum::partial_trace(&rho0, &[0]).unwrap();
        let d = traj.states[0][0].matrix() - want.matrix();
        assert!(max_abs(d.as_ref()) < 1e-14);
    }

    #[test]
    fn spectral_and_adaptive_paths_agree_on_s3() {
        let (gen, rho0) = s3();
        let times: Vec<f64> = (0..=200).map(|k| 5.0 * k as f64).collect();
        let spectral = PropagationOptions { solver: Solver::Spectral, ..Default::default() };
        let a = propagate_gksl(&gen, &rho0, &times, &spectral).unwrap();
        let adaptive = PropagationOptions { solver: Solver::Adaptive, ..Default::default() };
        let b = propagate_gksl(&gen, &rho0, &times, &adaptive).unwrap();
        assert_eq!(a.method, Method::Spectral);
        assert_eq!(b.method, Method::Adaptive);
        assert!(max_state_gap(&a, &b) <= 1e-8, "gap {}", max_state_gap(&a, &b));
        for d in a.diagnostics.iter().chain(&b.diagnostics) {
            assert!(d.within(1e-9, 1e-9, 1e-8), "{d:?}");
        }
    }

    #[test]
    fn s3_long_time_limit_is_the_steady_state() {
        let (gen, rho0) = s3();
        let traj = propagate_gksl(&gen, &rho0, &[2e5, 1e7], &PropagationOptions::default()).unwrap();
        let ss = steady_state(&gen).unwrap();
        let want = crate::quantum::partial_trace(&ss, &[0]).unwrap();
        let d = traj.states[1][0].matrix() - want.matrix();
        assert!(max_abs(d.as_ref()) < 1e-8);
    }

    fn finite_model(alpha_markov: f64, alpha0: f64) -> RefrigeratorModel {
        let mut m = standard_markovian([0.0, 1e-4, 1e-2]).unwrap();
        let mut env = FiniteSpinEnv::new(2, 1.0).unwrap();
        env.alpha0 = alpha0;
        m.qubits[0].env = QubitEnv::Finite(env);
        for q in &mut m.qubits[1..] {
            if let QubitEnv::Markovian(e) = &mut q.env {
                e.spectral.alpha = alpha_markov;
            }
        }
        m
    }

    #[test]
    fn hybrid_without_rates_matches_closed_evolution() {
        let hybrid = HybridModel::from_model(&finite_model(0.0, 0.5)).unwrap();
        assert_eq!(hybrid.dim(), 32);
        let times: Vec<f64> = (0..=100).map(|k| 0.2 * k as f64).collect();
        let keep = hybrid.system_factors();
        let exact = propagate_closed(&hybrid.h_joint, &hybrid.rho0, &times, &keep).unwrap();
        let opts = PropagationOptions { solver: Solver::Adaptive, ..Default::default() };
        let stepped = simulate_gksl(&hybrid.generator().unwrap(), &hybrid.rho0, &times, &keep, &opts).unwrap();
        assert!(max_state_gap(&stepped.trajectory, &exact) <= 1e-9);
        let spectral = PropagationOptions { solver: Solver::Spectral, ..Default::default() };
        let sp = simulate_gksl(&hybrid.generator().unwrap(), &hybrid.rho0, &times, &keep, &spectral).unwrap();
        assert!(max_state_gap(&sp.trajectory, &exact) <= 1e-9);
    }

    #[test]
    fn hybrid_without_spin_coupling_matches_markovian_evolution() {
        let model = finite_model(1e-3, 0.0);
        let hybrid = HybridModel::from_model(&model).unwrap();
        let times: Vec<f64> = (0..=50).map(|k| 20.0 * k as f64).collect();
        let opts = PropagationOptions::default();
        let joint = propagate_hybrid(&hybrid, &times, &opts).unwrap();
        let gen = GKSLGenerator::new(model.system_hamiltonian().unwrap(), model.system_jumps().unwrap()).unwrap();
        let pure = propagate_gksl(&gen, &model.initial_system_state().unwrap(), &times, &opts).unwrap();
        assert!(max_state_gap(&joint, &pure) <= 1e-8);
    }

    #[test]
    fn closed_evolution_conserves_joint_spectrum() {
        let hybrid = HybridModel::from_model(&finite_model(0.0, 0.5)).unwrap();
        let evo = ClosedEvolution::new(&hybrid.h_joint, &hybrid.rho0, &[0]).unwrap();
        let mut before = hybrid.rho0.eigenvalues();
        let mut after = evo.state_at(7.3).unwrap().eigenvalues();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-9);
        }
        let p0 = hybrid.rho0.purity();
        assert!((evo.state_at(7.3).unwrap().purity() - p0).abs() < 1e-10);
    }

    #[test]
    fn probe_matches_grid_samples() {
        let (gen, rho0) = s3();
        let times = [0.0, 3.0, 40.0];
        let sim = simulate_gksl(&gen, &rho0, &times, &[0, 1, 2], &PropagationOptions::default()).unwrap();
        assert!(sim.can_probe());
        let at = sim.reduced_at(40.0).unwrap().unwrap();
        let d = at[0].matrix() - sim.trajectory.states[2][0].matrix();
        assert!(max_abs(d.as_ref()) < 1e-13);
    }

    #[test]
    fn rejects_bad_time_grids() {
        let (gen, rho0) = s3();
        let opts = PropagationOptions::default();
        assert!(propagate_gksl(&gen, &rho0, &[], &opts).is_err());
        assert!(propagate_gksl(&gen, &rho0, &[1.0, 1.0], &opts).is_err());
        assert!(propagate_gksl(&gen, &rho0, &[-1.0], &opts).is_err());
    }
}
