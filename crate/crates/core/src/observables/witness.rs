//! Temperature-based non-Markovianity witness and the entanglement
//! (system-auxiliary concurrence) test.

use faer::c64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{propagate_gksl, ClosedEvolution, GKSLGenerator, PropagationOptions};
use crate::error::{Error, Result};
use crate::model::hamiltonian::qubit_hamiltonian;
use crate::model::jumps::thermal_bath_jumps;
use crate::model::{spin_star_interaction, FiniteSpinEnv, MarkovianEnv, SpectralDensity};
use crate::observables::concurrence::concurrence;
use crate::observables::temperature::temperature_from_population;
use crate::quantum::{embed, partial_trace, tensor, tensor_states, DensityMatrix, HilbertLayout, Operator};

/// Rises in the concurrence series below this are treated as round-off.
pub const RISE_TOL: f64 = 1e-6;

/// Single-qubit thermal GKSL channels at one bath temperature, one per
/// coupling strength.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovFamily {
    pub tau: f64,
    pub omega_cut: f64,
    pub alphas: Vec<f64>,
}

impl MarkovFamily {
    /// `n` couplings spaced logarithmically over `[lo, hi]`.
    pub fn log_grid(tau: f64, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi >= lo) {
            return Err(Error::InvalidParameter(format!("coupling range [{lo}, {hi}]")));
        }
        let alphas = match n {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect(),
        };
        Ok(Self { tau, omega_cut: 1e3, alphas })
    }

    /// 50 couplings over `[1e-5, 1e-1]`.
    pub fn standard(tau: f64) -> Self {
        Self::log_grid(tau, 1e-5, 1e-1, 50).expect("static grid is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessResult {
    pub t: f64,
    pub lambda_nm: f64,
    /// Excited weight of the family member with the lowest defined temperature.
    pub lambda_m_best: Option<f64>,
    pub t_nm: Option<f64>,
    pub t_m_best: Option<f64>,
    /// `max(0, T_M - T_NM)`; `None` when either temperature is undefined.
    pub mc: Option<f64>,
}

/// Evaluates `M_C(t)` for a test channel given by its excited weights
/// `lambda_nm` at `times`. Every family member starts from `rho0`.
pub fn witness_mc(
    times: &[f64],
    lambda_nm: &[f64],
    family: &MarkovFamily,
    e_plus: f64,
    e_minus: f64,
    rho0: &DensityMatrix,
) -> Result<Vec<WitnessResult>> {
    if family.alphas.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if times.len() != lambda_nm.len() {
        return Err(Error::DimensionMismatch(format!("{} times for {} weights", times.len(), lambda_nm.len())));
    }
    let e1 = e_plus - e_minus;
    if !(e1 > 0.0) {
        return Err(Error::InvalidParameter(format!("level splitting E+ - E- = {e1}")));
    }
    if rho0.dim() != 2 || rho0.get(0, 1).norm() > 1e-12 {
        return Err(Error::InvalidState("witness channels start from a diagonal qubit state".into()));
    }
    let h = qubit_hamiltonian(e1);
    let opts = PropagationOptions::default();
    let weights: Vec<Vec<f64>> = family
        .alphas
        .par_iter()
        .map(|&alpha| {
            let env = MarkovianEnv::new(SpectralDensity::new(alpha, family.omega_cut)?, family.tau)?;
            let gen = GKSLGenerator::new(h.clone(), thermal_bath_jumps(&h, 0, &env)?)?;
            let traj = propagate_gksl(&gen, rho0, times, &opts)?;
            traj.excited_population(0)
        })
        .collect::<Result<_>>()?;

    Ok(times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let best = weights
                .iter()
                .filter_map(|w| temperature_from_population(w[i], e1).map(|tm| (tm, w[i])))
                .min_by(|a, b| a.0.total_cmp(&b.0));
            let t_nm = temperature_from_population(lambda_nm[i], e1);
            let mc = match (best, t_nm) {
                (Some((tm, _)), Some(tn)) => Some((tm - tn).max(0.0)),
                _ => None,
            };
            WitnessResult {
                t,
                lambda_nm: lambda_nm[i],
                lambda_m_best: best.map(|b| b.1),
                t_nm,
                t_m_best: best.map(|b| b.0),
                mc,
            }
        })
        .collect())
}

/// `(is_nonmonotonic, total_rise)` with `total_rise = sum max(0, C_{k+1} - C_k)`.
pub fn rhp_nonmonotonicity(series: &[f64]) -> Result<(bool, f64)> {
    if series.len() < 2 {
        return Err(Error::InvalidParameter("non-monotonicity needs at least two points".into()));
    }
    let rise: f64 = series.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum();
    Ok((rise > RISE_TOL, rise))
}

/// Concurrence between a qubit and a free auxiliary qubit, initially in
/// `(|00> + |11>)/sqrt(2)`, while the qubit (level spacing `e1`) exchanges
/// excitations with a spin-star environment. Layout: qubit, auxiliary,
/// environment spins.
pub fn rhp_concurrence_series(e1: f64, env: &FiniteSpinEnv, times: &[f64]) -> Result<Vec<f64>> {
    env.validate()?;
    crate::dynamics::validate_times(times)?;
    let pair = HilbertLayout::qubits(2);
    let layout = pair.concat(&env.layout());
    let h_local = tensor(&embed(qubit_hamiltonian(e1).matrix(), 0, &pair)?, &Operator::identity(env.layout()));
    let factors: Vec<usize> = (2..2 + env.n_spins).collect();
    let h = h_local.add(&spin_star_interaction(0, &factors, env, &layout)?)?;

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = c64::new(0.0, 0.0);
    let bell = DensityMatrix::pure(pair, &[c64::new(s, 0.0), zero, zero, c64::new(s, 0.0)])?;
    let rho0 = tensor_states(&bell, &env.thermal_state()?);
    let evo = ClosedEvolution::new(&h, &rho0, &[0])?;
    times
        .iter()
        .map(|&t| concurrence(&partial_trace(&evo.state_at(t)?, &[0, 1])?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::thermal_state;

    #[test]
    fn self_comparison_gives_zero() {
        let fam = MarkovFamily { tau: 1.0, omega_cut: 1e3, alphas: vec![1e-3] };
        let rho0 = DensityMatrix::maximally_mixed(HilbertLayout::qubits(1));
        let times: Vec<f64> = (0..=20).map(|k| k as f64).collect();
        // the test channel is the family member itself
        let env = MarkovianEnv::ohmic(1e-3, 1.0).unwrap();
        let h = qubit_hamiltonian(0.5);
        let gen = GKSLGenerator::new(h.clone(), thermal_bath_jumps(&h, 0, &env).unwrap()).unwrap();
        let lam = propagate_gksl(&gen, &rho0, &times, &PropagationOptions::default())
            .unwrap()
            .excited_population(0)
            .unwrap();
        let res = witness_mc(&times, &lam, &fam, 0.25, -0.25, &rho0).unwrap();
        // r = 1/2 at t = 0 is undefined, afterwards the witness vanishes
        assert!(res[0].mc.is_none());
        for r in &res[1..] {
            assert!(r.mc.unwrap() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn empty_family_is_an_error() {
        let fam = MarkovFamily { tau: 1.0, omega_cut: 1e3, alphas: vec![] };
        let rho0 = thermal_state(&qubit_hamiltonian(0.5), 1.0).unwrap();
        assert!(matches!(witness_mc(&[0.0], &[0.3], &fam, 0.25, -0.25, &rho0), Err(Error::EmptyFamily)));
    }

    #[test]
    fn larger_family_never_raises_the_witness() {
        let rho0 = DensityMatrix::maximally_mixed(HilbertLayout::qubits(1));
        let times = [1.0, 5.0, 20.0];
        let lam = [0.45, 0.4, 0.38];
        let small = MarkovFamily::log_grid(1.0, 1e-3, 1e-2, 3).unwrap();
        let mut big = small.clone();
        big.alphas.extend([1e-1, 3e-1]);
        let a = witness_mc(&times, &lam, &small, 0.25, -0.25, &rho0).unwrap();
        let b = witness_mc(&times, &lam, &big, 0.25, -0.25, &rho0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(y.mc.unwrap() <= x.mc.unwrap() + 1e-15);
        }
    }

    #[test]
    fn monotonic_series() {
        assert_eq!(rhp_nonmonotonicity(&[1.0, 0.8, 0.5, 0.1]).unwrap(), (false, 0.0));
        assert_eq!(rhp_nonmonotonicity(&[0.3, 0.3, 0.3]).unwrap(), (false, 0.0));
        let (flag, rise) = rhp_nonmonotonicity(&[1.0, 0.5, 0.7, 0.6, 0.9]).unwrap();
        assert!(flag && (rise - 0.5).abs() < 1e-15);
        assert!(rhp_nonmonotonicity(&[1.0]).is_err());
    }

    #[test]
    fn concurrence_revives_with_a_spin_environment() {
        let env = FiniteSpinEnv::new(2, 1.0).unwrap();
        let times: Vec<f64> = (0..=200).map(|k| 0.1 * k as f64).collect();
        let c = rhp_concurrence_series(1.0, &env, &times).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-7);
        let (flag, rise) = rhp_nonmonotonicity(&c).unwrap();
        assert!(flag && rise > 1e-3, "rise {rise}");
    }
}
