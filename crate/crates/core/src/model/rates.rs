//! Ohmic spectral density and the thermal decay-rate law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CUTOFF: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub alpha: f64,
    #[serde(default = "default_cutoff")]
    pub omega_cut: f64,
}

fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF
}

impl SpectralDensity {
    pub fn new(alpha: f64, omega_cut: f64) -> Result<Self> {
        let s = Self { alpha, omega_cut };
        s.validate()?;
        Ok(s)
    }

    pub fn ohmic(alpha: f64) -> Result<Self> {
        Self::new(alpha, DEFAULT_CUTOFF)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("coupling alpha = {}", self.alpha)));
        }
        if !(self.omega_cut > 0.0) {
            return Err(Error::InvalidParameter(format!("cutoff frequency = {}", self.omega_cut)));
        }
        Ok(())
    }

    /// `J(w) = alpha w exp(-w / omega_cut)` for `w >= 0`.
    pub fn eval(&self, omega: f64) -> f64 {
        self.alpha * omega * (-omega / self.omega_cut).exp()
    }
}

/// How the rate is defined at exactly zero transition frequency, where the
/// Bose-Einstein factor diverges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroFrequencyPolicy {
    /// The finite limit `J(w) f(w) -> alpha tau` as `w -> 0`.
    OhmicLimit,
    /// Zero rate; pure dephasing terms are switched off.
    Vanish,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovianEnv {
    pub spectral: SpectralDensity,
    pub tau: f64,
    /// `None` rejects zero-frequency rate requests.
    #[serde(default)]
    pub zero_frequency: Option<ZeroFrequencyPolicy>,
}

impl MarkovianEnv {
    pub fn new(spectral: SpectralDensity, tau: f64) -> Result<Self> {
        let env = Self { spectral, tau, zero_frequency: None };
        env.validate()?;
        Ok(env)
    }

    pub fn ohmic(alpha: f64, tau: f64) -> Result<Self> {
        Self::new(SpectralDensity::ohmic(alpha)?, tau)
    }

    pub fn with_zero_frequency(mut self, policy: ZeroFrequencyPolicy) -> Self {
        self.zero_frequency = Some(policy);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.spectral.validate()?;
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("bath temperature tau = {}", self.tau)));
        }
        Ok(())
    }
}

/// Bose-Einstein occupation `1 / (exp(w / tau) - 1)` for `w > 0`.
pub fn bose_einstein(omega: f64, tau: f64) -> f64 {
    1.0 / (omega / tau).exp_m1()
}

/// Decay rate for a signed transition frequency: emission (`freq > 0`) goes
/// as `J (1 + f)`, absorption as `J f`.
pub fn decay_rate(freq: f64, env: &MarkovianEnv) -> Result<f64> {
    let alpha = env.spectral.alpha;
    if freq == 0.0 {
        return match env.zero_frequency {
            Some(ZeroFrequencyPolicy::OhmicLimit) => Ok(alpha * env.tau),
            Some(ZeroFrequencyPolicy::Vanish) => Ok(0.0),
            None => Err(Error::ZeroFrequency),
        };
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let w = freq.abs();
    let j = env.spectral.eval(w);
    let f = bose_einstein(w, env.tau);
    Ok(if freq > 0.0 { j * (1.0 + f) } else { j * f })
}
