//! C ABI for `qfridge-core`.
//!
//! Every entry point returns a [`QfStatus`] (or a plain value where nothing can
//! fail) and never unwinds across the boundary. The message of the most recent
//! failure on the calling thread is available through [`qf_last_error`].
//! Complex matrices are passed as row-major arrays of interleaved
//! `(re, im)` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qfridge_core::c64;
use qfridge_core::model::{decay_rate, MarkovianEnv, SpectralDensity, ZeroFrequencyPolicy};
use qfridge_core::observables::{analytic_single_qubit_temperature, concurrence, local_temperature};
use qfridge_core::quantum::{DensityMatrix, HilbertLayout};
use qfridge_core::scenario::run_preset;
use qfridge_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Propagation = 4,
    /// The requested temperature is undefined (population inversion).
    Undefined = 5,
    Panic = 6,
}

/// Cold-qubit and per-qubit temperature series of a preset run.
pub struct QfTrajectory {
    times: Vec<f64>,
    /// `[qubit][sample] = (r_excited, temperature or NaN)`.
    series: Vec<Vec<(f64, f64)>>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> QfStatus {
    if err.is_config() {
        QfStatus::Config
    } else if matches!(err, Error::Integration { .. } | Error::Decomposition(_)) {
        QfStatus::Propagation
    } else {
        QfStatus::InvalidArgument
    }
}

fn guard(f: impl FnOnce() -> Result<(), (QfStatus, String)>) -> QfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QfStatus::Panic
        }
    }
}

fn core_err(err: Error) -> (QfStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (QfStatus, String) {
    (QfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (QfStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (QfStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn density(p: *const f64, dim: usize, factors: usize) -> Result<DensityMatrix, (QfStatus, String)> {
    if p.is_null() {
        return Err(null("rho"));
    }
    let raw = std::slice::from_raw_parts(p, 2 * dim * dim);
    let mat = faer::Mat::from_fn(dim, dim, |i, j| c64::new(raw[2 * (i * dim + j)], raw[2 * (i * dim + j) + 1]));
    let layout = HilbertLayout::new(vec![2; factors]).map_err(core_err)?;
    DensityMatrix::new(layout, mat).map_err(core_err)
}

/// Runs a catalog preset. `overrides` holds `n_overrides` strings of the form
/// `path=value` and may be null when `n_overrides` is 0. On success `*out`
/// owns a trajectory that must be released with [`qf_trajectory_free`].
///
/// # Safety
/// `name` must be a NUL-terminated string, `overrides` must point to
/// `n_overrides` such strings and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qf_run_preset(
    name: *const c_char,
    overrides: *const *const c_char,
    n_overrides: usize,
    out: *mut *mut QfTrajectory,
) -> QfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let name = c_str(name, "name")?;
        let mut sets = Vec::with_capacity(n_overrides);
        if n_overrides > 0 {
            if overrides.is_null() {
                return Err(null("overrides"));
            }
            for k in 0..n_overrides {
                sets.push(c_str(*overrides.add(k), "override")?.to_owned());
            }
        }
        let run = run_preset(name, &sets).map_err(core_err)?;
        let series = run
            .temperatures
            .iter()
            .map(|s| s.iter().map(|p| (p.r_excited, p.temperature.unwrap_or(f64::NAN))).collect())
            .collect();
        let traj = QfTrajectory { times: run.simulation.trajectory.times.clone(), series };
        *out = Box::into_raw(Box::new(traj));
        Ok(())
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle from [`qf_run_preset`].
#[no_mangle]
pub unsafe extern "C" fn qf_trajectory_len(traj: *const QfTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.times.len())
}

/// Number of system qubits; 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle from [`qf_run_preset`].
#[no_mangle]
pub unsafe extern "C" fn qf_trajectory_qubits(traj: *const QfTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.series.len())
}

/// Reads sample `index` of `qubit`. The temperature is NaN where undefined.
/// Any of the output pointers may be null.
///
/// # Safety
/// `traj` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn qf_trajectory_sample(
    traj: *const QfTrajectory,
    index: usize,
    qubit: usize,
    t: *mut f64,
    r_excited: *mut f64,
    temperature: *mut f64,
) -> QfStatus {
    guard(|| {
        let traj = traj.as_ref().ok_or_else(|| null("trajectory"))?;
        let (r, temp) = traj
            .series
            .get(qubit)
            .and_then(|s| s.get(index))
            .copied()
            .ok_or_else(|| (QfStatus::InvalidArgument, format!("sample {index} of qubit {qubit} out of range")))?;
        if !t.is_null() {
            *t = traj.times[index];
        }
        if !r_excited.is_null() {
            *r_excited = r;
        }
        if !temperature.is_null() {
            *temperature = temp;
        }
        Ok(())
    })
}

/// Releases a trajectory. Null is ignored.
///
/// # Safety
/// `traj` must be null or a handle from [`qf_run_preset`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qf_trajectory_free(traj: *mut QfTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Ohmic bath rate for signed transition frequency `freq`: emission for
/// `freq > 0`, absorption for `freq < 0`. At `freq == 0` the finite Ohmic
/// limit `alpha * tau` is returned.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qf_decay_rate(freq: f64, alpha: f64, omega_cut: f64, tau: f64, out: *mut f64) -> QfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !freq.is_finite() {
            return Err((QfStatus::InvalidArgument, format!("frequency {freq}")));
        }
        let spectral = SpectralDensity::new(alpha, omega_cut).map_err(core_err)?;
        let env = MarkovianEnv::new(spectral, tau).map_err(core_err)?.with_zero_frequency(ZeroFrequencyPolicy::OhmicLimit);
        *out = decay_rate(freq, &env).map_err(core_err)?;
        Ok(())
    })
}

/// Local temperature of a diagonal single-qubit state (8 doubles) with level
/// splitting `energy`. Returns [`QfStatus::Undefined`] under population
/// inversion.
///
/// # Safety
/// `rho` must point to 8 doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qf_local_temperature(rho: *const f64, energy: f64, out: *mut f64) -> QfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let rho = density(rho, 2, 1)?;
        let point = local_temperature(&rho, energy).map_err(core_err)?;
        match point.temperature {
            Some(t) => {
                *out = t;
                Ok(())
            }
            None => {
                *out = f64::NAN;
                Err((QfStatus::Undefined, format!("temperature undefined at excited population {}", point.r_excited)))
            }
        }
    })
}

/// Closed-form cold-qubit temperature of a single qubit exchanging with one
/// environment spin.
#[no_mangle]
pub extern "C" fn qf_analytic_single_qubit_temperature(t: f64, e1: f64, tau1: f64) -> f64 {
    catch_unwind(|| analytic_single_qubit_temperature(t, e1, tau1)).unwrap_or(f64::NAN)
}

/// Wootters concurrence of a two-qubit state (32 doubles).
///
/// # Safety
/// `rho` must point to 32 doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qf_concurrence(rho: *const f64, out: *mut f64) -> QfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let rho = density(rho, 4, 2)?;
        *out = concurrence(&rho).map_err(core_err)?;
        Ok(())
    })
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, so
/// a call with `len == 0` sizes the buffer.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn qf_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}
