//! Embedded Dormand-Prince 5(4) integration of a block GKSL generator.

use faer::c64;

use crate::dynamics::sector::BlockGenerator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkOptions {
    /// Absolute local error tolerance per matrix entry. Global errors run
    /// roughly twenty times larger over long horizons.
    pub atol: f64,
    /// A step is rejected when it moves the trace by more than this.
    pub trace_tol: f64,
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for RkOptions {
    fn default() -> Self {
        Self { atol: 1e-11, trace_tol: 1e-10, initial_step: None, max_steps: 50_000_000 }
    }
}

/// Integration statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RkStats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn max_norm(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Integrates `dx/dt = G x` from `x0` at `t = 0`, calling `record(i, x)` at
/// every sample time `times[i]`. Steps are shortened to land exactly on
/// sample times.
pub fn integrate(
    gen: &BlockGenerator,
    x0: &[c64],
    times: &[f64],
    opts: &RkOptions,
    mut record: impl FnMut(usize, &[c64]) -> Result<()>,
) -> Result<RkStats> {
    let n = x0.len();
    let s = gen.structure();
    let zero = c64::new(0.0, 0.0);
    let mut y = x0.to_vec();
    let trace0 = s.trace(&y);
    let mut k: Vec<Vec<c64>> = vec![vec![zero; n]; 7];
    let mut tmp = vec![zero; n];
    let mut stats = RkStats::default();

    gen.apply_hermitian(&y, &mut k[0]);
    let mut h = opts.initial_step.unwrap_or_else(|| {
        let d0 = max_norm(&y);
        let d1 = max_norm(&k[0]);
        if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        }
    });
    let mut t = 0.0f64;

    for (i, &target) in times.iter().enumerate() {
        while t < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::Integration { t, reason: format!("step budget of {} exhausted", opts.max_steps) });
            }
            let clipped = t + h >= target;
            let step = if clipped { target - t } else { h };
            if step < 1e-14 * t.max(1.0) {
                return Err(Error::Integration { t, reason: format!("step size underflow ({step:e})") });
            }

            for stage in 1..7 {
                let row = &C[stage - 1];
                for j in 0..n {
                    let mut acc = zero;
                    for (c, kk) in row.iter().zip(&k).take(stage) {
                        if *c != 0.0 {
                            acc += kk[j] * *c;
                        }
                    }
                    tmp[j] = y[j] + acc * step;
                }
                let (done, rest) = k.split_at_mut(stage);
                let _ = done;
                gen.apply_hermitian(&tmp, &mut rest[0]);
            }
            // tmp now holds the fifth-order solution (the last stage input)
            let mut err = 0.0f64;
            for j in 0..n {
                let mut e = zero;
                for (w, kk) in E.iter().zip(&k) {
                    if *w != 0.0 {
                        e += kk[j] * *w;
                    }
                }
                err = err.max((e * step).norm());
            }
            let err = err / opts.atol;
            let drift = (s.trace(&tmp) - trace0).norm();

            if err <= 1.0 && drift <= opts.trace_tol {
                t = if clipped { target } else { t + step };
                std::mem::swap(&mut y, &mut tmp);
                k.swap(0, 6);
                stats.accepted += 1;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !clipped || step * factor > h {
                    h = step * factor;
                }
            } else {
                stats.rejected += 1;
                let factor = if err > 1.0 { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.5 };
                h = step * factor;
            }
        }
        record(i, &y)?;
    }
    Ok(stats)
}
