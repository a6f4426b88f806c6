//! Adaptive Dormand–Prince 5(4) integration with an optional projection
//! applied after every accepted step.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub rtol: T,
    pub atol: T,
    /// Smallest admissible step before giving up.
    pub h_min: T,
    pub max_steps: usize,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-10),
            atol: T::lit(1e-10),
            h_min: T::lit(1e-14),
            max_steps: 2_000_000,
        }
    }
}

/// One sample of a trajectory on the output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub t: T,
    pub y: Vec<T>,
    /// Last step size used to reach `t`.
    pub h: T,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights are the last row of A; these are the fourth-order ones
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` over `duration > 0`, reporting the state
/// every `dt` (and at the end). `project` is applied to each accepted state.
pub fn integrate<T, F, P>(
    mut f: F,
    mut project: P,
    y0: &[T],
    t0: T,
    duration: T,
    dt: T,
    tol: &Tolerances<T>,
) -> Result<Vec<Sample<T>>>
where
    T: Real,
    F: FnMut(T, &[T]) -> Result<Vec<T>>,
    P: FnMut(&mut [T]),
{
    if !(duration >= T::zero()) || !(dt > T::zero()) {
        return Err(Error::OutOfRange {
            what: "duration >= 0 and dt > 0",
            value: dt.to_f64_lossy(),
        });
    }
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let t_end = t0 + duration;
    let mut h = dt.min(T::lit(1e-2)).max(tol.h_min);
    let mut out = vec![Sample {
        t,
        y: y.clone(),
        h: T::zero(),
    }];
    let mut next_out = 1usize;
    let mut k: Vec<Vec<T>> = vec![vec![T::zero(); dim]; 7];
    k[0] = f(t, &y)?;
    let mut steps = 0usize;
    let safety = T::lit(0.9);
    let expo = T::lit(0.2);

    while t < t_end {
        let target = (t0 + T::from_usize_lossy(next_out) * dt).min(t_end);
        let hit = h >= target - t;
        let h_try = if hit { target - t } else { h };
        if h_try < tol.h_min && !hit {
            return Err(Error::StepSizeUnderflow {
                t: t.to_f64_lossy(),
                h: h_try.to_f64_lossy(),
            });
        }
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::StepSizeUnderflow {
                t: t.to_f64_lossy(),
                h: h_try.to_f64_lossy(),
            });
        }
        let mut stage = vec![T::zero(); dim];
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = y[i];
                for (r, kr) in k.iter().enumerate().take(s) {
                    acc = acc + h_try * T::lit(A[s][r]) * kr[i];
                }
                stage[i] = acc;
            }
            k[s] = f(t + T::lit(C[s]) * h_try, &stage)?;
        }
        // stage now holds the fifth-order solution (FSAL)
        let mut err = T::zero();
        for i in 0..dim {
            let mut low = y[i];
            for (r, kr) in k.iter().enumerate() {
                low = low + h_try * T::lit(B4[r]) * kr[i];
            }
            let sc = tol.atol + tol.rtol * y[i].abs().max(stage[i].abs());
            let e = (stage[i] - low) / sc;
            err = err + e * e;
        }
        let err = (err / T::from_usize_lossy(dim.max(1))).sqrt();
        let factor = if err > T::zero() {
            (safety * err.powf(-expo)).max(T::lit(0.2)).min(T::lit(5.0))
        } else {
            T::lit(5.0)
        };
        if err <= T::one() {
            t = if hit { target } else { t + h_try };
            y = stage;
            project(&mut y);
            k[0] = f(t, &y)?;
            if hit {
                out.push(Sample {
                    t,
                    y: y.clone(),
                    h: h_try,
                });
                next_out += 1;
            } else {
                h = h_try * factor;
            }
            if hit && factor < T::one() {
                h = h.min(h_try * factor);
            }
        } else {
            h = h_try * factor;
            if h < tol.h_min {
                return Err(Error::StepSizeUnderflow {
                    t: t.to_f64_lossy(),
                    h: h.to_f64_lossy(),
                });
            }
        }
    }
    Ok(out)
}
