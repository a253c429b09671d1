//! Scalar adaptive Runge-Kutta (Dormand-Prince 5(4)) with PI-free step
//! control, used by the quasiparticle rate equation.

use crate::error::{Error, Result};

const A2: f64 = 1.0 / 5.0;
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

/// Integrate dx/dt = f(t, x) from (t0, x0), returning x at each requested
/// time. `t_out` must be increasing and start at or after t0.
pub fn integrate<F: Fn(f64, f64) -> f64>(
    f: F,
    t0: f64,
    x0: f64,
    t_out: &[f64],
    rtol: f64,
    atol: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(t_out.len());
    let mut t = t0;
    let mut x = x0;
    let t_end = match t_out.last() {
        Some(&t) => t,
        None => return Ok(out),
    };
    let mut h = ((t_end - t0) / 100.0).max(1e-14);
    let mut next_out = 0usize;
    while next_out < t_out.len() && t_out[next_out] <= t0 + 1e-300 {
        out.push(x0);
        next_out += 1;
    }
    let mut k1 = f(t, x);
    while next_out < t_out.len() {
        let target = t_out[next_out];
        if t + h > target {
            h = target - t;
        }
        if h < 1e-16 * target.abs().max(1.0) {
            // Already at the output point to machine precision.
            out.push(x);
            next_out += 1;
            h = ((t_end - t) / 100.0).max(1e-14);
            continue;
        }
        let k2 = f(t + C[0] * h, x + h * A2 * k1);
        let k3 = f(t + C[1] * h, x + h * (A3[0] * k1 + A3[1] * k2));
        let k4 = f(t + C[2] * h, x + h * (A4[0] * k1 + A4[1] * k2 + A4[2] * k3));
        let k5 = f(
            t + C[3] * h,
            x + h * (A5[0] * k1 + A5[1] * k2 + A5[2] * k3 + A5[3] * k4),
        );
        let k6 = f(
            t + C[4] * h,
            x + h * (A6[0] * k1 + A6[1] * k2 + A6[2] * k3 + A6[3] * k4 + A6[4] * k5),
        );
        let x5 = x + h * (B5[0] * k1 + B5[2] * k3 + B5[3] * k4 + B5[4] * k5 + B5[5] * k6);
        let k7 = f(t + h, x5);
        let x4 = x
            + h * (B4[0] * k1 + B4[2] * k3 + B4[3] * k4 + B4[4] * k5 + B4[5] * k6 + B4[6] * k7);
        let scale = atol + rtol * x.abs().max(x5.abs());
        let err = ((x5 - x4) / scale).abs();
        if err <= 1.0 {
            t += h;
            x = x5;
            k1 = k7; // FSAL
            while next_out < t_out.len() && t_out[next_out] <= t + 1e-16 * t.abs().max(1.0) {
                out.push(x);
                next_out += 1;
            }
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h < 1e-15 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, x, step: h });
        }
    }
    Ok(out)
}
