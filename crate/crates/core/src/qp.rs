//! Quasiparticle density dynamics and recovery analysis.
//!
//! The normalized QP density obeys the rate equation
//! `dx/dt = -r x^2 - s x + g(t)` (recombination, trapping, generation). Pure
//! trapping decays as `x0 exp(-s t)`; pure recombination as
//! `x0 / (1 + r x0 t)`. The excess decay rate of the qubit maps to the excess
//! density through `dx = sqrt(pi hbar / (4 f_q Delta)) dGamma1`.

use serde::{Deserialize, Serialize};

use crate::constants::{FLUX_QUANTUM, HBAR, MICRO_EV, PLANCK_H};
use crate::error::{Error, Result};
use crate::ode;

/// Quasiparticle injection model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Injection {
    /// No injected quasiparticles.
    None,
    /// Instantaneous density jump of `x0` at time `at` (s).
    Jump { x0: f64, at: f64 },
    /// Rectangular generation pulse of amplitude `g` (s^-1) on [start, stop].
    Pulse { g: f64, start: f64, stop: f64 },
}

/// Rothwarf-Taylor coefficients, all in s^-1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RtParams {
    /// Recombination coefficient acting on x^2.
    pub r: f64,
    /// Trapping rate.
    pub s: f64,
    /// Constant background generation rate.
    pub g_background: f64,
    pub injection: Injection,
}

impl RtParams {
    pub fn validate(&self) -> Result<()> {
        if self.r < 0.0 || self.s < 0.0 || self.g_background < 0.0 {
            return Err(Error::InvalidParameter(
                "r, s and g_background must be nonnegative".into(),
            ));
        }
        match self.injection {
            Injection::Jump { x0, .. } if x0 < 0.0 => {
                Err(Error::InvalidParameter("injection x0 must be >= 0".into()))
            }
            Injection::Pulse { g, start, stop } if g < 0.0 || stop <= start => Err(
                Error::InvalidParameter("pulse needs g >= 0 and stop > start".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Steady-state density under the constant background: the positive root
    /// of r x^2 + s x = g.
    pub fn steady_state(&self) -> f64 {
        let g = self.g_background;
        if g == 0.0 {
            0.0
        } else if self.r > 0.0 {
            (-self.s + (self.s * self.s + 4.0 * self.r * g).sqrt()) / (2.0 * self.r)
        } else if self.s > 0.0 {
            g / self.s
        } else {
            0.0
        }
    }
}

/// Normalized QP density time series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QpTrace {
    pub times: Vec<f64>,
    pub x_qp: Vec<f64>,
}

impl QpTrace {
    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.x_qp.len() {
            return Err(Error::InvalidParameter("times/x_qp length mismatch".into()));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("times must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// Superconducting gap and qubit frequency for the decay-rate conversion.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GapParams {
    /// Gap of the junction electrodes, micro-eV.
    pub delta_uev: f64,
    /// Qubit frequency, GHz.
    pub f_q_ghz: f64,
}

impl GapParams {
    pub fn new(delta_uev: f64, f_q_ghz: f64) -> Result<Self> {
        if !(delta_uev > 0.0) || !(f_q_ghz > 0.0) {
            return Err(Error::InvalidParameter("delta and f_q must be > 0".into()));
        }
        let p = Self { delta_uev, f_q_ghz };
        if PLANCK_H * p.f_q_hz() >= 2.0 * p.delta_joule() {
            return Err(Error::InvalidParameter(
                "qubit photon energy must be below the pair-breaking threshold 2*delta".into(),
            ));
        }
        Ok(p)
    }

    pub fn delta_joule(&self) -> f64 {
        self.delta_uev * MICRO_EV
    }

    pub fn f_q_hz(&self) -> f64 {
        self.f_q_ghz * 1e9
    }

    /// Pair-breaking threshold frequency 2*delta/h, Hz.
    pub fn pair_breaking_freq_hz(&self) -> f64 {
        2.0 * self.delta_joule() / PLANCK_H
    }
}

/// Excess normalized QP density from the excess qubit decay rate.
pub fn xqp_from_gamma1(delta_gamma1: f64, gap: &GapParams) -> Result<f64> {
    if delta_gamma1 < 0.0 {
        return Err(Error::InvalidParameter("delta_gamma1 must be >= 0".into()));
    }
    let factor = (std::f64::consts::PI * HBAR / (4.0 * gap.f_q_hz() * gap.delta_joule())).sqrt();
    Ok(factor * delta_gamma1)
}

/// Inverse of [`xqp_from_gamma1`]; exact roundtrip.
pub fn gamma1_from_xqp(x_qp: f64, gap: &GapParams) -> Result<f64> {
    if x_qp < 0.0 {
        return Err(Error::InvalidParameter("x_qp must be >= 0".into()));
    }
    let factor = (std::f64::consts::PI * HBAR / (4.0 * gap.f_q_hz() * gap.delta_joule())).sqrt();
    Ok(x_qp / factor)
}

/// Integrate the rate equation on `t_grid`, starting from the background
/// steady state. Integration restarts at injection discontinuities.
pub fn integrate_rt(params: &RtParams, t_grid: &[f64]) -> Result<QpTrace> {
    params.validate()?;
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "t_grid must be nonempty and strictly increasing".into(),
        ));
    }
    if t_grid[0] < 0.0 {
        return Err(Error::InvalidParameter("t_grid must start at t >= 0".into()));
    }
    // Step control is tighter than the 1e-8 closed-form contract so that
    // accumulated error stays below it.
    let rtol = 1e-11;
    let atol = 1e-30;
    let t_end = *t_grid.last().unwrap();

    // Breakpoints where the right-hand side or the state jumps.
    let mut breaks: Vec<f64> = vec![0.0];
    match params.injection {
        Injection::None => {}
        Injection::Jump { at, .. } => breaks.push(at),
        Injection::Pulse { start, stop, .. } => {
            breaks.push(start);
            breaks.push(stop);
        }
    }
    breaks.retain(|&b| b >= 0.0 && b < t_end);
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();
    breaks.push(t_end);

    let mut times = Vec::with_capacity(t_grid.len());
    let mut values = Vec::with_capacity(t_grid.len());
    let mut x = params.steady_state();
    let mut grid_idx = 0usize;
    for win in breaks.windows(2) {
        let (seg_start, seg_end) = (win[0], win[1]);
        // The generation rate is constant within a segment; deciding it at
        // the midpoint keeps the pulse edges out of the RK stages.
        let mid = 0.5 * (seg_start + seg_end);
        let g_seg = params.g_background
            + match params.injection {
                Injection::Pulse { g, start, stop } if mid >= start && mid < stop => g,
                _ => 0.0,
            };
        let rhs = |_t: f64, x: f64| -> f64 { -params.r * x * x - params.s * x + g_seg };
        if let Injection::Jump { x0, at } = params.injection {
            if (seg_start - at).abs() < 1e-300 || seg_start == at {
                x += x0;
            }
        }
        let mut seg_out: Vec<f64> = Vec::new();
        while grid_idx < t_grid.len() && t_grid[grid_idx] <= seg_end {
            seg_out.push(t_grid[grid_idx]);
            grid_idx += 1;
        }
        let needs_end = seg_out.last().copied() != Some(seg_end);
        let mut targets = seg_out.clone();
        if needs_end {
            targets.push(seg_end);
        }
        let xs = ode::integrate(rhs, seg_start, x, &targets, rtol, atol)?;
        for (t, v) in seg_out.iter().zip(&xs) {
            times.push(*t);
            values.push(v.max(0.0));
        }
        x = xs.last().copied().unwrap_or(x).max(0.0);
    }
    Ok(QpTrace { times, x_qp: values })
}

/// Trapping-rate fit result.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrappingFit {
    /// Trapping rate, s^-1.
    pub s: f64,
    /// Initial excess density.
    pub x0: f64,
    /// Standard error of s.
    pub s_stderr: f64,
    /// Standard error of x0.
    pub x0_stderr: f64,
    /// Set when the trace spans less than one decade of density, where the
    /// exponential fit is poorly constrained.
    pub low_confidence: bool,
}

/// Weighted log-linear least squares of `x(t) = x0 exp(-s t)`.
///
/// Weights are x^2, the inverse variance of ln(x) under additive noise on x.
pub fn fit_trapping_rate(trace: &QpTrace) -> Result<TrappingFit> {
    trace.validate()?;
    if trace.times.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "need >= 4 points, got {}",
            trace.times.len()
        )));
    }
    if trace.x_qp.iter().any(|&x| x <= 0.0) {
        return Err(Error::NonPositiveTrace);
    }
    let n = trace.times.len();
    let (mut sw, mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&t, &x) in trace.times.iter().zip(&trace.x_qp) {
        let w = x * x;
        let y = x.ln();
        sw += w;
        st += w * t;
        sy += w * y;
        stt += w * t * t;
        sty += w * t * y;
    }
    let det = sw * stt - st * st;
    if det.abs() < 1e-300 {
        return Err(Error::DegenerateInput("time grid has no spread".into()));
    }
    let slope = (sw * sty - st * sy) / det;
    let intercept = (stt * sy - st * sty) / det;
    let s = -slope;
    let x0 = intercept.exp();

    let mut chi2 = 0.0;
    for (&t, &x) in trace.times.iter().zip(&trace.x_qp) {
        let r = x.ln() - (intercept + slope * t);
        chi2 += x * x * r * r;
    }
    let dof = (n - 2).max(1) as f64;
    let sigma2 = chi2 / dof;
    let slope_var = sigma2 * sw / det;
    let intercept_var = sigma2 * stt / det;

    let max = trace.x_qp.iter().cloned().fold(f64::MIN, f64::max);
    let min = trace.x_qp.iter().cloned().fold(f64::MAX, f64::min);
    Ok(TrappingFit {
        s,
        x0,
        s_stderr: slope_var.max(0.0).sqrt(),
        x0_stderr: x0 * intercept_var.max(0.0).sqrt(),
        low_confidence: max / min < 10.0,
    })
}

/// Critical field for vortex expulsion, Phi0 / w^2, in tesla for w in meters.
pub fn vortex_threshold_tesla(w_m: f64) -> Result<f64> {
    if !(w_m > 0.0) {
        return Err(Error::InvalidParameter(format!("w must be > 0, got {w_m}")));
    }
    Ok(FLUX_QUANTUM / (w_m * w_m))
}

/// Same threshold with the interface units of the device tables: micrometers
/// in, microtesla out.
pub fn vortex_threshold_ut(w_um: f64) -> Result<f64> {
    Ok(vortex_threshold_tesla(w_um * 1e-6)? * 1e6)
}
