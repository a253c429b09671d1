//! Junction-antenna coupling and blackbody-driven parity rates.
//!
//! The junction is a lumped RCSJ load `Y_j = 1/R_n + i 2 pi f C_j`. The
//! fraction of incident pair-breaking radiation delivered to it is the
//! conjugate-mismatch efficiency
//! `e_c(f) = 1 - |(Z_rad - Z_j*) / (Z_rad + Z_j)|^2`, and the predicted
//! parity rate is the single-mode photon flux weighted by that efficiency,
//! `rate = scale * integral e_c(f) / (exp(h f / kB T*) - 1) df` over the
//! band above the pair-breaking threshold `2 Delta / h`. With e_c
//! dimensionless and df in Hz the integral carries units of s^-1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN_KB, PLANCK_H};
use crate::error::{Error, Result};

/// Resistively and capacitively shunted junction parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RcsjParams {
    /// Normal-state resistance, ohm.
    pub r_n: f64,
    /// Junction self-capacitance, farad.
    pub c_j: f64,
}

impl RcsjParams {
    pub fn new(r_n: f64, c_j: f64) -> Result<Self> {
        if !(r_n > 0.0) {
            return Err(Error::InvalidParameter(format!("r_n must be > 0, got {r_n}")));
        }
        if c_j < 0.0 {
            return Err(Error::InvalidParameter(format!("c_j must be >= 0, got {c_j}")));
        }
        Ok(Self { r_n, c_j })
    }
}

/// RCSJ junction impedance at frequency f.
pub fn junction_impedance(params: &RcsjParams, f: f64) -> Result<Complex64> {
    if !(f > 0.0) {
        return Err(Error::InvalidParameter(format!("f must be > 0, got {f}")));
    }
    let y = Complex64::new(1.0 / params.r_n, 2.0 * std::f64::consts::PI * f * params.c_j);
    Ok(y.inv())
}

/// Conjugate-mismatch coupling efficiency.
pub fn coupling_efficiency(z_rad: Complex64, z_j: Complex64) -> Result<f64> {
    if z_rad.re < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "passive antenna requires Re(z_rad) >= 0, got {}",
            z_rad.re
        )));
    }
    if !(z_j.re > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "junction requires Re(z_j) > 0, got {}",
            z_j.re
        )));
    }
    let den = z_rad + z_j;
    if den.norm() == 0.0 {
        return Err(Error::SingularInput("z_rad + z_j = 0".into()));
    }
    let gamma = (z_rad - z_j.conj()) / den;
    // Clamp the tiny negative excursions of exact conjugate matches.
    Ok((1.0 - gamma.norm_sqr()).clamp(0.0, 1.0))
}

/// Tabulated radiation impedance versus frequency.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImpedanceTable {
    /// Frequency grid, Hz, strictly increasing.
    pub freqs: Vec<f64>,
    pub z_real: Vec<f64>,
    pub z_imag: Vec<f64>,
    pub source_label: String,
}

impl ImpedanceTable {
    pub fn new(freqs: Vec<f64>, z_real: Vec<f64>, z_imag: Vec<f64>, source_label: &str) -> Result<Self> {
        let t = Self { freqs, z_real, z_imag, source_label: source_label.to_string() };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.freqs.len() < 2
            || self.freqs.len() != self.z_real.len()
            || self.freqs.len() != self.z_imag.len()
        {
            return Err(Error::InvalidParameter(
                "impedance table needs >= 2 rows of equal length".into(),
            ));
        }
        if self.freqs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("table freqs must be strictly increasing".into()));
        }
        if self.z_real.iter().any(|&r| r < 0.0) {
            return Err(Error::InvalidParameter("passive antenna requires Re(Z) >= 0".into()));
        }
        Ok(())
    }

    pub fn z_at(&self, f: f64) -> Complex64 {
        let (re, im) = (interp(&self.freqs, &self.z_real, f), interp(&self.freqs, &self.z_imag, f));
        Complex64::new(re, im)
    }
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|&v| v < x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let w = (x - x0) / (x1 - x0);
    ys[i - 1] * (1.0 - w) + ys[i] * w
}

/// Coupling efficiency versus frequency, either tabulated or constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EfficiencyCurve {
    pub freqs: Vec<f64>,
    pub e_c: Vec<f64>,
}

impl EfficiencyCurve {
    /// Derive from a radiation-impedance table and RCSJ junction parameters,
    /// evaluated on the table's own grid.
    pub fn from_impedance(table: &ImpedanceTable, rcsj: &RcsjParams) -> Result<Self> {
        table.validate()?;
        let mut e_c = Vec::with_capacity(table.freqs.len());
        for (i, &f) in table.freqs.iter().enumerate() {
            let z_j = junction_impedance(rcsj, f)?;
            let z_rad = Complex64::new(table.z_real[i], table.z_imag[i]);
            e_c.push(coupling_efficiency(z_rad, z_j)?);
        }
        Ok(Self { freqs: table.freqs.clone(), e_c })
    }

    /// Constant efficiency over [f_lo, f_hi].
    pub fn constant(value: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) || !(f_hi > f_lo) {
            return Err(Error::InvalidParameter("need 0 <= e_c <= 1 and f_hi > f_lo".into()));
        }
        Ok(Self { freqs: vec![f_lo, f_hi], e_c: vec![value, value] })
    }

    pub fn covers(&self, f_lo: f64, f_hi: f64) -> bool {
        self.freqs[0] <= f_lo && *self.freqs.last().unwrap() >= f_hi
    }

    pub fn at(&self, f: f64) -> f64 {
        interp(&self.freqs, &self.e_c, f)
    }

    /// Plain band integral of e_c, for table comparisons.
    pub fn band_integral(&self, f_lo: f64, f_hi: f64) -> f64 {
        let n = 200_000;
        let df = (f_hi - f_lo) / n as f64;
        (0..n).map(|i| self.at(f_lo + (i as f64 + 0.5) * df)).sum::<f64>() * df
    }
}

/// Single-mode blackbody source and integration band.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BlackbodySource {
    /// Effective temperature, K.
    pub t_star: f64,
    /// Pair-breaking threshold 2 Delta / h, Hz.
    pub f_min: f64,
    /// Integration cutoff, Hz.
    pub f_max: f64,
}

impl BlackbodySource {
    pub const DEFAULT_F_MAX: f64 = 400e9;

    pub fn new(t_star: f64, f_min: f64, f_max: f64) -> Result<Self> {
        if !(t_star > 0.0) {
            return Err(Error::InvalidParameter(format!("t_star must be > 0, got {t_star}")));
        }
        if !(f_min < f_max) {
            return Err(Error::InvalidParameter(format!(
                "need f_min < f_max, got {f_min} >= {f_max}"
            )));
        }
        Ok(Self { t_star, f_min, f_max })
    }
}

/// Bose-Einstein photon occupancy, computed in underflow-safe form.
pub fn bose_occupancy(f: f64, t: f64) -> f64 {
    let x = PLANCK_H * f / (BOLTZMANN_KB * t);
    let e = (-x).exp();
    e / (1.0 - e)
}

/// Adaptive Simpson quadrature on [a, b].
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, rtol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    let eps = rtol * whole.abs().max(1e-300);
    recurse(f, a, b, fa, fm, fb, whole, eps, 40)
}

/// Blackbody-integrated parity rate, s^-1.
///
/// The efficiency curve is piecewise linear between its grid points, so the
/// quadrature is split at the knots inside the band.
pub fn parity_rate_from_blackbody(
    curve: &EfficiencyCurve,
    source: &BlackbodySource,
    efficiency_scale: f64,
) -> Result<f64> {
    if !(efficiency_scale > 0.0 && efficiency_scale <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "efficiency_scale must be in (0, 1], got {efficiency_scale}"
        )));
    }
    if !curve.covers(source.f_min, source.f_max) {
        return Err(Error::BandNotCovered {
            table_lo: curve.freqs[0],
            table_hi: *curve.freqs.last().unwrap(),
            band_lo: source.f_min,
            band_hi: source.f_max,
        });
    }
    let integrand = |f: f64| curve.at(f) * bose_occupancy(f, source.t_star);
    let mut knots: Vec<f64> = vec![source.f_min];
    knots.extend(
        curve
            .freqs
            .iter()
            .copied()
            .filter(|&f| f > source.f_min && f < source.f_max),
    );
    knots.push(source.f_max);
    let mut total = 0.0;
    for win in knots.windows(2) {
        total += adaptive_simpson(&integrand, win[0], win[1], 1e-9);
    }
    Ok(efficiency_scale * total)
}

/// Invert the rate model for the effective temperature, to 0.01 mK.
pub fn invert_t_star(
    target_rate: f64,
    curve: &EfficiencyCurve,
    f_min: f64,
    f_max: f64,
    efficiency_scale: f64,
) -> Result<f64> {
    if !(target_rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "target_rate must be > 0, got {target_rate}"
        )));
    }
    let rate_at = |t: f64| -> Result<f64> {
        parity_rate_from_blackbody(curve, &BlackbodySource::new(t, f_min, f_max)?, efficiency_scale)
    };
    let (mut lo, mut hi) = (0.01, 10.0);
    let r_lo = rate_at(lo)?;
    let r_hi = rate_at(hi)?;
    if !(r_lo <= target_rate && target_rate <= r_hi) {
        return Err(Error::BracketFailure {
            lo,
            hi,
            f_lo: r_lo - target_rate,
            f_hi: r_hi - target_rate,
        });
    }
    while hi - lo > 1e-5 {
        let mid = 0.5 * (lo + hi);
        if rate_at(mid)? < target_rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Built-in synthetic radiation-impedance tables.
///
/// These are toy series-RLC antenna models, labeled synthetic: a broad
/// resonance near 150 GHz for the ground-plane-connected geometry and a
/// weaker, shifted one for the isolated two-pad geometry. With the default
/// junction parameters their band-integrated efficiencies differ by roughly
/// a factor of two.
pub mod synthetic {
    use super::*;

    /// Default junction used with the shipped tables.
    pub fn default_rcsj() -> RcsjParams {
        RcsjParams { r_n: 10e3, c_j: 1e-15 }
    }

    fn rlc_table(
        label: &str,
        r_peak: f64,
        f0: f64,
        q: f64,
        l_henry: f64,
    ) -> ImpedanceTable {
        let freqs: Vec<f64> = (0..=1440).map(|i| 80e9 + i as f64 * 0.5e9).collect();
        let mut z_real = Vec::with_capacity(freqs.len());
        let mut z_imag = Vec::with_capacity(freqs.len());
        for &f in &freqs {
            let detune = q * (f / f0 - f0 / f);
            z_real.push(2.0 + r_peak / (1.0 + detune * detune));
            z_imag.push(2.0 * std::f64::consts::PI * f * l_henry);
        }
        ImpedanceTable::new(freqs, z_real, z_imag, label).expect("static table is valid")
    }

    /// Broad resonance near 150 GHz; the better-matched geometry.
    pub fn xmon_like() -> ImpedanceTable {
        rlc_table("synthetic-xmon-like", 240.0, 150e9, 2.2, 1.06e-9)
    }

    /// Weaker, shifted resonance; the galvanically isolated geometry.
    pub fn two_pads_like() -> ImpedanceTable {
        rlc_table("synthetic-two-pads-like", 70.0, 180e9, 2.8, 1.06e-9)
    }
}
