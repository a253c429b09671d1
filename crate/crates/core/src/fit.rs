//! Telegraph-model spectral fit.
//!
//! `S(f) = A G / (G^2 + (pi f)^2) + C` is fitted by damped Gauss-Newton in
//! log-transformed parameters so A, G and C stay positive. Residuals are
//! weighted inverse-variance for averaged periodograms (sigma ~ S / sqrt(K)
//! per bin with K averaged segments).

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::PowerSpectrum;

/// Result of the telegraph-model fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LorentzianFit {
    /// Amplitude A.
    pub a: f64,
    /// Switching rate G (s^-1).
    pub rate: f64,
    /// White floor C (1/Hz).
    pub c: f64,
    /// Covariance of (a, rate, c).
    pub covariance: [[f64; 3]; 3],
    /// Weighted residual norm at the solution.
    pub residual_norm: f64,
    /// Set when the fitted rate is at or beyond the sampling bandwidth
    /// (G * dt > 1); such a rate is aliased and should not be trusted.
    pub rate_unresolved: bool,
}

impl LorentzianFit {
    pub fn model(&self, f: f64) -> f64 {
        eval_model(self.a, self.rate, self.c, f)
    }

    /// Standard errors of (a, rate, c).
    pub fn stderr(&self) -> [f64; 3] {
        [
            self.covariance[0][0].max(0.0).sqrt(),
            self.covariance[1][1].max(0.0).sqrt(),
            self.covariance[2][2].max(0.0).sqrt(),
        ]
    }
}

fn eval_model(a: f64, rate: f64, c: f64, f: f64) -> f64 {
    let u = (std::f64::consts::PI * f).powi(2);
    a * rate / (rate * rate + u) + c
}

/// Linear weighted least squares for (A, C) at fixed rate.
fn linear_ac(spectrum: &PowerSpectrum, rate: f64, weights: &[f64]) -> (f64, f64) {
    let (mut sgg, mut sg1, mut s11, mut sgy, mut s1y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&f, &s), &w) in spectrum.freqs.iter().zip(&spectrum.psd).zip(weights) {
        let g = rate / (rate * rate + (std::f64::consts::PI * f).powi(2));
        let w2 = w * w;
        sgg += w2 * g * g;
        sg1 += w2 * g;
        s11 += w2;
        sgy += w2 * g * s;
        s1y += w2 * s;
    }
    let det = sgg * s11 - sg1 * sg1;
    if det.abs() < 1e-300 {
        return (0.0, 0.0);
    }
    let a = (sgy * s11 - s1y * sg1) / det;
    let c = (sgg * s1y - sg1 * sgy) / det;
    (a, c)
}

/// Fit the telegraph model to a one-sided PSD estimate.
pub fn fit_parity_rate(
    spectrum: &PowerSpectrum,
    initial_guess: Option<(f64, f64, f64)>,
) -> Result<LorentzianFit> {
    spectrum.validate()?;
    let n = spectrum.freqs.len();
    if n < 8 {
        return Err(Error::InvalidParameter(format!(
            "need >= 8 frequency points, got {n}"
        )));
    }
    let f_min = spectrum.freqs[0];
    let f_max = spectrum.freqs[n - 1];
    if f_max / f_min < 10.0 {
        return Err(Error::InvalidParameter(format!(
            "spectrum must span at least one decade ({f_min} .. {f_max} Hz)"
        )));
    }
    let s_max = spectrum.psd.iter().cloned().fold(0.0f64, f64::max);
    if s_max <= 0.0 {
        return Err(Error::DegenerateInput("all-zero spectrum".into()));
    }

    // Inverse-variance weights for K-segment averaged periodograms.
    let k = spectrum.n_averages.max(1) as f64;
    let floor = 1e-12 * s_max;
    let weights: Vec<f64> = spectrum.psd.iter().map(|&s| k.sqrt() / s.max(floor)).collect();

    let c_floor = 1e-14 * s_max;
    let (a0, rate0, c0) = match initial_guess {
        Some(g) => g,
        None => coarse_guess(spectrum, &weights, c_floor),
    };
    let mut p = Vector3::new(a0.max(1e-300).ln(), rate0.max(1e-300).ln(), c0.max(c_floor).ln());

    let residuals = |p: &Vector3<f64>| -> (Vec<f64>, f64) {
        let (a, rate, c) = (p[0].exp(), p[1].exp(), p[2].exp());
        let mut r = Vec::with_capacity(n);
        let mut norm2 = 0.0;
        for ((&f, &s), &w) in spectrum.freqs.iter().zip(&spectrum.psd).zip(&weights) {
            let ri = (eval_model(a, rate, c, f) - s) * w;
            norm2 += ri * ri;
            r.push(ri);
        }
        (r, norm2)
    };

    let jacobian = |p: &Vector3<f64>| -> Vec<[f64; 3]> {
        let (a, rate, c) = (p[0].exp(), p[1].exp(), p[2].exp());
        spectrum
            .freqs
            .iter()
            .zip(&weights)
            .map(|(&f, &w)| {
                let u = (std::f64::consts::PI * f).powi(2);
                let den = rate * rate + u;
                // d/d ln A, d/d ln G, d/d ln C of the model.
                let d_lna = a * rate / den;
                let d_lng = a * rate * (u - rate * rate) / (den * den);
                let d_lnc = c;
                [d_lna * w, d_lng * w, d_lnc * w]
            })
            .collect()
    };

    let (_, mut norm2) = residuals(&p);
    let mut history = vec![norm2.sqrt()];
    let mut converged = false;
    // Nielsen damping schedule.
    let mut lambda = -1.0;
    let mut nu = 2.0;
    for _ in 0..200 {
        let (r, _) = residuals(&p);
        let j = jacobian(&p);
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for (row, &ri) in j.iter().zip(&r) {
            for col in 0..3 {
                jtr[col] += row[col] * ri;
                for col2 in 0..3 {
                    jtj[(col, col2)] += row[col] * row[col2];
                }
            }
        }
        if lambda < 0.0 {
            lambda = 1e-3 * (0..3).map(|d| jtj[(d, d)]).fold(0.0f64, f64::max).max(1e-300);
        }
        let mut step_taken = None;
        for _ in 0..50 {
            let mut damped = jtj;
            for d in 0..3 {
                damped[(d, d)] += lambda;
            }
            let Some(inv) = damped.try_inverse() else {
                lambda *= nu;
                nu *= 2.0;
                continue;
            };
            let step = -inv * jtr;
            let trial = p + step;
            let (_, trial_norm2) = residuals(&trial);
            // Gain ratio: actual vs predicted reduction of |r|^2.
            let predicted = lambda * step.norm_squared() - step.dot(&jtr);
            let rho = (norm2 - trial_norm2) / predicted.abs().max(1e-300);
            if trial_norm2 <= norm2 {
                lambda *= (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
                nu = 2.0;
                step_taken = Some((trial, trial_norm2, step.norm()));
                break;
            }
            lambda *= nu;
            nu *= 2.0;
        }
        let Some((trial, trial_norm2, step_norm)) = step_taken else {
            // Damping saturated: no downhill step exists at any lambda, so
            // the iterate sits at a (numerical) minimum.
            converged = true;
            break;
        };
        p = trial;
        norm2 = trial_norm2;
        history.push(norm2.sqrt());
        let p_scale = p.norm().max(1.0);
        if step_norm < 1e-8 * p_scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::FitNotConverged {
            iterations: 200,
            residual_norm: norm2.sqrt(),
            history,
        });
    }

    let (a, rate, c) = (p[0].exp(), p[1].exp(), p[2].exp());
    // Covariance from the Jacobian at the solution, mapped back from log
    // parameters with D = diag(a, rate, c) cancelling the chain rule.
    let j = jacobian(&p);
    let mut jtj = Matrix3::<f64>::zeros();
    for row in &j {
        for c1 in 0..3 {
            for c2 in 0..3 {
                jtj[(c1, c2)] += row[c1] * row[c2];
            }
        }
    }
    let dof = (n.saturating_sub(3)).max(1) as f64;
    let s2 = norm2 / dof;
    let inv = jtj.try_inverse().unwrap_or_else(Matrix3::zeros);
    let cov_ln = (inv + inv.transpose()) * (0.5 * s2);
    let scale = [a, rate, c];
    let mut covariance = [[0.0; 3]; 3];
    for (i, row) in covariance.iter_mut().enumerate() {
        for (jx, entry) in row.iter_mut().enumerate() {
            *entry = scale[i] * cov_ln[(i, jx)] * scale[jx];
        }
    }

    // Nyquist of the estimate is f_max, so dt = 1/(2 f_max).
    let dt = 1.0 / (2.0 * f_max);
    Ok(LorentzianFit {
        a,
        rate,
        c,
        covariance,
        residual_norm: norm2.sqrt(),
        rate_unresolved: rate * dt > 1.0,
    })
}

/// Initial iterate by variable projection: (A, C) are linear given the rate,
/// so scan the rate on a log grid and refine the best bracket by
/// golden-section search.
fn coarse_guess(spectrum: &PowerSpectrum, weights: &[f64], c_floor: f64) -> (f64, f64, f64) {
    let profile = |ln_rate: f64| -> (f64, (f64, f64, f64)) {
        let rate = ln_rate.exp();
        let (a, c) = linear_ac(spectrum, rate, weights);
        let a = a.max(1e-30);
        let c = c.max(c_floor);
        let norm: f64 = spectrum
            .freqs
            .iter()
            .zip(&spectrum.psd)
            .zip(weights)
            .map(|((&f, &s), &w)| {
                let r = (eval_model(a, rate, c, f) - s) * w;
                r * r
            })
            .sum();
        (norm, (a, rate, c))
    };

    let f_min = spectrum.freqs[0];
    let f_max = *spectrum.freqs.last().unwrap();
    let lo = (0.01 * f_min).max(1e-6).ln();
    let hi = (100.0 * f_max).ln();
    let n_grid = 80;
    let at = |i: usize| lo + (hi - lo) * i as f64 / (n_grid - 1) as f64;
    let mut best_idx = 0;
    let mut best_norm = f64::INFINITY;
    for i in 0..n_grid {
        let (norm, _) = profile(at(i));
        if norm < best_norm {
            best_norm = norm;
            best_idx = i;
        }
    }
    let (mut a, mut b) = (at(best_idx.saturating_sub(1)), at((best_idx + 1).min(n_grid - 1)));
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, _) = profile(x1);
    let (mut f2, _) = profile(x2);
    for _ in 0..90 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = profile(x1).0;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = profile(x2).0;
        }
        if (b - a).abs() < 1e-13 {
            break;
        }
    }
    profile(0.5 * (a + b)).1
}
