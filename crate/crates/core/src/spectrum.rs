//! Averaged-periodogram (Welch) power spectral density estimation.
//!
//! One-sided convention with a Hann window: for a symmetric telegraph process
//! the estimate follows `S(f) = A G / (G^2 + (pi f)^2) + C` with half-power
//! at `f = G / pi`.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::telegraph::TelegraphTrace;

/// One-sided PSD estimate (DC excluded).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerSpectrum {
    /// Frequency grid, Hz, strictly increasing.
    pub freqs: Vec<f64>,
    /// Power spectral density, 1/Hz.
    pub psd: Vec<f64>,
    /// Number of averaged segments.
    pub n_averages: usize,
}

impl PowerSpectrum {
    /// Build from (f, S) pairs in any order; sorts by frequency.
    pub fn from_points(points: Vec<(f64, f64)>, n_averages: usize) -> Result<Self> {
        let mut points = points;
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let spectrum = Self {
            freqs: points.iter().map(|p| p.0).collect(),
            psd: points.iter().map(|p| p.1).collect(),
            n_averages,
        };
        spectrum.validate()?;
        Ok(spectrum)
    }

    pub fn validate(&self) -> Result<()> {
        if self.freqs.len() != self.psd.len() {
            return Err(Error::InvalidParameter("freqs/psd length mismatch".into()));
        }
        if self.freqs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("freqs must be strictly increasing".into()));
        }
        if self.psd.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidParameter("psd must be nonnegative and finite".into()));
        }
        Ok(())
    }
}

/// Welch PSD of a parity trace: Hann window, per-segment mean removal,
/// one-sided normalization satisfying Parseval.
pub fn estimate_psd(
    trace: &TelegraphTrace,
    segment_length: usize,
    overlap: f64,
) -> Result<PowerSpectrum> {
    trace.validate()?;
    let samples: Vec<f64> = trace.values.iter().map(|&v| v as f64).collect();
    welch_psd(&samples, trace.dt, segment_length, overlap)
}

/// Welch estimator on raw samples.
pub fn welch_psd(
    samples: &[f64],
    dt: f64,
    segment_length: usize,
    overlap: f64,
) -> Result<PowerSpectrum> {
    let n = samples.len();
    if segment_length > n {
        return Err(Error::SegmentTooLong { segment: segment_length, trace: n });
    }
    if segment_length < 4 {
        return Err(Error::InvalidParameter(format!(
            "segment_length must be >= 4, got {segment_length}"
        )));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::InvalidParameter(format!(
            "overlap must be in [0, 1), got {overlap}"
        )));
    }
    let fs = 1.0 / dt;
    let m = segment_length;
    let hop = ((m as f64 * (1.0 - overlap)).round() as usize).max(1);
    let window: Vec<f64> = (0..m)
        .map(|i| {
            let x = std::f64::consts::PI * i as f64 / m as f64;
            x.sin() * x.sin()
        })
        .collect();
    let win_power: f64 = window.iter().map(|w| w * w).sum();

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    let n_bins = m / 2;
    let mut acc = vec![0.0f64; n_bins + 1];
    let mut n_segments = 0usize;
    let mut start = 0usize;
    while start + m <= n {
        let seg = &samples[start..start + m];
        let mean = seg.iter().sum::<f64>() / m as f64;
        let mut buf: Vec<Complex<f64>> = seg
            .iter()
            .zip(&window)
            .map(|(&v, &w)| Complex::new((v - mean) * w, 0.0))
            .collect();
        fft.process(&mut buf);
        for k in 0..=n_bins {
            acc[k] += buf[k].norm_sqr();
        }
        n_segments += 1;
        start += hop;
    }

    let scale = 1.0 / (fs * win_power * n_segments as f64);
    let mut freqs = Vec::with_capacity(n_bins);
    let mut psd = Vec::with_capacity(n_bins);
    for k in 1..=n_bins {
        // Double everything except the Nyquist bin (and the dropped DC bin).
        let one_sided = if k == n_bins && m % 2 == 0 { 1.0 } else { 2.0 };
        freqs.push(k as f64 * fs / m as f64);
        psd.push(one_sided * acc[k] * scale);
    }
    Ok(PowerSpectrum { freqs, psd, n_averages: n_segments })
}
