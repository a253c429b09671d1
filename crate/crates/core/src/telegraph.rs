//! Two-state parity telegraph processes.
//!
//! Switching is a continuous-time Markov chain with one symmetric rate per
//! direction; dwell times are drawn from the exponential distribution and the
//! sampled trace is the exact chain state at each sample instant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time-stamped binary parity record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TelegraphTrace {
    /// Sampling interval, s.
    pub dt: f64,
    /// Parity states, each +1 or -1.
    pub values: Vec<i8>,
    /// RNG seed the trace was generated with (0 for ingested data).
    pub seed: u64,
    /// Generating switching rate, s^-1, when the trace is synthetic.
    pub true_rate: Option<f64>,
    /// Readout fidelity applied to the trace, if any.
    pub fidelity: Option<f64>,
}

impl TelegraphTrace {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidParameter("trace is empty".into()));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if let Some(v) = self.values.iter().find(|v| **v != 1 && **v != -1) {
            return Err(Error::InvalidParameter(format!("parity value {v} is not +-1")));
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.values.len() as f64 * self.dt
    }
}

/// Exact realization of the two-state chain: initial state plus the ordered
/// switch times on [0, duration].
#[derive(Debug, Clone)]
pub struct ParityPath {
    pub initial_state: i8,
    pub switch_times: Vec<f64>,
    pub duration: f64,
}

impl ParityPath {
    /// Draw a path with symmetric per-direction switching rate, s^-1.
    pub fn sample(rate: f64, duration: f64, seed: u64) -> Result<Self> {
        if !(rate >= 0.0) {
            return Err(Error::InvalidParameter(format!("rate must be >= 0, got {rate}")));
        }
        if !(duration > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "duration must be > 0, got {duration}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let initial_state = if rng.gen::<bool>() { 1 } else { -1 };
        let mut switch_times = Vec::new();
        if rate > 0.0 {
            let mut t = 0.0;
            loop {
                // Exponential dwell with mean 1/rate.
                let u: f64 = rng.gen::<f64>();
                t -= (1.0 - u).ln() / rate;
                if t >= duration {
                    break;
                }
                switch_times.push(t);
            }
        }
        Ok(Self { initial_state, switch_times, duration })
    }

    /// Chain state at time t.
    pub fn state_at(&self, t: f64) -> i8 {
        let flips = self.switch_times.partition_point(|&s| s <= t);
        if flips % 2 == 0 { self.initial_state } else { -self.initial_state }
    }

    /// Switch times falling strictly inside (t0, t1).
    pub fn switches_in(&self, t0: f64, t1: f64) -> &[f64] {
        let lo = self.switch_times.partition_point(|&s| s <= t0);
        let hi = self.switch_times.partition_point(|&s| s < t1);
        &self.switch_times[lo..hi]
    }

    /// Sample the chain at k*dt for k = 0..n-1.
    pub fn sampled(&self, dt: f64, n: usize, rate: f64, seed: u64) -> TelegraphTrace {
        let values = (0..n).map(|k| self.state_at(k as f64 * dt)).collect();
        TelegraphTrace { dt, values, seed, true_rate: Some(rate), fidelity: None }
    }
}

/// Simulate a symmetric telegraph process sampled at `dt` over `duration`.
pub fn simulate_telegraph(rate: f64, dt: f64, duration: f64, seed: u64) -> Result<TelegraphTrace> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    if duration < dt {
        return Err(Error::InvalidParameter(format!(
            "duration {duration} shorter than dt {dt}"
        )));
    }
    let n = (duration / dt).round() as usize;
    let path = ParityPath::sample(rate, duration.max(n as f64 * dt), seed)?;
    Ok(path.sampled(dt, n, rate, seed))
}

/// Flip each sample independently with probability 1 - fidelity.
pub fn apply_readout_infidelity(
    trace: &TelegraphTrace,
    fidelity: f64,
    seed: u64,
) -> Result<TelegraphTrace> {
    if !(fidelity > 0.5 && fidelity <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fidelity must be in (0.5, 1], got {fidelity}"
        )));
    }
    trace.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = trace
        .values
        .iter()
        .map(|&v| if rng.gen::<f64>() < 1.0 - fidelity { -v } else { v })
        .collect();
    Ok(TelegraphTrace {
        dt: trace.dt,
        values,
        seed: trace.seed,
        true_rate: trace.true_rate,
        fidelity: Some(fidelity),
    })
}
