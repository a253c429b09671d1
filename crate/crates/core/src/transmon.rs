//! Transmon spectrum in the charge basis.
//!
//! The qubit is modeled by the standard charge-basis Hamiltonian
//! `H = 4 Ec (n - ng)^2 - (Ej/2) sum_n (|n><n+1| + |n+1><n|)` truncated to
//! `n` in `[-N, N]` Cooper pairs. The odd-parity branch is the even branch
//! with the reduced offset charge shifted by one electron, `ng -> ng + 1/2`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transmon device parameters. Energies in GHz (E/h).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TransmonParams {
    /// Josephson energy, GHz.
    pub ej: f64,
    /// Single-electron charging energy, GHz (the Ec of the Ej/Ec ratio).
    pub ec: f64,
    /// Reduced offset charge in units of 2e; interpreted modulo 1.
    pub ng: f64,
    /// Charge states kept on each side of n = 0.
    pub n_charge_cutoff: usize,
}

impl TransmonParams {
    pub const DEFAULT_CUTOFF: usize = 30;

    pub fn new(ej: f64, ec: f64, ng: f64) -> Result<Self> {
        Self::with_cutoff(ej, ec, ng, Self::DEFAULT_CUTOFF)
    }

    pub fn with_cutoff(ej: f64, ec: f64, ng: f64, n_charge_cutoff: usize) -> Result<Self> {
        if !(ej >= 0.0) {
            return Err(Error::InvalidParameter(format!("ej must be >= 0, got {ej}")));
        }
        if !(ec > 0.0) {
            return Err(Error::InvalidParameter(format!("ec must be > 0, got {ec}")));
        }
        if n_charge_cutoff < 5 {
            return Err(Error::InvalidParameter(format!(
                "n_charge_cutoff must be >= 5, got {n_charge_cutoff}"
            )));
        }
        Ok(Self { ej, ec, ng, n_charge_cutoff })
    }

    pub fn ratio(&self) -> f64 {
        self.ej / self.ec
    }

    fn with_ng(&self, ng: f64) -> Self {
        Self { ng, ..*self }
    }
}

/// Parity-resolved f01 over an offset-charge grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DispersionCurve {
    /// Offset-charge grid, units of 2e.
    pub ng_grid: Vec<f64>,
    /// Even-branch transition frequency, GHz.
    pub f01_even: Vec<f64>,
    /// Odd-branch transition frequency, GHz.
    pub f01_odd: Vec<f64>,
    /// Mean transition frequency at the branch crossing ng = 0.25, GHz.
    pub f01_bar: f64,
    /// Maximum half-splitting max |f_e - f_o| / 2, MHz.
    pub delta_f_max_mhz: f64,
}

/// Charge parity of the island.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

fn eigenvalues_at_cutoff(params: &TransmonParams, cutoff: usize) -> Vec<f64> {
    let dim = 2 * cutoff + 1;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        let n = i as f64 - cutoff as f64;
        h[(i, i)] = 4.0 * params.ec * (n - params.ng).powi(2);
        if i + 1 < dim {
            h[(i, i + 1)] = -params.ej / 2.0;
            h[(i + 1, i)] = -params.ej / 2.0;
        }
    }
    let mut evals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    evals.sort_by(|a, b| a.total_cmp(b));
    evals
}

/// Lowest `n_levels` eigenvalues in GHz, ascending, with a mandatory
/// cutoff-doubling convergence check on E1 - E0.
pub fn eigenlevels(params: &TransmonParams, n_levels: usize) -> Result<Vec<f64>> {
    if n_levels > 2 * params.n_charge_cutoff - 1 {
        return Err(Error::InvalidParameter(format!(
            "n_levels = {} exceeds 2*cutoff - 1 = {}",
            n_levels,
            2 * params.n_charge_cutoff - 1
        )));
    }
    let evals = eigenvalues_at_cutoff(params, params.n_charge_cutoff);
    let check = eigenvalues_at_cutoff(params, 2 * params.n_charge_cutoff);
    let delta = ((evals[1] - evals[0]) - (check[1] - check[0])).abs();
    if delta > 1e-9 {
        return Err(Error::CutoffNotConverged {
            cutoff: params.n_charge_cutoff,
            delta_ghz: delta,
        });
    }
    Ok(evals[..n_levels].to_vec())
}

/// Ground-to-first-excited transition frequency on one parity branch, GHz.
pub fn f01(params: &TransmonParams, parity: Parity) -> Result<f64> {
    let ng = match parity {
        Parity::Even => params.ng,
        Parity::Odd => params.ng + 0.5,
    };
    let levels = eigenlevels(&params.with_ng(ng), 2)?;
    Ok(levels[1] - levels[0])
}

/// Evaluate both parity branches of f01 on a uniform ng grid over [-0.5, 0.5].
pub fn dispersion_curve(params: &TransmonParams, ng_points: usize) -> Result<DispersionCurve> {
    if ng_points < 3 {
        return Err(Error::InvalidParameter(format!(
            "ng_points must be >= 3, got {ng_points}"
        )));
    }
    let mut ng_grid = Vec::with_capacity(ng_points);
    let mut f01_even = Vec::with_capacity(ng_points);
    let mut f01_odd = Vec::with_capacity(ng_points);
    let mut delta_f_max = 0.0f64;
    for k in 0..ng_points {
        let ng = -0.5 + k as f64 / (ng_points - 1) as f64;
        let p = params.with_ng(ng);
        let fe = f01(&p, Parity::Even)?;
        let fo = f01(&p, Parity::Odd)?;
        delta_f_max = delta_f_max.max((fe - fo).abs() / 2.0);
        ng_grid.push(ng);
        f01_even.push(fe);
        f01_odd.push(fo);
    }
    // Half-splitting extrema sit at ng in {0, +-0.5}; make sure ng = 0 is
    // sampled even when the grid skips it.
    {
        let p = params.with_ng(0.0);
        let fe = f01(&p, Parity::Even)?;
        let fo = f01(&p, Parity::Odd)?;
        delta_f_max = delta_f_max.max((fe - fo).abs() / 2.0);
    }
    let f01_bar = f01(&params.with_ng(0.25), Parity::Even)?;
    Ok(DispersionCurve {
        ng_grid,
        f01_even,
        f01_odd,
        f01_bar,
        delta_f_max_mhz: delta_f_max * 1e3,
    })
}

/// Invert (f01_bar, Ej/Ec) to (Ej, Ec) such that f01 at the branch crossing
/// ng = 0.25 equals `f01_bar` to better than 1 kHz.
///
/// The spectrum scales linearly in Ec at fixed ratio, so the bisection on Ec
/// collapses quickly; the bracket is still checked explicitly.
pub fn fit_ej_ec(f01_bar: f64, ej_over_ec: f64) -> Result<TransmonParams> {
    if !(ej_over_ec > 4.0) {
        return Err(Error::InvalidParameter(format!(
            "ej_over_ec must be > 4, got {ej_over_ec}"
        )));
    }
    if !(f01_bar > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "f01_bar must be > 0, got {f01_bar}"
        )));
    }
    let f_at = |ec: f64| -> Result<f64> {
        let p = TransmonParams::with_cutoff(
            ej_over_ec * ec,
            ec,
            0.25,
            TransmonParams::DEFAULT_CUTOFF,
        )?;
        f01(&p, Parity::Even)
    };
    let (mut lo, mut hi) = (1e-3, 10.0);
    let f_lo = f_at(lo)? - f01_bar;
    let f_hi = f_at(hi)? - f01_bar;
    if f_lo * f_hi > 0.0 {
        return Err(Error::BracketFailure { lo, hi, f_lo, f_hi });
    }
    let mut ec = lo;
    for _ in 0..200 {
        ec = 0.5 * (lo + hi);
        let err = f_at(ec)? - f01_bar;
        if err.abs() < 1e-7 {
            break;
        }
        if err * f_lo > 0.0 {
            lo = ec;
        } else {
            hi = ec;
        }
    }
    TransmonParams::new(ej_over_ec * ec, ec, 0.25)
}
