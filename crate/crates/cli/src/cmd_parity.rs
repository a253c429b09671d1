//! `parity`: simulate or ingest a parity trace, estimate its PSD and fit
//! the telegraph model.

use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::json;

use qparity::fit::{fit_parity_rate, LorentzianFit};
use qparity::io::{read_trace, write_spectrum, write_trace};
use qparity::protocol::{run_parity_monitor, SequenceParams};
use qparity::spectrum::estimate_psd;
use qparity::telegraph::{apply_readout_infidelity, simulate_telegraph, TelegraphTrace};

use crate::config::Config;
use crate::error::CliError;
use crate::report::{create_artifact, Report};

#[derive(Debug, Args)]
pub struct ParityArgs {
    /// Ingest a measured trace CSV (t_s,parity) instead of simulating.
    #[arg(long, conflicts_with_all = ["rate", "batch"])]
    pub trace: Option<PathBuf>,
    /// Parity switching rate to simulate, s^-1.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Sampling interval, s.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Trace duration, s.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Single-shot readout fidelity.
    #[arg(long)]
    pub fidelity: Option<f64>,
    /// Simulate through the Ramsey mapping sequence instead of flipping
    /// samples independently; needs delta-f-hz and t1-us.
    #[arg(long)]
    pub protocol: bool,
    /// Parity half-splitting for --protocol, Hz.
    #[arg(long)]
    pub delta_f_hz: Option<f64>,
    /// Relaxation time for --protocol, us.
    #[arg(long)]
    pub t1_us: Option<f64>,
    /// Number of independent traces; reports median and IQR of the rate.
    #[arg(long)]
    pub batch: Option<usize>,
    /// Welch segment length in samples (default: half the trace).
    #[arg(long)]
    pub segment_length: Option<usize>,
    /// Welch segment overlap fraction.
    #[arg(long, default_value_t = 0.5)]
    pub overlap: f64,
}

fn fit_summary(fit: &LorentzianFit) -> serde_json::Value {
    let err = fit.stderr();
    json!({
        "a": fit.a,
        "rate_hz": fit.rate,
        "c_per_hz": fit.c,
        "a_stderr": err[0],
        "rate_stderr_hz": err[1],
        "c_stderr_per_hz": err[2],
        "residual_norm": fit.residual_norm,
        "rate_unresolved": fit.rate_unresolved,
    })
}

fn simulate_one(args: &ParityArgs, config: &Config, seed: u64) -> Result<TelegraphTrace, CliError> {
    let rate = Config::require(args.rate.or(config.parity_rate_hz), "parity_rate_hz")?;
    let dt = Config::require(
        args.dt.or(config.sample_dt_ms.map(|v| v * 1e-3)),
        "sample_dt_ms",
    )?;
    let duration = Config::require(args.duration.or(config.duration_s), "duration_s")?;
    let fidelity = args.fidelity.or(config.fidelity);
    if args.protocol {
        let delta_f = Config::require(args.delta_f_hz.or(config.delta_f_hz), "delta_f_hz")?;
        let t1 = Config::require(args.t1_us.or(config.t1_us), "t1_us")? * 1e-6;
        let params = SequenceParams::nominal(delta_f, fidelity.unwrap_or(1.0), t1)?;
        return Ok(run_parity_monitor(rate, &params, dt, duration, seed)?);
    }
    let trace = simulate_telegraph(rate, dt, duration, seed)?;
    match fidelity {
        Some(f) if f < 1.0 => Ok(apply_readout_infidelity(&trace, f, seed.wrapping_add(1))?),
        _ => Ok(trace),
    }
}

pub fn run(args: &ParityArgs, config: &Config, seed: u64, out_dir: &Path) -> Result<(), CliError> {
    let mut report = Report::new("parity", seed, config.hash());

    let analyzed: Vec<(u64, TelegraphTrace)> = if let Some(path) = &args.trace {
        let file = std::fs::File::open(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        report.inputs.push(path.display().to_string());
        vec![(seed, read_trace(file)?)]
    } else {
        let batch = args.batch.unwrap_or(1).max(1);
        (0..batch as u64)
            .map(|k| simulate_one(args, config, seed + k).map(|t| (seed + k, t)))
            .collect::<Result<_, _>>()?
    };

    let mut fits: Vec<(u64, LorentzianFit)> = Vec::new();
    let mut unresolved = false;
    for (k, trace) in &analyzed {
        let segment = args.segment_length.unwrap_or(trace.values.len() / 2);
        let spectrum = estimate_psd(trace, segment, args.overlap)?;
        let fit = fit_parity_rate(&spectrum, None)?;
        unresolved |= fit.rate_unresolved;
        if analyzed.len() == 1 {
            write_trace(create_artifact(out_dir, "trace.csv")?, trace)?;
            write_spectrum(create_artifact(out_dir, "spectrum.csv")?, &spectrum)?;
        }
        fits.push((*k, fit));
    }

    if fits.len() == 1 {
        let fit = &fits[0].1;
        report.results = json!({
            "true_rate_hz": analyzed[0].1.true_rate,
            "fit": fit_summary(fit),
        });
        println!(
            "parity: rate = {:.3} +/- {:.3} s^-1 (floor C = {:.3e} /Hz)",
            fit.rate,
            fit.stderr()[1],
            fit.c
        );
    } else {
        // Batch results are keyed and sorted by sub-seed so output does not
        // depend on evaluation order.
        fits.sort_by_key(|(k, _)| *k);
        let mut rates: Vec<f64> = fits.iter().map(|(_, f)| f.rate).collect();
        rates.sort_by(|a, b| a.total_cmp(b));
        let median = rates[rates.len() / 2];
        let q1 = rates[rates.len() / 4];
        let q3 = rates[3 * rates.len() / 4];
        report.results = json!({
            "true_rate_hz": analyzed[0].1.true_rate,
            "batch": fits.len(),
            "rate_median_hz": median,
            "rate_iqr_hz": q3 - q1,
            "fits": fits
                .iter()
                .map(|(k, f)| json!({"seed": k, "fit": fit_summary(f)}))
                .collect::<Vec<_>>(),
        });
        println!(
            "parity: {} traces, median rate = {:.3} s^-1, IQR = {:.3} s^-1",
            fits.len(),
            median,
            q3 - q1
        );
    }

    if unresolved {
        report.results["rate_unresolved"] = json!(true);
        eprintln!("warning: fitted rate exceeds the sampling bandwidth; value is aliased");
    }

    let path = report.write(out_dir)?;
    println!("  wrote {}", path.display());
    Ok(())
}
