//! `qp`: quasiparticle injection and recovery. Simulates the rate equation
//! or ingests measured recovery traces, fits the trapping rate, and emits a
//! per-dataset comparison table.

use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::json;

use qparity::io::{read_gamma1_trace, read_qp_trace, write_qp_trace};
use qparity::qp::{
    fit_trapping_rate, integrate_rt, vortex_threshold_ut, xqp_from_gamma1, GapParams, Injection,
    QpTrace, RtParams, TrappingFit,
};

use crate::config::Config;
use crate::error::CliError;
use crate::report::{create_artifact, Report};

#[derive(Debug, Args)]
pub struct QpArgs {
    /// Ingest a recovery trace CSV (tau_qp_s,x_qp). Repeatable.
    #[arg(long)]
    pub xqp_trace: Vec<PathBuf>,
    /// Ingest an excess-decay-rate CSV (tau_qp_s,delta_gamma1_per_s);
    /// converted to density before fitting. Repeatable.
    #[arg(long)]
    pub gamma1_trace: Vec<PathBuf>,
    /// Trapping rate to simulate, ms^-1.
    #[arg(long)]
    pub s_per_ms: Option<f64>,
    /// Recombination coefficient to simulate, s^-1.
    #[arg(long)]
    pub r_per_s: Option<f64>,
    /// Injected excess density at t = 0.
    #[arg(long)]
    pub x0: Option<f64>,
    /// Simulated recovery window, ms.
    #[arg(long, default_value_t = 3.0)]
    pub t_max_ms: f64,
    /// Number of output samples over the recovery window.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Superconducting gap, micro-eV (for the decay-rate conversion).
    #[arg(long)]
    pub delta_uev: Option<f64>,
    /// Qubit frequency, GHz (for the decay-rate conversion).
    #[arg(long)]
    pub f_q_ghz: Option<f64>,
    /// Electrode strip width, um; reports the vortex-expulsion threshold.
    #[arg(long)]
    pub vortex_w_um: Option<f64>,
}

/// One comparison-table row. Datasets whose decay is not a resolvable single
/// exponential keep their `s` cell empty and are flagged instead of aborting
/// the run.
fn table_row(label: &str, fit: Result<TrappingFit, qparity::Error>) -> serde_json::Value {
    match fit {
        Ok(fit) if !fit.low_confidence => json!({
            "dataset": label,
            "s_per_ms": fit.s * 1e-3,
            "s_stderr_per_ms": fit.s_stderr * 1e-3,
            "x0": fit.x0,
            "unresolved": false,
        }),
        Ok(fit) => json!({
            "dataset": label,
            "s_per_ms": serde_json::Value::Null,
            "x0": fit.x0,
            "unresolved": true,
        }),
        Err(e) => json!({
            "dataset": label,
            "s_per_ms": serde_json::Value::Null,
            "unresolved": true,
            "reason": e.to_string(),
        }),
    }
}

fn print_row(row: &serde_json::Value) {
    let label = row["dataset"].as_str().unwrap_or("?");
    match row["s_per_ms"].as_f64() {
        Some(s) => println!(
            "  {label}: s = {s:.3} ms^-1 (+/- {:.3})",
            row["s_stderr_per_ms"].as_f64().unwrap_or(0.0)
        ),
        None => println!("  {label}: s unresolved"),
    }
}

pub fn run(args: &QpArgs, config: &Config, seed: u64, out_dir: &Path) -> Result<(), CliError> {
    let mut report = Report::new("qp", seed, config.hash());
    let mut rows = Vec::new();

    let gap = match (
        args.delta_uev.or(config.delta_uev),
        args.f_q_ghz.or(config.f_q_ghz),
    ) {
        (Some(d), Some(f)) => Some(GapParams::new(d, f)?),
        _ => None,
    };

    let simulate = args.s_per_ms.or(config.s_per_ms).is_some();
    if simulate {
        let s = Config::require(args.s_per_ms.or(config.s_per_ms), "s_per_ms")? * 1e3;
        let r = args.r_per_s.or(config.r_per_s).unwrap_or(0.0);
        let x0 = Config::require(args.x0.or(config.x0), "x0")?;
        let params = RtParams {
            r,
            s,
            g_background: 0.0,
            injection: Injection::Jump { x0, at: 0.0 },
        };
        let t_max = args.t_max_ms * 1e-3;
        if args.points < 4 {
            return Err(CliError::Usage("need at least 4 output points".into()));
        }
        let t_grid: Vec<f64> = (0..args.points)
            .map(|i| t_max * (i + 1) as f64 / args.points as f64)
            .collect();
        let trace = integrate_rt(&params, &t_grid)?;
        write_qp_trace(create_artifact(out_dir, "xqp_trace.csv")?, &trace)?;
        rows.push(table_row("simulated", fit_trapping_rate(&trace)));
    }

    for path in &args.xqp_trace {
        let file = std::fs::File::open(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        report.inputs.push(path.display().to_string());
        let trace = read_qp_trace(file)?;
        check_usable(&trace)?;
        rows.push(table_row(&path.display().to_string(), fit_trapping_rate(&trace)));
    }

    for path in &args.gamma1_trace {
        let gap = gap.as_ref().ok_or_else(|| {
            CliError::Usage("decay-rate input needs `delta_uev` and `f_q_ghz`".into())
        })?;
        let file = std::fs::File::open(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        report.inputs.push(path.display().to_string());
        let (times, gamma1) = read_gamma1_trace(file)?;
        let x_qp = gamma1
            .iter()
            .map(|&g| xqp_from_gamma1(g, gap))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Data(e.to_string()))?;
        let trace = QpTrace { times, x_qp };
        check_usable(&trace)?;
        rows.push(table_row(&path.display().to_string(), fit_trapping_rate(&trace)));
    }

    if rows.is_empty() {
        return Err(CliError::Usage(
            "nothing to do: give `s_per_ms` simulation params or an input trace".into(),
        ));
    }

    let mut results = json!({ "recovery_table": rows });
    if let Some(w) = args.vortex_w_um.or(config.vortex_w_um) {
        results["vortex_threshold_ut"] = json!(vortex_threshold_ut(w)?);
    }
    if let Some(gap) = &gap {
        results["pair_breaking_freq_ghz"] = json!(gap.pair_breaking_freq_hz() * 1e-9);
    }
    report.results = results;
    let path = report.write(out_dir)?;

    println!("qp: {} dataset(s)", report.results["recovery_table"].as_array().unwrap().len());
    for row in report.results["recovery_table"].as_array().unwrap() {
        print_row(row);
    }
    if let Some(b) = report.results.get("vortex_threshold_ut").and_then(|v| v.as_f64()) {
        println!("  vortex expulsion threshold: {b:.1} uT");
    }
    println!("  wrote {}", path.display());
    Ok(())
}

/// Fewer than 4 usable points cannot constrain the fit; hard data error.
fn check_usable(trace: &QpTrace) -> Result<(), CliError> {
    let usable = trace.x_qp.iter().filter(|&&x| x > 0.0).count();
    if usable < 4 {
        return Err(CliError::Data(format!(
            "fewer than 4 usable points ({usable}) in recovery trace"
        )));
    }
    Ok(())
}
