//! `antenna`: coupling efficiency of the junction to its radiation
//! impedance, blackbody-integrated parity rate versus effective temperature,
//! and the inverse problem of finding T* for a target rate.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde_json::json;

use qparity::antenna::{
    invert_t_star, parity_rate_from_blackbody, synthetic, BlackbodySource, EfficiencyCurve,
    ImpedanceTable, RcsjParams,
};
use qparity::io::{read_impedance, write_efficiency, write_rate_vs_temperature};
use qparity::qp::GapParams;

use crate::config::Config;
use crate::error::CliError;
use crate::report::{create_artifact, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ToyTable {
    Xmon,
    TwoPads,
}

#[derive(Debug, Args)]
pub struct AntennaArgs {
    /// Use a shipped synthetic impedance table. Repeatable.
    #[arg(long, value_enum)]
    pub toy: Vec<ToyTable>,
    /// Radiation-impedance CSV (f_hz,re_z_ohm,im_z_ohm). Repeatable.
    #[arg(long)]
    pub impedance: Vec<PathBuf>,
    /// Constant coupling efficiency instead of an impedance table.
    #[arg(long)]
    pub e_c_const: Option<f64>,
    /// Band for --e-c-const as `f_lo:f_hi` in Hz.
    #[arg(long)]
    pub band: Option<String>,
    /// Junction normal-state resistance, ohm.
    #[arg(long)]
    pub r_n_ohm: Option<f64>,
    /// Junction capacitance, fF.
    #[arg(long)]
    pub c_j_ff: Option<f64>,
    /// Superconducting gap, micro-eV; sets the pair-breaking band edge.
    #[arg(long)]
    pub delta_uev: Option<f64>,
    /// Integration cutoff, GHz.
    #[arg(long)]
    pub f_max_ghz: Option<f64>,
    /// Overall efficiency scale factor in (0, 1].
    #[arg(long)]
    pub efficiency_scale: Option<f64>,
    /// Evaluate the rate at this single temperature, K.
    #[arg(long)]
    pub t_star: Option<f64>,
    /// Temperature grid lower edge, K.
    #[arg(long, default_value_t = 0.15)]
    pub t_min: f64,
    /// Temperature grid upper edge, K.
    #[arg(long, default_value_t = 0.60)]
    pub t_max: f64,
    /// Temperature grid points.
    #[arg(long, default_value_t = 46)]
    pub t_points: usize,
    /// Invert for T* at this target rate, s^-1. Repeatable.
    #[arg(long)]
    pub target_rate: Vec<f64>,
}

struct Device {
    label: String,
    curve: EfficiencyCurve,
}

fn parse_band(spec: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let err = || CliError::Usage(format!("bad band {spec:?}, expected `f_lo:f_hi` in Hz"));
    if parts.len() != 2 {
        return Err(err());
    }
    let lo: f64 = parts[0].parse().map_err(|_| err())?;
    let hi: f64 = parts[1].parse().map_err(|_| err())?;
    if !(hi > lo) {
        return Err(err());
    }
    Ok((lo, hi))
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

pub fn run(args: &AntennaArgs, config: &Config, seed: u64, out_dir: &Path) -> Result<(), CliError> {
    let mut report = Report::new("antenna", seed, config.hash());

    let rcsj = match (args.r_n_ohm.or(config.r_n_ohm), args.c_j_ff.or(config.c_j_ff)) {
        (Some(r_n), Some(c_j)) => RcsjParams::new(r_n, c_j * 1e-15)?,
        (None, None) => synthetic::default_rcsj(),
        (Some(_), None) => return Err(CliError::Usage("missing required key `c_j_ff`".into())),
        (None, Some(_)) => return Err(CliError::Usage("missing required key `r_n_ohm`".into())),
    };
    let delta_uev = args.delta_uev.or(config.delta_uev).unwrap_or(200.0);
    // GapParams validates the gap; the qubit frequency is irrelevant here.
    let f_min = GapParams::new(delta_uev, 4.0)?.pair_breaking_freq_hz();
    let f_max = args
        .f_max_ghz
        .or(config.f_max_ghz)
        .map(|v| v * 1e9)
        .unwrap_or(BlackbodySource::DEFAULT_F_MAX);
    let scale = args.efficiency_scale.or(config.efficiency_scale).unwrap_or(1.0);

    let mut devices: Vec<Device> = Vec::new();
    for toy in &args.toy {
        let table: ImpedanceTable = match toy {
            ToyTable::Xmon => synthetic::xmon_like(),
            ToyTable::TwoPads => synthetic::two_pads_like(),
        };
        devices.push(Device {
            label: table.source_label.clone(),
            curve: EfficiencyCurve::from_impedance(&table, &rcsj)?,
        });
    }
    for path in &args.impedance {
        let file = std::fs::File::open(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        report.inputs.push(path.display().to_string());
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "impedance".into());
        let table = read_impedance(file, &label)?;
        devices.push(Device { label, curve: EfficiencyCurve::from_impedance(&table, &rcsj)? });
    }
    if let Some(e_c) = args.e_c_const {
        let (lo, hi) = match &args.band {
            Some(spec) => parse_band(spec)?,
            None => (f_min, f_max),
        };
        devices.push(Device { label: "constant".into(), curve: EfficiencyCurve::constant(e_c, lo, hi)? });
    }
    if devices.is_empty() {
        return Err(CliError::Usage(
            "nothing to do: give --toy, --impedance or --e-c-const".into(),
        ));
    }

    if !(args.t_points >= 2 && args.t_max > args.t_min && args.t_min > 0.0) {
        return Err(CliError::Usage("need t_min > 0, t_max > t_min, t_points >= 2".into()));
    }
    let t_grid: Vec<f64> = (0..args.t_points)
        .map(|i| args.t_min + (args.t_max - args.t_min) * i as f64 / (args.t_points - 1) as f64)
        .collect();

    let mut device_results = Vec::new();
    for device in &devices {
        let slug = sanitize(&device.label);
        write_efficiency(
            create_artifact(out_dir, &format!("efficiency_{slug}.csv"))?,
            &device.curve,
        )?;
        let mut grid_rows = Vec::with_capacity(t_grid.len());
        for &t in &t_grid {
            let source = BlackbodySource::new(t, f_min, f_max)?;
            grid_rows.push((t, parity_rate_from_blackbody(&device.curve, &source, scale)?));
        }
        write_rate_vs_temperature(
            create_artifact(out_dir, &format!("rate_vs_t_{slug}.csv"))?,
            &grid_rows,
        )?;

        let mut entry = json!({ "device": device.label });
        if let Some(t) = args.t_star {
            let source = BlackbodySource::new(t, f_min, f_max)?;
            entry["rate_at_t_star_hz"] =
                json!(parity_rate_from_blackbody(&device.curve, &source, scale)?);
        }
        let mut inversions = Vec::new();
        for &target in &args.target_rate {
            let t_star = invert_t_star(target, &device.curve, f_min, f_max, scale)?;
            inversions.push(json!({
                "target_rate_hz": target,
                "t_star_mk": t_star * 1e3,
            }));
        }
        if !inversions.is_empty() {
            entry["inversions"] = json!(inversions);
        }
        device_results.push(entry);
    }

    let mut results = json!({
        "f_min_hz": f_min,
        "f_max_hz": f_max,
        "efficiency_scale": scale,
        "devices": device_results,
    });
    // Spread of inverted temperatures across devices, per target rate.
    if devices.len() >= 2 && !args.target_rate.is_empty() {
        let mut deltas = Vec::new();
        for (i, &target) in args.target_rate.iter().enumerate() {
            let ts: Vec<f64> = results["devices"]
                .as_array()
                .unwrap()
                .iter()
                .map(|d| d["inversions"][i]["t_star_mk"].as_f64().unwrap())
                .collect();
            let max = ts.iter().cloned().fold(f64::MIN, f64::max);
            let min = ts.iter().cloned().fold(f64::MAX, f64::min);
            deltas.push(json!({ "target_rate_hz": target, "delta_t_star_mk": max - min }));
        }
        results["delta_t_star"] = json!(deltas);
    }
    report.results = results;
    let path = report.write(out_dir)?;

    println!("antenna: band {:.1}-{:.1} GHz, {} device(s)", f_min * 1e-9, f_max * 1e-9, devices.len());
    for entry in report.results["devices"].as_array().unwrap() {
        let label = entry["device"].as_str().unwrap_or("?");
        if let Some(rate) = entry["rate_at_t_star_hz"].as_f64() {
            println!("  {label}: rate({:.0} mK) = {rate:.3} s^-1", args.t_star.unwrap() * 1e3);
        }
        if let Some(list) = entry["inversions"].as_array() {
            for inv in list {
                println!(
                    "  {label}: {} s^-1 -> T* = {:.1} mK",
                    inv["target_rate_hz"], inv["t_star_mk"].as_f64().unwrap()
                );
            }
        }
    }
    println!("  wrote {}", path.display());
    Ok(())
}
