//! `dispersion`: charge-dispersion curves and the parity splitting summary.

use std::path::Path;

use clap::Args;
use serde_json::json;

use qparity::io::write_dispersion;
use qparity::transmon::{dispersion_curve, fit_ej_ec, TransmonParams};

use crate::config::Config;
use crate::error::CliError;
use crate::report::{create_artifact, Report};

#[derive(Debug, Args)]
pub struct DispersionArgs {
    /// Josephson energy in GHz (with --ec-ghz).
    #[arg(long)]
    pub ej_ghz: Option<f64>,
    /// Charging energy in GHz (with --ej-ghz).
    #[arg(long)]
    pub ec_ghz: Option<f64>,
    /// Mean transition frequency in GHz (with --ej-over-ec).
    #[arg(long)]
    pub f01_bar_ghz: Option<f64>,
    /// Ej/Ec ratio (with --f01-bar-ghz).
    #[arg(long)]
    pub ej_over_ec: Option<f64>,
    /// Number of offset-charge grid points.
    #[arg(long)]
    pub ng_points: Option<usize>,
}

pub fn run(
    args: &DispersionArgs,
    config: &Config,
    seed: u64,
    out_dir: &Path,
) -> Result<(), CliError> {
    let ej = args.ej_ghz.or(config.ej_ghz);
    let ec = args.ec_ghz.or(config.ec_ghz);
    let f01_bar = args.f01_bar_ghz.or(config.f01_bar_ghz);
    let ratio = args.ej_over_ec.or(config.ej_over_ec);
    let ng_points = args.ng_points.or(config.ng_points).unwrap_or(101);

    let params = match (ej, ec, f01_bar, ratio) {
        (Some(ej), Some(ec), _, _) => TransmonParams::new(ej, ec, 0.0)?,
        (None, None, Some(f01_bar), Some(ratio)) => fit_ej_ec(f01_bar, ratio)?,
        (Some(_), None, _, _) => return Err(CliError::Usage("missing required key `ec_ghz`".into())),
        (None, Some(_), _, _) => return Err(CliError::Usage("missing required key `ej_ghz`".into())),
        (None, None, Some(_), None) => {
            return Err(CliError::Usage("missing required key `ej_over_ec`".into()))
        }
        (None, None, None, _) => {
            return Err(CliError::Usage(
                "need either (ej_ghz, ec_ghz) or (f01_bar_ghz, ej_over_ec)".into(),
            ))
        }
    };

    let curve = dispersion_curve(&params, ng_points)?;
    write_dispersion(create_artifact(out_dir, "dispersion.csv")?, &curve)?;

    let mut report = Report::new("dispersion", seed, config.hash());
    report.results = json!({
        "ej_ghz": params.ej,
        "ec_ghz": params.ec,
        "ej_over_ec": params.ratio(),
        "f01_bar_ghz": curve.f01_bar,
        "delta_f_max_mhz": curve.delta_f_max_mhz,
        "ng_points": ng_points,
    });
    let path = report.write(out_dir)?;

    println!(
        "dispersion: Ej = {:.4} GHz, Ec = {:.4} GHz (Ej/Ec = {:.1})",
        params.ej,
        params.ec,
        params.ratio()
    );
    println!(
        "  f01_bar = {:.4} GHz, delta_f_max = {:.4} MHz",
        curve.f01_bar, curve.delta_f_max_mhz
    );
    println!("  wrote {} and {}", out_dir.join("dispersion.csv").display(), path.display());
    Ok(())
}
