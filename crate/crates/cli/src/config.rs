//! Run configuration: a flat key-value TOML file mirroring the device and
//! sequence tables, with CLI flags taking precedence over file keys.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// All recognized config keys. Every field is optional; commands check for
/// the keys they need and report the missing ones by name.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    // Device description (informational).
    pub name: Option<String>,
    pub geometry: Option<String>,
    pub material: Option<String>,

    // Transmon spectrum.
    pub ej_ghz: Option<f64>,
    pub ec_ghz: Option<f64>,
    pub ej_over_ec: Option<f64>,
    pub f01_bar_ghz: Option<f64>,
    pub delta_f_max_mhz: Option<f64>,
    pub ng_points: Option<usize>,

    // Parity monitoring sequence.
    pub delta_f_hz: Option<f64>,
    pub fidelity: Option<f64>,
    pub t1_us: Option<f64>,
    pub sample_dt_ms: Option<f64>,
    pub duration_s: Option<f64>,
    pub parity_rate_hz: Option<f64>,

    // Quasiparticle dynamics.
    pub s_per_ms: Option<f64>,
    pub r_per_s: Option<f64>,
    pub x0: Option<f64>,
    pub delta_uev: Option<f64>,
    pub f_q_ghz: Option<f64>,
    pub vortex_w_um: Option<f64>,

    // Antenna / blackbody.
    pub r_n_ohm: Option<f64>,
    pub c_j_ff: Option<f64>,
    pub f_max_ghz: Option<f64>,
    pub efficiency_scale: Option<f64>,

    // Run control.
    pub seed: Option<u64>,
    pub output_dir: Option<String>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    /// Fetch a required key, naming it in the error.
    pub fn require<T: Copy>(value: Option<T>, key: &str) -> Result<T, ConfigError> {
        value.ok_or_else(|| ConfigError(format!("missing required key `{key}`")))
    }

    /// Stable hash of the fully resolved configuration, for provenance.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        hex::encode(&digest[..16])
    }
}
