//! Machine-readable run reports: every numeric result is traceable to the
//! resolved config hash and seed. Artifacts contain no wall-clock data, so
//! identical (config, seed) runs are byte-identical.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
    /// Paths of ingested input files, if any.
    pub inputs: Vec<String>,
    pub results: Value,
}

impl Report {
    pub fn new(command: &str, seed: u64, config_hash: String) -> Self {
        Self {
            command: command.to_string(),
            seed,
            config_hash,
            inputs: Vec::new(),
            results: Value::Null,
        }
    }

    pub fn write(&self, out_dir: &Path) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(out_dir)
            .map_err(|e| CliError::Data(format!("cannot create {}: {e}", out_dir.display())))?;
        let path = out_dir.join(format!("{}_report.json", self.command));
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Data(format!("report serialization: {e}")))?;
        text.push('\n');
        std::fs::write(&path, text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Open an artifact file for writing inside the output directory.
pub fn create_artifact(out_dir: &Path, name: &str) -> Result<std::fs::File, CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", out_dir.display())))?;
    let path = out_dir.join(name);
    std::fs::File::create(&path)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}
