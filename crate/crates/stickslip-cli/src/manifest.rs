//! Run manifests: the record that makes every output reproducible.
//!
//! Each file-producing invocation writes a `<subcommand>.manifest.json`
//! beside its outputs, containing the fully resolved settings (defaults
//! included), input and output paths, and the tool version. Re-running the
//! same tool version with the recorded settings reproduces the tabular
//! outputs byte-identically; plots are derived artifacts and excluded from
//! that guarantee.

use anyhow::{Context, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};
use stickslip::FrictionParams;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    /// Subcommand name as invoked.
    pub subcommand: &'static str,
    /// Tool version (crate version at build time).
    pub version: &'static str,
    /// Wall-clock timestamp of the run (RFC 3339). Informational only; not
    /// part of the reproducibility contract.
    pub timestamp: String,
    /// Fully resolved friction parameters.
    pub params: FrictionParams,
    /// Fully resolved subcommand settings, defaults included.
    pub settings: serde_json::Value,
    /// Input files consumed.
    pub inputs: Vec<PathBuf>,
    /// Output files produced.
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(
        subcommand: &'static str,
        params: &FrictionParams,
        settings: serde_json::Value,
    ) -> Self {
        Self {
            subcommand,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: chrono::Utc::now().to_rfc3339(),
            params: *params,
            settings,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Writes the manifest as pretty JSON next to the outputs.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(format!("{}.manifest.json", self.subcommand));
        let mut text = serde_json::to_string_pretty(self).context("serializing manifest")?;
        text.push('\n');
        std::fs::write(&path, text)
            .with_context(|| format!("writing manifest {}", path.display()))?;
        Ok(path)
    }
}
