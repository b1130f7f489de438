//! Run manifests: one JSON sidecar per command invocation, written on
//! success and on failure.

use std::path::{Path, PathBuf};
use std::time::Instant;

use photonstat_core::Result;

#[derive(serde::Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: Option<u64>,
    pub duration_ms: u128,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub struct ManifestWriter {
    start: Instant,
    path: PathBuf,
    manifest: RunManifest,
}

impl ManifestWriter {
    /// The manifest lands next to the primary output as
    /// `<out>.manifest.json`.
    pub fn new(command: &str, primary_out: &Path) -> Self {
        let mut name = primary_out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        ManifestWriter {
            start: Instant::now(),
            path: primary_out.with_file_name(name),
            manifest: RunManifest {
                command: command.to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                config: serde_json::Value::Null,
                inputs: Vec::new(),
                outputs: Vec::new(),
                seed: None,
                duration_ms: 0,
                status: "running".into(),
                error: None,
            },
        }
    }

    pub fn config(&mut self, cfg: impl serde::Serialize) {
        self.manifest.config = serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null);
    }

    pub fn input(&mut self, path: &Path) {
        self.manifest.inputs.push(path.display().to_string());
    }

    pub fn output(&mut self, path: &Path) {
        self.manifest.outputs.push(path.display().to_string());
    }

    pub fn seed(&mut self, seed: u64) {
        self.manifest.seed = Some(seed);
    }

    /// Record the outcome and write the manifest file.
    pub fn finish(mut self, result: &Result<()>) {
        self.manifest.duration_ms = self.start.elapsed().as_millis();
        match result {
            Ok(()) => self.manifest.status = "ok".into(),
            Err(e) => {
                self.manifest.status = "error".into();
                self.manifest.error = Some(e.to_string());
            }
        }
        if let Ok(json) = serde_json::to_string_pretty(&self.manifest) {
            let _ = std::fs::write(&self.path, json);
        }
    }
}

/// Run a command body with manifest bookkeeping around it.
pub fn with_manifest(
    command: &str,
    primary_out: &Path,
    body: impl FnOnce(&mut ManifestWriter) -> Result<()>,
) -> Result<()> {
    let mut writer = ManifestWriter::new(command, primary_out);
    let result = body(&mut writer);
    writer.finish(&result);
    result
}
