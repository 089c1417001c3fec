use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;
use sha2::{Digest, Sha256};

use formbench::{Error, Result};

use crate::commands::pipeline::RunConfig;

/// Provenance record for one pipeline run: the resolved configuration,
/// content hashes of every artifact, tool version and wall-clock timings.
/// Written on success and on failure.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config: RunConfig,
    /// Relative artifact path → SHA-256 of its bytes.
    pub artifacts: BTreeMap<String, String>,
    pub timings_s: BTreeMap<String, f64>,
    #[serde(skip)]
    started: Instant,
}

impl RunManifest {
    pub fn new(config: &RunConfig) -> Result<Self> {
        Ok(RunManifest {
            tool_version: env!("CARGO_PKG_VERSION"),
            status: "running".into(),
            error: None,
            config: config.clone(),
            artifacts: BTreeMap::new(),
            timings_s: BTreeMap::new(),
            started: Instant::now(),
        })
    }

    pub fn add_artifact(&mut self, base: &Path, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        let rel = path
            .strip_prefix(base)
            .unwrap_or(path)
            .to_string_lossy()
            .into_owned();
        self.artifacts.insert(rel, hex);
        Ok(())
    }

    pub fn add_timing(&mut self, step: &str, elapsed: Duration) {
        self.timings_s
            .insert(step.to_string(), elapsed.as_secs_f64());
    }

    pub fn finish_ok(&mut self) {
        self.status = "ok".into();
        self.add_timing("total", self.started.elapsed());
    }

    pub fn finish_err(&mut self, message: &str) {
        self.status = "error".into();
        self.error = Some(message.to_string());
        self.add_timing("total", self.started.elapsed());
    }
}
