use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use coarsepu::{FormatError, MetricError};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// How a command ended when it could not produce a full report.
#[derive(Debug)]
pub enum Failure {
    /// Input could not be read or parsed (exit 2).
    Malformed(anyhow::Error),
    /// A mathematical check failed before anything could be built (exit 1).
    Check(Box<Check>),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        if e.is_malformed() {
            Failure::Malformed(e.into())
        } else {
            let check = match &e {
                FormatError::Metric(MetricError::Triangle { x, y, z, dxy, via }) => {
                    Check::fail("triangle inequality", json!(dxy), json!(via), json!([x, y, z]))
                }
                _ => Check::fail("input checks", Value::Null, Value::Null, Value::String(e.to_string())),
            };
            Failure::Check(Box::new(check))
        }
    }
}

pub fn malformed(msg: impl Into<String>) -> Failure {
    Failure::Malformed(anyhow::anyhow!(msg.into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: Value,
    pub bound: Value,
    pub witness: Value,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        pass: bool,
        measured: impl Into<Value>,
        bound: impl Into<Value>,
        witness: impl Into<Value>,
    ) -> Self {
        Check { name: name.into(), pass, measured: measured.into(), bound: bound.into(), witness: witness.into() }
    }

    pub fn fail(name: impl Into<String>, measured: Value, bound: Value, witness: Value) -> Self {
        Check::new(name, false, measured, bound, witness)
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    pub checks: Vec<Check>,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact: Option<Value>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// What a command hands back to `main`.
pub struct Outcome {
    pub checks: Vec<Check>,
    pub summary: Option<Value>,
    pub artifact: Option<Value>,
}

/// Reads input files and digests their contents in order.
pub struct Inputs {
    hasher: Sha256,
    started: Instant,
}

impl Inputs {
    pub fn new() -> Self {
        Inputs { hasher: Sha256::new(), started: Instant::now() }
    }

    pub fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Malformed(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
        self.hasher.update((text.len() as u64).to_le_bytes());
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    /// Mixes non-file parameters into the digest.
    pub fn note(&mut self, param: &str) {
        self.hasher.update((param.len() as u64).to_le_bytes());
        self.hasher.update(param.as_bytes());
    }

    pub fn finish(
        self,
        command: &str,
        checks: Vec<Check>,
        summary: Option<Value>,
        artifact: Option<Value>,
        out: Option<&PathBuf>,
    ) -> anyhow::Result<RunReport> {
        let mut artifact_path = None;
        let mut inline = artifact;
        if let (Some(path), Some(value)) = (out, inline.as_ref()) {
            fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
            artifact_path = Some(path.display().to_string());
            inline = None;
        }
        Ok(RunReport {
            command: command.to_string(),
            inputs_digest: hex::encode(self.hasher.finalize()),
            checks,
            wall_time_ms: self.started.elapsed().as_secs_f64() * 1000.0,
            summary,
            artifact_path,
            artifact: inline,
        })
    }
}
