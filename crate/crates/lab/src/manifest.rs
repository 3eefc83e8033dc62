//! Run directories and their manifests.
//!
//! A run directory holds the outputs of one study plus `manifest.json`,
//! which is written last; a directory without it is an incomplete run.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, Study};

pub const MANIFEST: &str = "manifest.json";

/// One named outcome. Armed verdicts gate the report's exit code; the rest
/// are findings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub armed: bool,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn armed(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), armed: true, passed, detail: detail.into() }
    }

    pub fn finding(name: &str, value: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), armed: false, passed: value, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Relative to the run directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub study: Study,
    pub config: RunConfig,
    pub code_version: String,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<OutputFile>,
    pub verdicts: Vec<Verdict>,
}

impl RunManifest {
    pub fn all_armed_passed(&self) -> bool {
        self.verdicts.iter().filter(|v| v.armed).all(|v| v.passed)
    }
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn sha256_file(path: &Path) -> io::Result<(u64, String)> {
    let mut file = fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    let mut total = 0u64;
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        total += n as u64;
    }
    let hex = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Ok((total, hex))
}

/// Output directory of one run; tracks every file it writes.
#[derive(Debug)]
pub struct RunDir {
    root: PathBuf,
    written: Vec<String>,
    started: String,
}

impl RunDir {
    /// Creates `root` and removes a stale manifest so an interrupted rerun
    /// never looks complete.
    pub fn create(root: &Path) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        match fs::remove_file(root.join(MANIFEST)) {
            Err(e) if e.kind() != io::ErrorKind::NotFound => return Err(e),
            _ => {}
        }
        Ok(Self { root: root.to_path_buf(), written: Vec::new(), started: now() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    /// Registers a file written directly under the run directory.
    pub fn track(&mut self, rel: &str) {
        if !self.written.iter().any(|w| w == rel) {
            self.written.push(rel.to_string());
        }
    }

    pub fn write(&mut self, rel: &str, contents: &[u8]) -> io::Result<()> {
        let path = self.path(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
        self.track(rel);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> io::Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        text.push('\n');
        self.write(rel, text.as_bytes())
    }

    /// Digests every tracked file and writes the manifest.
    pub fn finish(self, study: Study, config: &RunConfig, verdicts: Vec<Verdict>) -> io::Result<RunManifest> {
        let mut outputs = Vec::with_capacity(self.written.len());
        for rel in &self.written {
            let (bytes, sha256) = sha256_file(&self.path(rel))?;
            outputs.push(OutputFile { path: rel.clone(), bytes, sha256 });
        }
        let manifest = RunManifest {
            study,
            config: config.clone(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            started: self.started,
            finished: now(),
            outputs,
            verdicts,
        };
        let tmp = self.root.join("manifest.json.partial");
        fs::write(&tmp, serde_json::to_string_pretty(&manifest).map_err(io::Error::other)? + "\n")?;
        fs::rename(&tmp, self.root.join(MANIFEST))?;
        Ok(manifest)
    }
}

pub fn read_manifest(dir: &Path) -> io::Result<RunManifest> {
    let text = fs::read_to_string(dir.join(MANIFEST))?;
    serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

/// Recomputes each listed digest; returns the paths that no longer match.
pub fn verify_outputs(dir: &Path, manifest: &RunManifest) -> Vec<String> {
    manifest
        .outputs
        .iter()
        .filter(|o| sha256_file(&dir.join(&o.path)).map(|(n, h)| n != o.bytes || h != o.sha256).unwrap_or(true))
        .map(|o| o.path.clone())
        .collect()
}
