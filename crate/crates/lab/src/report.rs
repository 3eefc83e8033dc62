//! Rendering of a finished run directory.

use std::fmt::Write;
use std::io;
use std::path::Path;

use crate::manifest::{read_manifest, verify_outputs, RunManifest};

#[derive(Debug)]
pub struct Report {
    pub manifest: RunManifest,
    /// Outputs whose size or digest no longer matches the manifest.
    pub tampered: Vec<String>,
}

impl Report {
    pub fn load(dir: &Path) -> io::Result<Self> {
        if !dir.is_dir() {
            return Err(io::Error::new(io::ErrorKind::NotFound, format!("{} is not a directory", dir.display())));
        }
        let manifest = read_manifest(dir)?;
        let tampered = verify_outputs(dir, &manifest);
        Ok(Self { manifest, tampered })
    }

    pub fn passed(&self) -> bool {
        self.tampered.is_empty() && self.manifest.all_armed_passed()
    }

    /// 0 when every armed check passed and all digests match, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            3
        }
    }

    pub fn render(&self) -> String {
        let m = &self.manifest;
        let mut out = String::new();
        let _ = writeln!(out, "study    {}", m.study);
        let _ = writeln!(out, "version  {}", m.code_version);
        let _ = writeln!(out, "started  {}", m.started);
        let _ = writeln!(out, "finished {}", m.finished);
        let _ = writeln!(out, "outputs  {}", m.outputs.len());
        for v in &m.verdicts {
            let tag = match (v.armed, v.passed) {
                (true, true) => "PASS",
                (true, false) => "FAIL",
                (false, true) => "yes ",
                (false, false) => "no  ",
            };
            let _ = writeln!(out, "  {tag} {}: {}", v.name, v.detail);
        }
        if self.tampered.is_empty() {
            let _ = writeln!(out, "  PASS digests: {} files match", m.outputs.len());
        } else {
            let _ = writeln!(out, "  FAIL digests: {} changed since the run", self.tampered.join(", "));
        }
        out
    }
}
