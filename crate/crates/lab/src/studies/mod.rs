//! The canned studies behind each subcommand.

pub mod check_pairs;
pub mod evolve;
pub mod exponents;
pub mod groundstate;
pub mod morawetz;
pub mod sweep;

use std::io::BufWriter;
use std::path::Path;

use ibnls_core::radial::{write_field, FieldHeader, Precision};
use ibnls_core::{Complex64, Model};

use crate::config::{RunConfig, Study};
use crate::error::LabError;
use crate::manifest::{RunDir, RunManifest};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Keep finished sweep rows from an earlier attempt.
    pub resume: bool,
    /// Worker count for sweeps; `None` uses all cores.
    pub threads: Option<usize>,
}

/// Runs `study` into `out`; the manifest is written only on success.
pub fn run_study(study: Study, cfg: &RunConfig, out: &Path, opts: RunOptions) -> Result<RunManifest, LabError> {
    let mut dir = RunDir::create(out)?;
    dir.write("config.json", (cfg.to_json() + "\n").as_bytes())?;
    let verdicts = match study {
        Study::Groundstate => groundstate::run(cfg, &mut dir)?,
        Study::Evolve => evolve::run(cfg, &mut dir)?,
        Study::Sweep => sweep::run(cfg, &mut dir, opts)?,
        Study::Morawetz => morawetz::run(cfg, &mut dir)?,
        Study::CheckPairs => check_pairs::run(cfg, &mut dir)?,
        Study::Exponents => exponents::run(cfg, &mut dir)?,
    };
    Ok(dir.finish(study, cfg, verdicts)?)
}

pub(crate) fn write_field_file(
    dir: &mut RunDir,
    rel: &str,
    model: &Model,
    t: f64,
    values: &[Complex64],
) -> Result<(), LabError> {
    let header = FieldHeader {
        dim: model.grid.dim,
        m: model.grid.len() as u64,
        r_max: model.grid.r_max,
        b: model.params.b,
        alpha: model.params.alpha,
        t,
        precision: Precision::Complex128,
    };
    let file = std::fs::File::create(dir.path(rel))?;
    write_field(BufWriter::new(file), &header, values)?;
    dir.track(rel);
    Ok(())
}

pub(crate) fn csv_bytes<F>(write: F) -> Result<Vec<u8>, LabError>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}
