use ibnls_core::exponents::{is_admissible, AdmissiblePair};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::LabError;
use crate::manifest::{RunDir, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub pair: AdmissiblePair,
    pub admissible: bool,
    /// `4/q + N/r − (N/2 − s)` as an exact fraction.
    pub scaling_defect: String,
}

pub fn classify(pairs: &[AdmissiblePair], dim: u32) -> Vec<PairRow> {
    pairs
        .iter()
        .map(|p| PairRow {
            pair: p.clone(),
            admissible: is_admissible(p, dim),
            scaling_defect: p.scaling_defect(dim).to_string(),
        })
        .collect()
}

pub fn run(cfg: &RunConfig, dir: &mut RunDir) -> Result<Vec<Verdict>, LabError> {
    let pairs = cfg.pairs.as_deref().unwrap_or_default();
    let rows = classify(pairs, cfg.params.dim);
    for r in &rows {
        println!(
            "(q, r, s) = ({}, {}, {}): {}",
            r.pair.q,
            r.pair.r,
            r.pair.s,
            if r.admissible { "admissible" } else { "not admissible" }
        );
    }
    dir.write_json("pairs.json", &rows)?;
    let count = rows.iter().filter(|r| r.admissible).count();
    Ok(vec![Verdict::finding("admissible_count", true, format!("{count} of {}", rows.len()))])
}
