use ibnls_core::exponents::{embedding_window, parse_rational, verify_exponent_system, EmbeddingWindow, ExponentReport, Region};
use serde::{Deserialize, Serialize};

use crate::config::{ExponentTuple, RunConfig};
use crate::error::LabError;
use crate::manifest::{RunDir, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionOutcome {
    pub region: Region,
    pub report: Option<ExponentReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleOutcome {
    pub tuple: ExponentTuple,
    pub regions: Vec<RegionOutcome>,
    pub embedding: EmbeddingWindow,
}

impl TupleOutcome {
    pub fn passed(&self) -> bool {
        self.embedding.all_samples_pass()
            && self.regions.iter().all(|r| r.report.as_ref().is_some_and(|rep| rep.passed()))
    }
}

pub fn evaluate(tuple: &ExponentTuple, dim: u32) -> Result<TupleOutcome, LabError> {
    let parse = |s: &str| parse_rational(s).map_err(|e| LabError::Internal(e.to_string()));
    let (b, alpha, eta, theta) = (parse(&tuple.b)?, parse(&tuple.alpha)?, parse(&tuple.eta)?, parse(&tuple.theta)?);
    let regions = [Region::Ball, Region::Exterior]
        .into_iter()
        .map(|region| match verify_exponent_system(&b, &alpha, &eta, &theta, region) {
            Ok(report) => RegionOutcome { region, report: Some(report), error: None },
            Err(e) => RegionOutcome { region, report: None, error: Some(e.to_string()) },
        })
        .collect();
    Ok(TupleOutcome { tuple: tuple.clone(), regions, embedding: embedding_window(dim, &b, &alpha) })
}

pub fn run(cfg: &RunConfig, dir: &mut RunDir) -> Result<Vec<Verdict>, LabError> {
    let tuples = &cfg.exponents.as_ref().ok_or_else(|| LabError::Internal("exponents section missing".into()))?.tuples;
    let outcomes: Vec<TupleOutcome> = tuples.iter().map(|t| evaluate(t, cfg.params.dim)).collect::<Result<_, _>>()?;
    for o in &outcomes {
        let t = &o.tuple;
        println!("(b, α, η, θ̃) = ({}, {}, {}, {}): {}", t.b, t.alpha, t.eta, t.theta, if o.passed() { "ok" } else { "FAILED" });
        for r in &o.regions {
            if let Some(e) = &r.error {
                println!("  {:?}: {e}", r.region);
            }
            for c in r.report.iter().flat_map(|rep| rep.failures()) {
                println!("  {:?} {}: {}", r.region, c.name, c.detail);
            }
        }
    }
    dir.write_json("exponents.json", &outcomes)?;
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    Ok(vec![Verdict::armed(
        "identities",
        failed == 0,
        format!("{} of {} tuples pass (a)–(f) and the embedding samples", outcomes.len() - failed, outcomes.len()),
    )])
}
