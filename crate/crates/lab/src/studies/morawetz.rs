use ibnls_core::diagnostics::{morawetz_average, write_csv, MorawetzFit, ThresholdCheck};
use ibnls_core::exponents::{int, Rational};
use ibnls_core::propagator::StopReason;
use serde::{Deserialize, Serialize};

use super::csv_bytes;
use crate::config::RunConfig;
use crate::error::LabError;
use crate::manifest::{RunDir, Verdict};
use crate::run::*;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorawetzReport {
    pub plan: StepPlan,
    pub stop: StopReason,
    pub threshold: ThresholdCheck,
    pub fit: Option<MorawetzFit>,
    pub fit_error: Option<String>,
    /// `−min{2,b}/(1+min{2,b})` as an exact fraction when `b` has a short
    /// binary expansion.
    pub predicted_exact: Option<String>,
}

pub fn predicted_exponent_exact(b: f64) -> Option<String> {
    let b = Rational::from_float(b)?;
    if b.denom().bits() > 32 {
        return None;
    }
    let m = if b < int(2) { b } else { int(2) };
    let e = -(m.clone() / (int(1) + m));
    Some(e.to_string())
}

pub fn run(cfg: &RunConfig, dir: &mut RunDir) -> Result<Vec<Verdict>, LabError> {
    let setup = Setup::new(cfg)?;
    let data = cfg.initial_data.as_ref().ok_or_else(|| LabError::Internal("initial data missing".into()))?;
    let u0 = setup.initial_field(data)?;
    let threshold = threshold_at_start(&setup, &u0).map_err(LabError::Refused)?;
    if !(threshold.cond_1_4 && threshold.cond_1_5) {
        return Err(LabError::Refused(format!(
            "initial data is not below the ground-state threshold (E·M {:.6e} vs {:.6e}, gradient product {:.6e} vs {:.6e})",
            threshold.energy_mass,
            threshold.energy_mass_threshold,
            threshold.gradient_mass,
            threshold.gradient_mass_threshold
        )));
    }
    let run = evolve(&setup, u0, cfg, false)?;
    let traj = &run.trajectory;
    dir.write("timeseries.csv", &csv_bytes(|w| write_csv(w, &run.spec, &traj.records))?)?;

    let t_list = &cfg.morawetz.as_ref().ok_or_else(|| LabError::Internal("morawetz section missing".into()))?.t_list;
    let b = setup.model.params.b;
    let (fit, fit_error) = match morawetz_average(&traj.times(), &traj.column(|r| r.potential), t_list, b) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let report = MorawetzReport {
        plan: run.plan,
        stop: traj.stop.clone(),
        threshold,
        fit: fit.clone(),
        fit_error: fit_error.clone(),
        predicted_exact: predicted_exponent_exact(b),
    };
    dir.write_json("morawetz.json", &report)?;

    let predicted = ibnls_core::params::morawetz_exponent(b);
    let exact = report.predicted_exact.clone().unwrap_or_else(|| format!("{predicted}"));
    Ok(match fit {
        Some(f) => {
            println!("fitted slope {:.4}, predicted exponent {} ({})", f.slope, exact, f.predicted);
            vec![
                Verdict::armed("slope_nonpositive", f.slope <= 0.0, format!("slope {:.6}", f.slope)),
                Verdict::finding("decay_below_-0.1", f.slope <= -0.1, format!("slope {:.6}", f.slope)),
                Verdict::finding("predicted_exponent", true, format!("{exact} = {}", f.predicted)),
            ]
        }
        None => vec![Verdict::armed("slope_nonpositive", false, fit_error.unwrap_or_default())],
    })
}
