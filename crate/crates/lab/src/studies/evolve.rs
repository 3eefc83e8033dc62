use ibnls_core::diagnostics::{write_csv, StrichartzProxy, ThresholdCheck};
use ibnls_core::ground_state::GroundState;
use ibnls_core::propagator::StopReason;
use serde::{Deserialize, Serialize};

use super::{csv_bytes, write_field_file};
use crate::config::RunConfig;
use crate::error::LabError;
use crate::manifest::{RunDir, Verdict};
use crate::run::*;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveSummary {
    pub plan: StepPlan,
    pub stop: StopReason,
    pub boundary_first_exceeded: Option<f64>,
    pub boundary_max: f64,
    pub mass0: f64,
    pub energy0: f64,
    pub threshold: Option<ThresholdCheck>,
    pub threshold_error: Option<String>,
    pub drift: Drift,
    pub virial: VirialBound,
    pub backprop: BackpropSummary,
    pub tail_from: f64,
    pub scattering: Vec<ProbeVerdict>,
    pub strichartz: Vec<StrichartzProxy>,
    pub ground_state: GroundState,
}

/// Mass drift allowed before a run is flagged; the splitting conserves
/// mass up to rounding.
pub const MASS_DRIFT_GATE: f64 = 1e-8;

pub fn summarize(setup: &Setup, cfg: &RunConfig, run: &EvolutionRun, threshold: Result<ThresholdCheck, String>) -> EvolveSummary {
    let d = &cfg.diagnostics;
    let horizon = cfg.solver.map(|s| s.horizon).unwrap_or(0.0);
    let tail_from = d.tail_from.unwrap_or(horizon / 2.0);
    let traj = &run.trajectory;
    let (threshold, threshold_error) = match threshold {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e)),
    };
    EvolveSummary {
        plan: run.plan,
        stop: traj.stop.clone(),
        boundary_first_exceeded: traj.boundary_first_exceeded,
        boundary_max: traj.boundary_max,
        mass0: run.mass0,
        energy0: run.energy0,
        threshold,
        threshold_error,
        drift: drift(&traj.records),
        virial: virial_bound(&run.virial),
        backprop: backprop_summary(&setup.model, traj, d.backprop_boundary_limit, d.backprop_tail, d.monotone_margin),
        tail_from,
        scattering: scattering_probes(run, &d.scattering, tail_from),
        strichartz: strichartz_proxies(&setup.model, traj),
        ground_state: setup.gs.clone(),
    }
}

pub fn verdicts(s: &EvolveSummary) -> Vec<Verdict> {
    let mut v = vec![
        Verdict::armed("mass_drift", s.drift.mass <= MASS_DRIFT_GATE, format!("{:.3e}", s.drift.mass)),
        Verdict::armed(
            "virial_bound",
            s.virial.violations == 0,
            format!("C = {:.6e}, max |Z|/R = {:?}", s.virial.constant, s.virial.max_ratio),
        ),
        Verdict::finding("energy_drift", true, format!("{:.3e}", s.drift.energy)),
        Verdict::finding("completed", s.stop == StopReason::Completed, format!("{:?}", s.stop)),
    ];
    match (&s.threshold, &s.threshold_error) {
        (Some(t), _) => v.push(Verdict::finding(
            "below_threshold",
            t.cond_1_4 && t.cond_1_5,
            format!("E·M {:.6e} vs {:.6e}", t.energy_mass, t.energy_mass_threshold),
        )),
        (None, Some(e)) => v.push(Verdict::finding("below_threshold", false, e.clone())),
        _ => {}
    }
    v.push(Verdict::finding(
        "coercivity_nonnegative",
        s.virial.negative_gaps == 0,
        format!("min gap per radius {:?}", s.virial.min_gap),
    ));
    v.push(Verdict::finding(
        "backprop_decreasing",
        s.backprop.decreasing,
        format!("window ends at {:?}, {} increments", s.backprop.window_end, s.backprop.increments.len()),
    ));
    for p in &s.scattering {
        v.push(Verdict::finding(
            &format!("scattering_R{}_eps{}", p.radius, p.epsilon),
            p.met,
            format!("inf fraction {:.3e} at t = {:.3}", p.infimum_fraction, p.at_time),
        ));
    }
    v
}

pub fn run(cfg: &RunConfig, dir: &mut RunDir) -> Result<Vec<Verdict>, LabError> {
    let setup = Setup::new(cfg)?;
    let data = cfg.initial_data.as_ref().ok_or_else(|| LabError::Internal("initial data missing".into()))?;
    let u0 = setup.initial_field(data)?;
    let threshold = threshold_at_start(&setup, &u0);
    let run = evolve(&setup, u0, cfg, true)?;
    let traj = &run.trajectory;
    println!("evolved {} steps of dt = {:.6e}: {}", traj.final_state.steps, run.plan.dt, stop_label(&traj.stop));

    dir.write("timeseries.csv", &csv_bytes(|w| write_csv(w, &run.spec, &traj.records))?)?;
    dir.write("virial.csv", &csv_bytes(|w| write_virial_csv(w, &run.virial))?)?;
    write_field_file(dir, "final.bin", &setup.model, traj.final_state.t, &traj.final_state.field)?;
    let summary = summarize(&setup, cfg, &run, threshold);
    dir.write_json("summary.json", &summary)?;
    Ok(verdicts(&summary))
}
