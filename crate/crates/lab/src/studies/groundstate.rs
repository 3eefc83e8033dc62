use ibnls_core::ground_state::{threshold_quantities, GroundState, ThresholdQuantities};
use serde::Serialize;

use super::write_field_file;
use crate::config::RunConfig;
use crate::error::LabError;
use crate::manifest::{RunDir, Verdict};
use crate::run::Setup;

#[derive(Debug, Serialize)]
struct Summary<'a> {
    ground_state: &'a GroundState,
    thresholds: ThresholdQuantities,
    lambda_max: f64,
    default_dt: f64,
}

pub fn run(cfg: &RunConfig, dir: &mut RunDir) -> Result<Vec<Verdict>, LabError> {
    let setup = Setup::new(cfg)?;
    let gs = &setup.gs;
    let thresholds = threshold_quantities(gs, &setup.model.params)?;
    println!(
        "ground state: {} iterations, residual {:.3e}, E·M = {:.10e}, ‖ΔQ‖‖Q‖ = {:.10e}",
        gs.iterations, gs.residual, thresholds.energy_mass, thresholds.gradient_mass
    );
    dir.write_json(
        "groundstate.json",
        &Summary {
            ground_state: gs,
            thresholds,
            lambda_max: setup.model.basis.lambda_max(),
            default_dt: setup.model.default_dt(),
        },
    )?;
    write_field_file(dir, "groundstate.bin", &setup.model, 0.0, &gs.field())?;
    Ok(vec![
        Verdict::armed(
            "residual",
            gs.residual <= cfg.ground_state.residual_tol,
            format!("{:.3e} (gate {:.1e})", gs.residual, cfg.ground_state.residual_tol),
        ),
        Verdict::armed("identity", gs.identity_defect <= 1e-6, format!("relative defect {:.3e}", gs.identity_defect)),
        Verdict::armed(
            "multiplier",
            (gs.final_multiplier() - 1.0).abs() <= 1e-8,
            format!("final multiplier {:.15}", gs.final_multiplier()),
        ),
    ])
}
