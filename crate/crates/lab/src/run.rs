//! Evolution driver shared by the studies, and the trajectory analyses
//! they report.

use std::io::{self, Write};

use ibnls_core::diagnostics::{
    build_virial_weight, check_below_threshold, coercivity_gap, energy, mass, radial_derivative,
    scattering_indicator, strichartz_proxy, virial_quantity, DiagnosticsRecord, RecordSpec, StrichartzProxy,
    ThresholdCheck, VirialWeight, VIRIAL_SLOPE_MAX,
};
use ibnls_core::exponents::{int, rat, AdmissiblePair, ExtRational};
use ibnls_core::ground_state::{solve_ground_state, GroundState};
use ibnls_core::propagator::{back_propagated_profile, EvolveSettings, FlowFlags, Propagator, StopReason, Trajectory};
use ibnls_core::radial::read_field;
use ibnls_core::{Complex64, Model};
use serde::{Deserialize, Serialize};

use crate::config::{InitialData, RunConfig, ScatterProbe, SolverSection};
use crate::error::LabError;

/// Model plus the ground state it is measured against.
#[derive(Debug, Clone)]
pub struct Setup {
    pub model: Model,
    pub gs: GroundState,
}

impl Setup {
    pub fn new(cfg: &RunConfig) -> Result<Self, LabError> {
        let params = cfg.params.model_params().map_err(|e| LabError::Refused(e.to_string()))?;
        let grid = cfg.grid.ok_or_else(|| LabError::Internal("grid section missing after validation".into()))?;
        let model = Model::new(params, grid.r_max, grid.cells)?;
        let gs = solve_ground_state(&params, &model.grid, &model.lap, &model.basis, &cfg.ground_state)?;
        Ok(Self { model, gs })
    }

    pub fn scaled_ground_state(&self, c: f64) -> Vec<Complex64> {
        self.gs.profile.iter().map(|&q| Complex64::new(c * q, 0.0)).collect()
    }

    pub fn initial_field(&self, data: &InitialData) -> Result<Vec<Complex64>, LabError> {
        match data {
            InitialData::GroundState { c } => Ok(self.scaled_ground_state(*c)),
            InitialData::Gaussian { width, amplitude } => Ok(self
                .model
                .grid
                .nodes
                .iter()
                .map(|r| Complex64::new(amplitude * (-(r / width) * (r / width)).exp(), 0.0))
                .collect()),
            InitialData::File { path } => {
                let (header, values) = read_field(io::BufReader::new(std::fs::File::open(path)?))?;
                header.check_grid(&self.model.grid)?;
                Ok(values)
            }
        }
    }
}

/// Step actually used: the largest `T/n` not above the requested step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPlan {
    pub dt: f64,
    pub steps: u64,
}

pub fn step_plan(model: &Model, solver: &SolverSection) -> StepPlan {
    let requested = solver.dt.unwrap_or_else(|| model.default_dt());
    let steps = (solver.horizon / requested).ceil().max(1.0) as u64;
    StepPlan { dt: solver.horizon / steps as f64, steps }
}

/// `Z` and the coercivity gap for every virial radius at every snapshot.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VirialSeries {
    pub radii: Vec<f64>,
    pub times: Vec<f64>,
    /// `z[k][i]` at `times[k]`, `radii[i]`.
    pub z: Vec<Vec<f64>>,
    pub gaps: Vec<Vec<f64>>,
    /// `‖u‖ ‖∂_r u‖` at each snapshot.
    pub scale: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EvolutionRun {
    pub plan: StepPlan,
    pub spec: RecordSpec,
    pub trajectory: Trajectory,
    pub virial: VirialSeries,
    pub mass0: f64,
    pub energy0: f64,
}

/// Ball radii recorded in the CSV: the configured ones, then any extra
/// probe radii.
pub fn record_radii(cfg: &RunConfig) -> Vec<f64> {
    let mut radii = cfg.diagnostics.ball_radii.clone();
    for p in &cfg.diagnostics.scattering {
        if !radii.contains(&p.radius) {
            radii.push(p.radius);
        }
    }
    radii
}

pub fn evolve(setup: &Setup, u0: Vec<Complex64>, cfg: &RunConfig, store_fields: bool) -> Result<EvolutionRun, LabError> {
    let model = &setup.model;
    let solver = cfg.solver.ok_or_else(|| LabError::Internal("solver section missing after validation".into()))?;
    let radii = &cfg.diagnostics.virial_radii;
    let first = *radii.first().ok_or_else(|| LabError::Internal("no virial radius".into()))?;
    let spec = RecordSpec::new(model, record_radii(cfg), first).map_err(|e| LabError::Internal(e.to_string()))?;
    let weights: Vec<VirialWeight> = radii
        .iter()
        .map(|&r| build_virial_weight(r, &model.grid))
        .collect::<Result<_, _>>()
        .map_err(|e| LabError::Internal(e.to_string()))?;

    let plan = step_plan(model, &solver);
    let mut settings = EvolveSettings::new(solver.horizon, plan.dt, solver.snapshot_every);
    settings.blowup_guard = solver.blowup_guard.map(|k| k * setup.gs.grad_norm);
    settings.boundary_threshold = solver.boundary_threshold;
    settings.boundary_action = solver.boundary_action;
    settings.store_fields = store_fields;

    let mass0 = mass(&model.grid, &u0);
    let energy0 = energy(&model.grid, &model.lap, &u0, &model.params);
    let mut virial = VirialSeries { radii: radii.clone(), ..Default::default() };
    let prop = Propagator::new(model, FlowFlags::default());
    let trajectory = prop
        .evolve(u0, &settings, &spec, &mut |snap| {
            let (grid, lap, p) = (&model.grid, &model.lap, &model.params);
            virial.times.push(snap.t);
            virial.z.push(weights.iter().map(|w| virial_quantity(grid, snap.field, w)).collect());
            virial
                .gaps
                .push(radii.iter().map(|&r| coercivity_gap(grid, lap, snap.field, r, p).gap).collect());
            let du = radial_derivative(grid, snap.field);
            virial.scale.push(grid.norm_sq(snap.field).sqrt() * grid.norm_sq(&du).sqrt());
        })
        .map_err(|e| LabError::Internal(e.to_string()))?;
    Ok(EvolutionRun { plan, spec, trajectory, virial, mass0, energy0 })
}

/// Largest relative deviations of mass and energy from their initial values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub mass: f64,
    pub energy: f64,
}

pub fn drift(records: &[DiagnosticsRecord]) -> Drift {
    let Some(first) = records.first() else { return Drift { mass: 0.0, energy: 0.0 } };
    let rel = |x: f64, x0: f64| if x0 == 0.0 { x.abs() } else { ((x - x0) / x0).abs() };
    records.iter().fold(Drift { mass: 0.0, energy: 0.0 }, |d, r| Drift {
        mass: d.mass.max(rel(r.mass, first.mass)),
        energy: d.energy.max(rel(r.energy, first.energy)),
    })
}

/// `|Z_R(t)| ≤ C·R` with one `C` per run, and the coercivity gap sign.
///
/// `C = (7/4) sup_t ‖u‖‖∂_r u‖` is the Cauchy–Schwarz constant of the
/// weight, the quantity the virial bound is stated in terms of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirialBound {
    pub constant: f64,
    pub violations: usize,
    /// `max_t |Z_R| / R` per radius.
    pub max_ratio: Vec<f64>,
    /// `min_t` gap per radius.
    pub min_gap: Vec<f64>,
    pub negative_gaps: usize,
}

pub fn virial_bound(series: &VirialSeries) -> VirialBound {
    let constant = VIRIAL_SLOPE_MAX * series.scale.iter().copied().fold(0.0, f64::max);
    let n = series.radii.len();
    let mut out = VirialBound {
        constant,
        violations: 0,
        max_ratio: vec![0.0; n],
        min_gap: vec![f64::INFINITY; n],
        negative_gaps: 0,
    };
    for (zs, gaps) in series.z.iter().zip(&series.gaps) {
        for i in 0..n {
            let r = series.radii[i];
            out.max_ratio[i] = out.max_ratio[i].max(zs[i].abs() / r);
            if zs[i].abs() > constant * r {
                out.violations += 1;
            }
            out.min_gap[i] = out.min_gap[i].min(gaps[i]);
            if gaps[i] < 0.0 {
                out.negative_gaps += 1;
            }
        }
    }
    out
}

/// Cauchy increments of `e^{−itΔ²}u(t)` over the snapshots recorded
/// before the outer-shell mass share first exceeds `limit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackpropSummary {
    pub limit: f64,
    /// Last snapshot time inside the window.
    pub window_end: Option<f64>,
    pub times: Vec<f64>,
    pub increments: Vec<f64>,
    pub tail: usize,
    pub margin: f64,
    pub decreasing: bool,
}

pub fn backprop_summary(model: &Model, traj: &Trajectory, limit: f64, tail: usize, margin: f64) -> BackpropSummary {
    let inside = traj
        .records
        .iter()
        .take(traj.snapshots.len())
        .take_while(|r| r.boundary_fraction <= limit)
        .count();
    let bp = back_propagated_profile(&model.basis, &traj.snapshots[..inside]);
    BackpropSummary {
        limit,
        window_end: bp.times.last().copied(),
        decreasing: bp.decreasing_tail(tail, margin),
        times: bp.times,
        increments: bp.increments,
        tail,
        margin,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeVerdict {
    pub radius: f64,
    pub epsilon: f64,
    pub met: bool,
    /// `inf ∫_{B(0,R)} |u|² / M[u₀]` over the tail.
    pub infimum_fraction: f64,
    pub at_time: f64,
}

pub fn scattering_probes(run: &EvolutionRun, probes: &[ScatterProbe], tail_from: f64) -> Vec<ProbeVerdict> {
    let times = run.trajectory.times();
    probes
        .iter()
        .filter_map(|p| {
            let idx = run.spec.ball_radii.iter().position(|&r| r == p.radius)?;
            let series: Vec<f64> = run.trajectory.records.iter().map(|r| r.mass_in_ball[idx] / run.mass0).collect();
            let v = scattering_indicator(&times, &series, p.epsilon, tail_from);
            Some(ProbeVerdict {
                radius: p.radius,
                epsilon: p.epsilon,
                met: v.met,
                infimum_fraction: v.infimum,
                at_time: v.at_time,
            })
        })
        .collect()
}

/// The two pairs reported by default: `(∞, 2)` and `(4, 2N/(N−2))`.
pub fn default_pairs(dim: u32) -> Vec<AdmissiblePair> {
    let n = dim as i64;
    vec![
        AdmissiblePair::biharmonic(ExtRational::Infinite, ExtRational::Finite(int(2))),
        AdmissiblePair::biharmonic(ExtRational::Finite(int(4)), ExtRational::Finite(rat(2 * n, n - 2))),
    ]
}

pub fn strichartz_proxies(model: &Model, traj: &Trajectory) -> Vec<StrichartzProxy> {
    let Some(end) = traj.snapshots.last().map(|s| s.0) else { return Vec::new() };
    let start = traj.snapshots[0].0;
    default_pairs(model.grid.dim)
        .iter()
        .filter_map(|p| strichartz_proxy(model, &traj.snapshots, p, (start, end)).ok())
        .collect()
}

pub fn threshold_at_start(setup: &Setup, u0: &[Complex64]) -> Result<ThresholdCheck, String> {
    let m = &setup.model;
    check_below_threshold(&m.grid, &m.lap, u0, &setup.gs, &m.params).map_err(|e| e.to_string())
}

pub fn stop_label(stop: &StopReason) -> &'static str {
    match stop {
        StopReason::Completed => "completed",
        StopReason::BlowUpGuard { .. } => "blowup_guard",
        StopReason::BoundaryContamination { .. } => "boundary",
    }
}

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `t, Z_R…, gap_R…` per snapshot.
pub fn write_virial_csv<W: Write>(mut w: W, series: &VirialSeries) -> io::Result<()> {
    let mut head = vec!["t".to_string()];
    head.extend(series.radii.iter().map(|r| format!("Z_R{r}")));
    head.extend(series.radii.iter().map(|r| format!("gap_R{r}")));
    writeln!(w, "{}", head.join(","))?;
    for k in 0..series.times.len() {
        let mut row = vec![fmt17(series.times[k])];
        row.extend(series.z[k].iter().map(|&x| fmt17(x)));
        row.extend(series.gaps[k].iter().map(|&x| fmt17(x)));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
