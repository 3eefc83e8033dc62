//! Strang splitting for `u_t = iΔ²u − i|x|^{−b}|u|^α u`.
//!
//! The linear flow is exact in the eigenbasis (`Δ²` is `L²`, so mode `k`
//! rotates by `e^{iλ_k²τ}`). The nonlinear flow keeps `|u|` fixed
//! pointwise, so it is an exact phase rotation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{boundary_fraction, DiagnosticsRecord, RecordSpec, BOUNDARY_SHELL};
use crate::error::PropagatorError;
use crate::model::Model;
use crate::radial::SpectralBasis;

/// Switches for reduced dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowFlags {
    /// Keep the nonlinear phase flow.
    pub nonlinear: bool,
    /// Keep the `|x|^{−b}` factor; off reproduces the homogeneous equation.
    pub potential_weight: bool,
}

impl Default for FlowFlags {
    fn default() -> Self {
        Self { nonlinear: true, potential_weight: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState {
    pub field: Vec<Complex64>,
    pub t0: f64,
    pub t: f64,
    pub steps: u64,
}

impl EvolutionState {
    pub fn new(field: Vec<Complex64>, t0: f64) -> Self {
        Self { field, t0, t: t0, steps: 0 }
    }
}

/// Step operators bound to one [`Model`].
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    pub model: &'a Model,
    pub flags: FlowFlags,
    /// `r_j^{−b}`, or ones when the weight is disabled.
    weight: Vec<f64>,
}

impl<'a> Propagator<'a> {
    pub fn new(model: &'a Model, flags: FlowFlags) -> Self {
        let b = model.params.b;
        let weight = model
            .grid
            .nodes
            .iter()
            .map(|r| if flags.potential_weight { r.powf(-b) } else { 1.0 })
            .collect();
        Self { model, flags, weight }
    }

    fn linear_symbol(&self, tau: f64) -> Vec<Complex64> {
        self.model
            .basis
            .eigenvalues
            .iter()
            .map(|l| Complex64::from_polar(1.0, l * l * tau))
            .collect()
    }

    /// Exact linear flow over `τ`.
    pub fn linear_step(&self, state: &mut EvolutionState, tau: f64) {
        if tau == 0.0 {
            return;
        }
        state.field = self.model.basis.apply_diagonal(&state.field, &self.linear_symbol(tau));
    }

    /// Exact nonlinear phase flow `u ← u·exp(−iτ r^{−b}|u|^α)` over `τ`.
    pub fn nonlinear_step(&self, state: &mut EvolutionState, tau: f64) {
        if tau == 0.0 || !self.flags.nonlinear {
            return;
        }
        let alpha = self.model.params.alpha;
        for (z, w) in state.field.iter_mut().zip(&self.weight) {
            let phase = -tau * w * z.norm().powf(alpha);
            *z *= Complex64::from_polar(1.0, phase);
        }
    }

    fn strang_with(&self, state: &mut EvolutionState, dt: f64, symbol: &[Complex64]) {
        self.nonlinear_step(state, 0.5 * dt);
        state.field = self.model.basis.apply_diagonal(&state.field, symbol);
        self.nonlinear_step(state, 0.5 * dt);
        state.steps += 1;
        state.t = state.t0 + state.steps as f64 * dt;
    }

    /// Half nonlinear, full linear, half nonlinear. `dt < 0` runs backwards.
    pub fn strang_step(&self, state: &mut EvolutionState, dt: f64) -> Result<(), PropagatorError> {
        check_dt(dt)?;
        let symbol = self.linear_symbol(dt);
        self.strang_with(state, dt, &symbol);
        Ok(())
    }

    /// Advances `steps` Strang steps of size `dt` without recording.
    pub fn advance(&self, state: &mut EvolutionState, dt: f64, steps: u64) -> Result<(), PropagatorError> {
        check_dt(dt)?;
        let symbol = self.linear_symbol(dt);
        for _ in 0..steps {
            self.strang_with(state, dt, &symbol);
        }
        Ok(())
    }

    /// Runs to `t0 + T` (backwards when `dt < 0`), recording on a cadence.
    pub fn evolve(
        &self,
        u0: Vec<Complex64>,
        settings: &EvolveSettings,
        spec: &RecordSpec,
        observer: &mut dyn FnMut(&Snapshot<'_>),
    ) -> Result<Trajectory, PropagatorError> {
        check_dt(settings.dt)?;
        if !(settings.horizon.is_finite() && settings.horizon >= 0.0) {
            return Err(PropagatorError::Horizon(settings.horizon));
        }
        let dt = settings.dt;
        let total = (settings.horizon / dt.abs()).round() as u64;
        let every = settings.snapshot_every.max(1);
        let symbol = self.linear_symbol(dt);
        let grid = &self.model.grid;
        let lap = &self.model.lap;

        let mut state = EvolutionState::new(u0, settings.t0);
        let mut traj = Trajectory {
            dt,
            records: Vec::new(),
            snapshots: Vec::new(),
            stop: StopReason::Completed,
            boundary_max: 0.0,
            boundary_first_exceeded: None,
            final_state: state.clone(),
        };
        let mut emit = |state: &EvolutionState, traj: &mut Trajectory| {
            let record = spec.record(self.model, state.t, &state.field);
            observer(&Snapshot { step: state.steps, t: state.t, field: &state.field, record: &record });
            if settings.store_fields {
                traj.snapshots.push((state.t, state.field.clone()));
            }
            traj.records.push(record);
        };
        emit(&state, &mut traj);

        while state.steps < total {
            self.strang_with(&mut state, dt, &symbol);

            if let Some(guard) = settings.blowup_guard {
                let grad = grid.norm_sq(&lap.apply(&state.field)).sqrt();
                if !(grad <= guard) {
                    traj.stop = StopReason::BlowUpGuard { t: state.t, grad_l2: grad };
                    emit(&state, &mut traj);
                    break;
                }
            }
            let bf = boundary_fraction(grid, &state.field, BOUNDARY_SHELL);
            traj.boundary_max = traj.boundary_max.max(bf);
            if bf > settings.boundary_threshold && traj.boundary_first_exceeded.is_none() {
                traj.boundary_first_exceeded = Some(state.t);
                if settings.boundary_action == BoundaryAction::Abort {
                    traj.stop = StopReason::BoundaryContamination { t: state.t, fraction: bf };
                    emit(&state, &mut traj);
                    break;
                }
            }
            if state.steps % every == 0 || state.steps == total {
                emit(&state, &mut traj);
            }
        }
        traj.final_state = state;
        Ok(traj)
    }
}

fn check_dt(dt: f64) -> Result<(), PropagatorError> {
    if dt.is_finite() && dt != 0.0 {
        Ok(())
    } else {
        Err(PropagatorError::TimeStep(dt))
    }
}

/// What to do once the outer-shell mass share exceeds its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryAction {
    Abort,
    /// Keep running and report the first crossing time.
    Record,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveSettings {
    pub t0: f64,
    /// Duration `T ≥ 0`; the run takes `round(T/|dt|)` steps.
    pub horizon: f64,
    pub dt: f64,
    /// Record every this many steps; the final step is always recorded.
    pub snapshot_every: u64,
    /// Abort when `‖Δu‖` exceeds this value.
    pub blowup_guard: Option<f64>,
    pub boundary_threshold: f64,
    pub boundary_action: BoundaryAction,
    /// Keep full fields at each recorded snapshot.
    pub store_fields: bool,
}

impl EvolveSettings {
    pub fn new(horizon: f64, dt: f64, snapshot_every: u64) -> Self {
        Self {
            t0: 0.0,
            horizon,
            dt,
            snapshot_every,
            blowup_guard: None,
            boundary_threshold: 1e-8,
            boundary_action: BoundaryAction::Abort,
            store_fields: false,
        }
    }
}

/// Read-only view passed to observers at each recorded step.
pub struct Snapshot<'s> {
    pub step: u64,
    pub t: f64,
    pub field: &'s [Complex64],
    pub record: &'s DiagnosticsRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StopReason {
    Completed,
    BlowUpGuard { t: f64, grad_l2: f64 },
    BoundaryContamination { t: f64, fraction: f64 },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    pub records: Vec<DiagnosticsRecord>,
    /// `(t, u(t))` at recorded steps when fields are stored.
    pub snapshots: Vec<(f64, Vec<Complex64>)>,
    pub stop: StopReason,
    pub boundary_max: f64,
    pub boundary_first_exceeded: Option<f64>,
    pub final_state: EvolutionState,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn column<F: Fn(&DiagnosticsRecord) -> f64>(&self, f: F) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }
}

/// `e^{−itΔ²}u(t)` at each snapshot and the `H²` distances between
/// consecutive profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackPropagation {
    pub times: Vec<f64>,
    /// `‖v(t_{k+1}) − v(t_k)‖_{H²}`.
    pub increments: Vec<f64>,
    /// `‖v(t_k)‖_{H²}`.
    pub norms: Vec<f64>,
}

impl BackPropagation {
    /// True when each increment is at most `(1 − margin)` times the previous
    /// one over the last `count` gaps.
    pub fn decreasing_tail(&self, count: usize, margin: f64) -> bool {
        let n = self.increments.len();
        if n < count || count == 0 {
            return false;
        }
        self.increments[n - count..]
            .windows(2)
            .all(|w| w[1] <= (1.0 - margin) * w[0])
    }
}

/// Coefficients of `e^{−itΔ²}u` in the eigenbasis.
pub fn back_propagated_coefficients(basis: &SpectralBasis, t: f64, u: &[Complex64]) -> Vec<Complex64> {
    basis
        .coefficients(u)
        .into_iter()
        .zip(&basis.eigenvalues)
        .map(|(c, l)| c * Complex64::from_polar(1.0, -l * l * t))
        .collect()
}

/// `e^{−itΔ²}u` on the nodes.
pub fn back_propagate(basis: &SpectralBasis, t: f64, u: &[Complex64]) -> Vec<Complex64> {
    basis.synthesize(&back_propagated_coefficients(basis, t, u))
}

/// Cauchy increments of the back-propagated profiles over `(t_k, u(t_k))`.
///
/// The `H²` norm is `Σ (1 + λ_k²)|c_k|²`, the spectral form of
/// `‖v‖² + ‖Lv‖²`.
pub fn back_propagated_profile(basis: &SpectralBasis, snapshots: &[(f64, Vec<Complex64>)]) -> BackPropagation {
    let symbol: Vec<f64> = basis.eigenvalues.iter().map(|l| 1.0 + l * l).collect();
    let h2 = |c: &[Complex64]| -> f64 { c.iter().zip(&symbol).map(|(z, s)| s * z.norm_sqr()).sum::<f64>().sqrt() };
    let coeffs: Vec<Vec<Complex64>> = snapshots
        .iter()
        .map(|(t, u)| back_propagated_coefficients(basis, *t, u))
        .collect();
    let increments = coeffs
        .windows(2)
        .map(|w| {
            let d: Vec<Complex64> = w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect();
            h2(&d)
        })
        .collect();
    BackPropagation {
        times: snapshots.iter().map(|(t, _)| *t).collect(),
        increments,
        norms: coeffs.iter().map(|c| h2(c)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModelParams;

    fn model() -> Model {
        Model::new(ModelParams::new(5, 1.0, 2.0, true).unwrap(), 15.0, 64).unwrap()
    }

    fn bump(m: &Model, amp: f64) -> Vec<Complex64> {
        m.grid.sample_real(|r| amp * (-r * r / 2.0).exp()).values
    }

    #[test]
    fn zero_steps_are_identities() {
        let m = model();
        let p = Propagator::new(&m, FlowFlags::default());
        let mut s = EvolutionState::new(bump(&m, 1.0), 0.0);
        let before = s.field.clone();
        p.linear_step(&mut s, 0.0);
        p.nonlinear_step(&mut s, 0.0);
        assert_eq!(s.field, before);
    }

    #[test]
    fn nonlinear_step_keeps_modulus_and_composes() {
        let m = model();
        let p = Propagator::new(&m, FlowFlags::default());
        let u = bump(&m, 2.0);
        let mut a = EvolutionState::new(u.clone(), 0.0);
        p.nonlinear_step(&mut a, 0.3);
        p.nonlinear_step(&mut a, 0.45);
        let mut b = EvolutionState::new(u.clone(), 0.0);
        p.nonlinear_step(&mut b, 0.75);
        for j in 0..u.len() {
            // a Cartesian rotation can only keep |u| to a few ulps
            assert!((a.field[j].norm() - u[j].norm()).abs() <= 4.0 * f64::EPSILON * u[j].norm());
            assert!((a.field[j] - b.field[j]).norm() < 1e-14 * (1.0 + u[j].norm()));
        }
    }

    #[test]
    fn rejects_zero_step() {
        let m = model();
        let p = Propagator::new(&m, FlowFlags::default());
        let mut s = EvolutionState::new(bump(&m, 1.0), 0.0);
        assert_eq!(p.strang_step(&mut s, 0.0), Err(PropagatorError::TimeStep(0.0)));
    }

    #[test]
    fn free_flow_has_zero_increments() {
        let m = model();
        let p = Propagator::new(&m, FlowFlags { nonlinear: false, potential_weight: true });
        let mut s = EvolutionState::new(bump(&m, 1.0), 0.0);
        let mut snaps = vec![(0.0, s.field.clone())];
        for k in 1..=3 {
            p.advance(&mut s, 1e-3, 10).unwrap();
            snaps.push((s.t, s.field.clone()));
            assert!((s.t - k as f64 * 1e-2).abs() < 1e-15);
        }
        let bp = back_propagated_profile(&m.basis, &snaps);
        let scale = bp.norms[0];
        assert!(bp.increments.iter().all(|d| *d <= 1e-12 * scale), "{:?}", bp.increments);
    }
}
