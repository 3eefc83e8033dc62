//! Run configuration: JSON layout, defaults and validation.
//!
//! Field names follow the docs (`N`, `R_max`, `M`, `T`); see
//! `docs/config.md` for the full schema.

use std::fmt;
use std::path::{Path, PathBuf};

use ibnls_core::exponents::{parse_rational, AdmissiblePair};
use ibnls_core::ground_state::GroundStateControls;
use ibnls_core::params::validate_intercritical;
use ibnls_core::propagator::BoundaryAction;
use ibnls_core::{ModelParams, ParamsError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest grid accepted from a config file.
pub const MIN_CELLS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    Groundstate,
    Evolve,
    Sweep,
    Morawetz,
    CheckPairs,
    Exponents,
}

impl Study {
    pub fn as_str(self) -> &'static str {
        match self {
            Study::Groundstate => "groundstate",
            Study::Evolve => "evolve",
            Study::Sweep => "sweep",
            Study::Morawetz => "morawetz",
            Study::CheckPairs => "check-pairs",
            Study::Exponents => "exponents",
        }
    }

    fn needs_grid(self) -> bool {
        matches!(self, Study::Groundstate | Study::Evolve | Study::Sweep | Study::Morawetz)
    }

    fn needs_solver(self) -> bool {
        matches!(self, Study::Evolve | Study::Sweep | Study::Morawetz)
    }
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must match the subcommand when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<Study>,
    pub params: ParamsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
    #[serde(default)]
    pub ground_state: GroundStateControls,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_data: Option<InitialData>,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morawetz: Option<MorawetzSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<AdmissiblePair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<ExponentsSection>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(rename = "N")]
    pub dim: u32,
    pub b: f64,
    pub alpha: f64,
    #[serde(default = "yes")]
    pub strict_mode: bool,
}

impl ParamsSection {
    pub fn model_params(&self) -> Result<ModelParams, ParamsError> {
        ModelParams::new(self.dim, self.b, self.alpha, self.strict_mode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "R_max")]
    pub r_max: f64,
    #[serde(rename = "M")]
    pub cells: usize,
}

fn default_every() -> u64 {
    1
}

fn default_guard() -> Option<f64> {
    Some(10.0)
}

fn default_boundary_threshold() -> f64 {
    1e-8
}

fn default_boundary_action() -> BoundaryAction {
    BoundaryAction::Record
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// Requested step; `null` takes the propagator default. The step used is
    /// the largest `T/n` not exceeding it.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default = "default_every")]
    pub snapshot_every: u64,
    /// Abort once `‖Δu‖` exceeds this multiple of `‖ΔQ‖`; `null` disables.
    #[serde(default = "default_guard")]
    pub blowup_guard: Option<f64>,
    /// Share of the mass in `r ≥ 0.9 R_max` that counts as contamination.
    #[serde(default = "default_boundary_threshold")]
    pub boundary_threshold: f64,
    #[serde(default = "default_boundary_action")]
    pub boundary_action: BoundaryAction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `c·Q` with `Q` solved on the run grid.
    GroundState { c: f64 },
    /// `amplitude · exp(−(r/width)²)`.
    Gaussian { width: f64, amplitude: f64 },
    /// A field container written by a previous run on the same grid.
    File { path: PathBuf },
}

/// One `(R, ε)` probe of the scattering criterion, with `ε` relative to
/// `‖u₀‖`: met when `inf_{t ≥ tail_from} ∫_{B(0,R)} |u|² ≤ ε² M[u₀]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterProbe {
    pub radius: f64,
    pub epsilon: f64,
}

fn default_radii() -> Vec<f64> {
    vec![10.0]
}

fn default_bp_limit() -> f64 {
    1e-2
}

fn default_bp_tail() -> usize {
    5
}

fn default_margin() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    #[serde(default = "default_radii")]
    pub ball_radii: Vec<f64>,
    /// Radii of the virial weight; the first one feeds the CSV `Z` column.
    #[serde(default = "default_radii")]
    pub virial_radii: Vec<f64>,
    #[serde(default)]
    pub scattering: Vec<ScatterProbe>,
    /// Start of the tail for the scattering infimum; `null` means `T/2`.
    #[serde(default)]
    pub tail_from: Option<f64>,
    /// Back-propagated profiles are compared only before the outer-shell
    /// mass share first exceeds this value.
    #[serde(default = "default_bp_limit")]
    pub backprop_boundary_limit: f64,
    /// Number of trailing snapshot gaps that must shrink.
    #[serde(default = "default_bp_tail")]
    pub backprop_tail: usize,
    /// Each trailing increment must be at most `(1 − margin)` times the
    /// previous one.
    #[serde(default = "default_margin")]
    pub monotone_margin: f64,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            ball_radii: default_radii(),
            virial_radii: default_radii(),
            scattering: Vec::new(),
            tail_from: None,
            backprop_boundary_limit: default_bp_limit(),
            backprop_tail: default_bp_tail(),
            monotone_margin: default_margin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub amplitudes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorawetzSection {
    #[serde(rename = "T_list")]
    pub t_list: Vec<f64>,
}

/// Rational tuple `(b, α, η, θ̃)` given as strings such as `"7/2"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentTuple {
    pub b: String,
    pub alpha: String,
    pub eta: String,
    pub theta: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentsSection {
    pub tuples: Vec<ExponentTuple>,
}

/// A violated bound, named by its field path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config:\n  {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n  "))]
    Invalid(Vec<Violation>),
}

/// Reads, parses and validates a config for `study`; `strict` forces
/// `params.strict_mode` on before validation.
///
/// A relative `initial_data.path` is resolved against the config file's
/// directory.
pub fn load_config(path: &Path, study: Study, strict: bool) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    let mut cfg: RunConfig = serde_json::from_str(&text)?;
    if strict {
        cfg.params.strict_mode = true;
    }
    if let Some(InitialData::File { path: file }) = &mut cfg.initial_data {
        if file.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            *file = base.join(&*file);
        }
    }
    let violations = cfg.validate(study);
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Invalid(violations))
    }
}

struct Collector(Vec<Violation>);

impl Collector {
    fn check(&mut self, ok: bool, field: &str, message: impl Into<String>) {
        if !ok {
            self.0.push(Violation { field: field.into(), message: message.into() });
        }
    }

    fn require<T>(&mut self, section: &Option<T>, field: &str, study: Study) {
        self.check(section.is_some(), field, format!("section required by study {study}"));
    }
}

fn finite_pos(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

impl RunConfig {
    /// Every violated bound for running `study`; empty when valid.
    pub fn validate(&self, study: Study) -> Vec<Violation> {
        let mut c = Collector(Vec::new());
        if let Some(s) = self.study {
            c.check(s == study, "study", format!("config is for {s}, command is {study}"));
        }

        let p = &self.params;
        let report = validate_intercritical(&ModelParams::unchecked(p.dim, p.b, p.alpha, p.strict_mode));
        for f in report.failures() {
            c.check(false, "params", format!("must satisfy {} ({})", f.bound, f.detail));
        }

        if study.needs_grid() {
            c.require(&self.grid, "grid", study);
        }
        if let Some(g) = &self.grid {
            c.check(finite_pos(g.r_max), "grid.R_max", format!("must be positive and finite, got {}", g.r_max));
            c.check(g.cells >= MIN_CELLS, "grid.M", format!("must be at least {MIN_CELLS}, got {}", g.cells));
        }
        let r_max = self.grid.map(|g| g.r_max).unwrap_or(f64::INFINITY);

        if study.needs_solver() {
            c.require(&self.solver, "solver", study);
        }
        if let Some(s) = &self.solver {
            if let Some(dt) = s.dt {
                c.check(finite_pos(dt), "solver.dt", format!("must be positive and finite, got {dt}"));
            }
            c.check(finite_pos(s.horizon), "solver.T", format!("must be positive and finite, got {}", s.horizon));
            c.check(s.snapshot_every >= 1, "solver.snapshot_every", "must be at least 1");
            if let Some(g) = s.blowup_guard {
                c.check(g.is_finite() && g > 1.0, "solver.blowup_guard", format!("must exceed 1, got {g}"));
            }
            c.check(
                s.boundary_threshold > 0.0 && s.boundary_threshold <= 1.0,
                "solver.boundary_threshold",
                format!("must lie in (0, 1], got {}", s.boundary_threshold),
            );
        }

        let gs = &self.ground_state;
        c.check(gs.max_iter >= 1, "ground_state.max_iter", "must be at least 1");
        c.check(finite_pos(gs.tol), "ground_state.tol", "must be positive");
        c.check(finite_pos(gs.residual_tol), "ground_state.residual_tol", "must be positive");
        c.check((0.0..1.0).contains(&gs.damping), "ground_state.damping", "must lie in [0, 1)");
        c.check(finite_pos(gs.seed_width), "ground_state.seed_width", "must be positive");

        if matches!(study, Study::Evolve | Study::Morawetz) {
            c.require(&self.initial_data, "initial_data", study);
        }
        match &self.initial_data {
            Some(InitialData::GroundState { c: amp }) => {
                c.check(amp.is_finite(), "initial_data.c", "must be finite");
            }
            Some(InitialData::Gaussian { width, amplitude }) => {
                c.check(finite_pos(*width), "initial_data.width", "must be positive");
                c.check(amplitude.is_finite(), "initial_data.amplitude", "must be finite");
            }
            Some(InitialData::File { path }) => {
                c.check(path.is_file(), "initial_data.path", format!("{} does not exist", path.display()));
            }
            None => {}
        }

        let d = &self.diagnostics;
        for r in &d.ball_radii {
            c.check(*r >= 0.0 && *r <= r_max, "diagnostics.ball_radii", format!("{r} outside [0, R_max]"));
        }
        if study.needs_solver() {
            c.check(!d.virial_radii.is_empty(), "diagnostics.virial_radii", "needs at least one radius");
        }
        for r in &d.virial_radii {
            c.check(*r > 0.0 && *r <= r_max / 2.0, "diagnostics.virial_radii", format!("{r} outside (0, R_max/2]"));
        }
        for probe in &d.scattering {
            c.check(
                probe.radius > 0.0 && probe.radius <= r_max,
                "diagnostics.scattering.radius",
                format!("{} outside (0, R_max]", probe.radius),
            );
            c.check(finite_pos(probe.epsilon), "diagnostics.scattering.epsilon", "must be positive");
        }
        if let Some(t) = d.tail_from {
            c.check(t.is_finite() && t >= 0.0, "diagnostics.tail_from", "must be nonnegative");
        }
        c.check(
            d.backprop_boundary_limit > 0.0 && d.backprop_boundary_limit <= 1.0,
            "diagnostics.backprop_boundary_limit",
            "must lie in (0, 1]",
        );
        c.check(d.backprop_tail >= 1, "diagnostics.backprop_tail", "must be at least 1");
        c.check((0.0..1.0).contains(&d.monotone_margin), "diagnostics.monotone_margin", "must lie in [0, 1)");

        if study == Study::Sweep {
            c.require(&self.sweep, "sweep", study);
        }
        if let Some(s) = &self.sweep {
            for a in &s.amplitudes {
                c.check(a.is_finite(), "sweep.amplitudes", format!("{a} is not finite"));
            }
        }

        if study == Study::Morawetz {
            c.require(&self.morawetz, "morawetz", study);
        }
        if let Some(m) = &self.morawetz {
            let t_end = self.solver.map(|s| s.horizon).unwrap_or(f64::INFINITY);
            c.check(m.t_list.len() >= 2, "morawetz.T_list", "needs at least two horizons");
            c.check(
                m.t_list.iter().all(|t| finite_pos(*t) && *t <= t_end),
                "morawetz.T_list",
                "entries must lie in (0, solver.T]",
            );
            c.check(m.t_list.windows(2).all(|w| w[0] < w[1]), "morawetz.T_list", "must be increasing");
        }

        if study == Study::CheckPairs {
            c.require(&self.pairs, "pairs", study);
        }
        if study == Study::Exponents {
            c.require(&self.exponents, "exponents", study);
        }
        if let Some(e) = &self.exponents {
            for (k, t) in e.tuples.iter().enumerate() {
                for (name, v) in [("b", &t.b), ("alpha", &t.alpha), ("eta", &t.eta), ("theta", &t.theta)] {
                    c.check(
                        parse_rational(v).is_ok(),
                        &format!("exponents.tuples[{k}].{name}"),
                        format!("{v:?} is not an exact rational"),
                    );
                }
            }
        }
        c.0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> RunConfig {
        serde_json::from_str(r#"{"params": {"N": 5, "b": 1, "alpha": 2}, "grid": {"R_max": 30, "M": 64}}"#).unwrap()
    }

    #[test]
    fn minimal_config_is_valid() {
        let cfg = minimal();
        assert!(cfg.validate(Study::Groundstate).is_empty());
        assert!(cfg.params.strict_mode);
        assert_eq!(cfg.ground_state, GroundStateControls::default());
    }

    #[test]
    fn decay_bound_is_named() {
        let mut cfg = minimal();
        cfg.params.b = 3.0;
        let v = cfg.validate(Study::Groundstate);
        assert!(v.iter().any(|v| v.field == "params" && v.message.contains("b < min{N/2,4}")), "{v:?}");
    }

    #[test]
    fn missing_sections_are_reported() {
        let cfg: RunConfig = serde_json::from_str(r#"{"params": {"N": 5, "b": 1, "alpha": 2}}"#).unwrap();
        let fields: Vec<String> = cfg.validate(Study::Evolve).into_iter().map(|v| v.field).collect();
        assert!(fields.contains(&"grid".to_string()));
        assert!(fields.contains(&"solver".to_string()));
        assert!(fields.contains(&"initial_data".to_string()));
    }

    #[test]
    fn small_grids_and_wide_radii_rejected() {
        let mut cfg = minimal();
        cfg.grid = Some(GridSection { r_max: 30.0, cells: 8 });
        cfg.diagnostics.virial_radii = vec![20.0];
        let fields: Vec<String> = cfg.validate(Study::Groundstate).into_iter().map(|v| v.field).collect();
        assert_eq!(fields, ["grid.M", "diagnostics.virial_radii"]);
    }

    #[test]
    fn unknown_fields_are_parse_errors() {
        let out: Result<RunConfig, _> =
            serde_json::from_str(r#"{"params": {"N": 5, "b": 1, "alpha": 2, "beta": 1}}"#);
        assert!(out.is_err());
    }

    #[test]
    fn study_mismatch() {
        let mut cfg = minimal();
        cfg.study = Some(Study::Sweep);
        assert_eq!(cfg.validate(Study::Groundstate)[0].field, "study");
    }
}
