//! Equation parameters `(N, b, alpha)` and the critical Sobolev index.

use serde::{Deserialize, Serialize};

use crate::error::ParamsError;

/// Parameter triple of `i u_t + Δ²u − |x|^{−b}|u|^α u = 0` in `ℝ^N`.
///
/// Construction through [`ModelParams::new`] enforces the intercritical
/// window; [`ModelParams::unchecked`] is available for probing endpoint
/// and out-of-range cases with [`validate_intercritical`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub dim: u32,
    pub b: f64,
    pub alpha: f64,
    /// Strict mode requires `N ≥ 5`; otherwise `N = 3, 4` are accepted with
    /// the energy-critical bound on `alpha` dropped.
    #[serde(default)]
    pub strict: bool,
}

impl ModelParams {
    pub fn new(dim: u32, b: f64, alpha: f64, strict: bool) -> Result<Self, ParamsError> {
        let params = Self::unchecked(dim, b, alpha, strict);
        let report = validate_intercritical(&params);
        if report.passed() {
            Ok(params)
        } else {
            Err(ParamsError::Invalid(report.failures().map(|c| c.to_string()).collect()))
        }
    }

    pub fn unchecked(dim: u32, b: f64, alpha: f64, strict: bool) -> Self {
        Self { dim, b, alpha, strict }
    }

    /// `s_c = N/2 − (4−b)/α`.
    pub fn critical_index(&self) -> f64 {
        critical_index(self.dim, self.b, self.alpha)
    }

    pub fn n(&self) -> f64 {
        self.dim as f64
    }

    /// Mass-critical power `(8−2b)/N`.
    pub fn mass_critical_alpha(&self) -> f64 {
        (8.0 - 2.0 * self.b) / self.n()
    }

    /// Energy-critical power `(8−2b)/(N−4)`; `None` when `N ≤ 4`.
    pub fn energy_critical_alpha(&self) -> Option<f64> {
        (self.dim >= 5).then(|| (8.0 - 2.0 * self.b) / (self.n() - 4.0))
    }

    /// Coefficient `(Nα+2b)/(4(α+2))` of the potential term in the coercive
    /// part of the virial identity.
    pub fn virial_coefficient(&self) -> f64 {
        (self.n() * self.alpha + 2.0 * self.b) / (4.0 * (self.alpha + 2.0))
    }

    /// Exponent `−min{2,b}/(1+min{2,b})` of the averaged potential decay bound.
    pub fn morawetz_exponent(&self) -> f64 {
        morawetz_exponent(self.b)
    }
}

pub fn critical_index(dim: u32, b: f64, alpha: f64) -> f64 {
    dim as f64 / 2.0 - (4.0 - b) / alpha
}

pub fn morawetz_exponent(b: f64) -> f64 {
    let m = b.min(2.0);
    -m / (1.0 + m)
}

/// A single constraint evaluated by [`validate_intercritical`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    /// Human-readable bound, e.g. `"b < min{N/2,4}"`.
    pub bound: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for ConstraintCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mark = if self.passed { "ok" } else { "violated" };
        write!(f, "{} [{}]: {}", self.bound, mark, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<ConstraintCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Evaluates every invariant of [`ModelParams`]; failures are data.
pub fn validate_intercritical(p: &ModelParams) -> ValidationReport {
    let n = p.n();
    let mut checks = Vec::new();
    let mut push = |bound: &str, passed: bool, detail: String| {
        checks.push(ConstraintCheck { bound: bound.to_string(), passed, detail });
    };

    let min_dim = if p.strict { 5 } else { 3 };
    push(
        if p.strict { "N >= 5" } else { "N >= 3" },
        p.dim >= min_dim,
        format!("N = {}", p.dim),
    );

    let b_max = (n / 2.0).min(4.0);
    push(
        "b > 0",
        p.b.is_finite() && p.b > 0.0,
        format!("b = {}", p.b),
    );
    push(
        "b < min{N/2,4}",
        p.b.is_finite() && p.b < b_max,
        format!("b = {}, min{{N/2,4}} = {}", p.b, b_max),
    );

    let lo = p.mass_critical_alpha();
    push(
        "alpha > (8-2b)/N",
        p.alpha.is_finite() && p.alpha > lo,
        format!("alpha = {}, (8-2b)/N = {}", p.alpha, lo),
    );
    if let Some(hi) = p.energy_critical_alpha() {
        push(
            "alpha < (8-2b)/(N-4)",
            p.alpha.is_finite() && p.alpha < hi,
            format!("alpha = {}, (8-2b)/(N-4) = {}", p.alpha, hi),
        );
    }

    if p.alpha > 0.0 {
        let sc = p.critical_index();
        push(
            "0 < s_c < 2",
            sc > 0.0 && sc < 2.0,
            format!("s_c = {sc}"),
        );
    }
    ValidationReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_index_examples() {
        assert_eq!(critical_index(5, 1.0, 2.0), 1.0);
        assert_eq!(critical_index(6, 1.0, 1.0), 0.0);
        assert_eq!(critical_index(5, 1.0, 6.0), 2.0);
    }

    #[test]
    fn canonical_params_pass() {
        let p = ModelParams::unchecked(5, 1.0, 2.0, true);
        assert!(validate_intercritical(&p).passed());
        assert!(ModelParams::new(5, 1.0, 2.0, true).is_ok());
    }

    #[test]
    fn decay_too_large_is_named() {
        let p = ModelParams::unchecked(5, 3.0, 2.0, true);
        let report = validate_intercritical(&p);
        assert!(!report.passed());
        let names: Vec<_> = report.failures().map(|c| c.bound.as_str()).collect();
        assert!(names.contains(&"b < min{N/2,4}"), "{names:?}");
    }

    #[test]
    fn power_below_mass_critical_is_named() {
        let p = ModelParams::unchecked(6, 1.0, 0.9, true);
        let report = validate_intercritical(&p);
        let names: Vec<_> = report.failures().map(|c| c.bound.as_str()).collect();
        assert!(names.contains(&"alpha > (8-2b)/N"), "{names:?}");
    }

    #[test]
    fn low_dimensions_need_relaxed_mode() {
        let strict = ModelParams::unchecked(3, 0.5, 3.0, true);
        assert!(!validate_intercritical(&strict).passed());
        // no energy-critical cap for N = 3
        let relaxed = ModelParams::unchecked(3, 0.5, 30.0, false);
        let report = validate_intercritical(&relaxed);
        assert!(report.checks.iter().all(|c| c.bound != "alpha < (8-2b)/(N-4)"));
        // s_c = 3/2 − 3.5/30 stays below 2
        assert!(report.passed());
    }

    #[test]
    fn morawetz_exponents() {
        assert_eq!(morawetz_exponent(1.0), -0.5);
        assert_eq!(morawetz_exponent(3.0), -2.0 / 3.0);
        assert_eq!(morawetz_exponent(2.5), -2.0 / 3.0);
    }

    #[test]
    fn virial_coefficient_canonical() {
        let p = ModelParams::unchecked(5, 1.0, 2.0, true);
        assert_eq!(p.virial_coefficient(), 0.75);
    }
}
