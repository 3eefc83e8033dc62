//! Tabulated cutoff and virial weights.

use crate::error::DiagnosticsError;
use crate::radial::RadialGrid;

/// `η(ρ)`: 1 on `[0, 1/2]`, 0 on `[1, ∞)`, quintic smoothstep between.
///
/// On `(1/2, 1)` with `s = 2ρ − 1`, `η = 1 − (6s⁵ − 15s⁴ + 10s³)`; the
/// joins are C².
pub fn cutoff(rho: f64) -> (f64, f64, f64) {
    if rho <= 0.5 {
        return (1.0, 0.0, 0.0);
    }
    if rho >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let s = 2.0 * rho - 1.0;
    let p = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
    let dp = 30.0 * s * s * (1.0 - s) * (1.0 - s);
    let d2p = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
    (1.0 - p, -2.0 * dp, -4.0 * d2p)
}

/// `a(ρ)`: `ρ²` on `[0, 1/2]`, `ρ` on `(1, ∞)`, and on `(1/2, 1]` the cubic
/// Hermite interpolant through `(1/2, 1/4)` and `(1, 1)` with unit slopes.
///
/// On the middle piece `a'(ρ) = 1 + 3t − 3t²` with `t = 2ρ − 1`, so
/// `a' ≥ 1` there and `a` is C¹ and monotone. `a''` jumps at both joins and
/// changes sign inside, so `a` is not convex on `(1/2, 1]`.
pub fn virial_profile(rho: f64) -> (f64, f64, f64) {
    if rho <= 0.5 {
        return (rho * rho, 2.0 * rho, 2.0);
    }
    if rho > 1.0 {
        return (rho, 1.0, 0.0);
    }
    let t = 2.0 * rho - 1.0;
    // a = 1/4 + t/2 + (3/4)t² − (1/2)t³ in terms of t
    let a = 0.25 + 0.5 * t + 0.75 * t * t - 0.5 * t * t * t;
    let da = 1.0 + 3.0 * t - 3.0 * t * t;
    let d2a = 6.0 - 12.0 * t;
    (a, da, d2a)
}

/// `η_R(r) = η(r/R)` with its radial derivative and Laplacian on the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffWeight {
    pub radius: f64,
    pub eta: Vec<f64>,
    pub d_eta: Vec<f64>,
    /// `∂²_r η_R + (N−1)/r ∂_r η_R`.
    pub lap_eta: Vec<f64>,
}

pub fn build_cutoff(radius: f64, grid: &RadialGrid) -> Result<CutoffWeight, DiagnosticsError> {
    if !(radius > 0.0 && radius <= grid.r_max) {
        return Err(DiagnosticsError::Radius { radius, limit: grid.r_max });
    }
    let n1 = grid.dim as f64 - 1.0;
    let mut eta = Vec::with_capacity(grid.len());
    let mut d_eta = Vec::with_capacity(grid.len());
    let mut lap_eta = Vec::with_capacity(grid.len());
    for &r in &grid.nodes {
        let (e, de, d2e) = cutoff(r / radius);
        let dr = de / radius;
        eta.push(e);
        d_eta.push(dr);
        lap_eta.push(d2e / (radius * radius) + n1 / r * dr);
    }
    Ok(CutoffWeight { radius, eta, d_eta, lap_eta })
}

/// `a_R(r) = R² a(r/R)` with `∂_r a_R = R a'(r/R)` and `∂²_r a_R = a''(r/R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VirialWeight {
    pub radius: f64,
    pub a: Vec<f64>,
    pub da: Vec<f64>,
    pub d2a: Vec<f64>,
}

/// Largest `|a'(ρ)|`; `a'` peaks at `7/4` in the middle of `(1/2, 1]`.
pub const VIRIAL_SLOPE_MAX: f64 = 1.75;

pub fn build_virial_weight(radius: f64, grid: &RadialGrid) -> Result<VirialWeight, DiagnosticsError> {
    let limit = grid.r_max / 2.0;
    if !(radius > 0.0 && radius <= limit) {
        return Err(DiagnosticsError::Radius { radius, limit });
    }
    let mut w = VirialWeight {
        radius,
        a: Vec::with_capacity(grid.len()),
        da: Vec::with_capacity(grid.len()),
        d2a: Vec::with_capacity(grid.len()),
    };
    for &r in &grid.nodes {
        let (a, da, d2a) = virial_profile(r / radius);
        w.a.push(radius * radius * a);
        w.da.push(radius * da);
        w.d2a.push(d2a);
    }
    Ok(w)
}
