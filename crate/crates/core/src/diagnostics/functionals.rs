//! Pointwise-in-time functionals of a single snapshot.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::weights::{CutoffWeight, VirialWeight};
use crate::error::DiagnosticsError;
use crate::ground_state::{threshold_quantities, GroundState};
use crate::params::ModelParams;
use crate::radial::{potential_integral, Laplacian, RadialGrid};

/// `M[u] = Σ w |u|²`.
pub fn mass(grid: &RadialGrid, u: &[Complex64]) -> f64 {
    grid.norm_sq(u)
}

/// `E[u] = ½‖Lu‖² − (α+2)^{−1} ∫ |x|^{−b}|u|^{α+2}`.
pub fn energy(grid: &RadialGrid, lap: &Laplacian, u: &[Complex64], params: &ModelParams) -> f64 {
    let lu = lap.apply(u);
    0.5 * grid.norm_sq(&lu) - potential_integral(grid, u, params.b, params.alpha) / (params.alpha + 2.0)
}

/// `‖Δu‖^{s_c} ‖u‖^{2−s_c}`.
pub fn gradient_product(grid: &RadialGrid, lap: &Laplacian, u: &[Complex64], sc: f64) -> f64 {
    let grad = grid.norm_sq(&lap.apply(u)).sqrt();
    let l2 = grid.norm_sq(u).sqrt();
    grad.powf(sc) * l2.powf(2.0 - sc)
}

/// `Σ_{r_j ≤ R} w_j |u_j|²`.
pub fn mass_in_ball(grid: &RadialGrid, u: &[Complex64], radius: f64) -> f64 {
    grid.nodes
        .iter()
        .zip(&grid.weights)
        .zip(u)
        .take_while(|((r, _), _)| **r <= radius)
        .map(|((_, w), z)| w * z.norm_sqr())
        .sum()
}

/// Share of the mass in `r ≥ fraction · R_max`.
pub fn boundary_fraction(grid: &RadialGrid, u: &[Complex64], fraction: f64) -> f64 {
    let total = grid.norm_sq(u);
    if total == 0.0 {
        return 0.0;
    }
    let cut = fraction * grid.r_max;
    let outer: f64 = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .zip(u)
        .filter(|((r, _), _)| **r >= cut)
        .map(|((_, w), z)| w * z.norm_sqr())
        .sum();
    outer / total
}

/// Outcome of the strict threshold comparisons of the dichotomy theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCheck {
    /// `E[u]^{s_c} M[u]^{2−s_c} < E[Q]^{s_c} M[Q]^{2−s_c}`.
    pub cond_1_4: bool,
    /// `‖Δu‖^{s_c}‖u‖^{2−s_c} < ‖ΔQ‖^{s_c}‖Q‖^{2−s_c}` for the given data.
    pub cond_1_5: bool,
    /// The same gradient comparison read as the conclusion at the
    /// snapshot's time.
    pub cond_1_6: bool,
    pub energy_mass: f64,
    pub gradient_mass: f64,
    pub energy_mass_threshold: f64,
    pub gradient_mass_threshold: f64,
}

pub fn check_below_threshold(
    grid: &RadialGrid,
    lap: &Laplacian,
    u: &[Complex64],
    gs: &GroundState,
    params: &ModelParams,
) -> Result<ThresholdCheck, DiagnosticsError> {
    let th = threshold_quantities(gs, params).map_err(|_| DiagnosticsError::NotConverged)?;
    for len in [u.len(), gs.profile.len()] {
        if len != grid.len() {
            return Err(DiagnosticsError::GridMismatch { expected: grid.len(), got: len });
        }
    }
    let sc = th.sc;
    let e = energy(grid, lap, u, params);
    let m = mass(grid, u);
    if e < 0.0 && sc.fract() != 0.0 {
        return Err(DiagnosticsError::SignObstruction { energy: e, sc });
    }
    let energy_mass = e.powf(sc) * m.powf(2.0 - sc);
    let gradient_mass = gradient_product(grid, lap, u, sc);
    // Q goes through the same functionals so that u = Q compares equal
    let q = gs.field();
    let energy_mass_threshold = energy(grid, lap, &q, params).powf(sc) * mass(grid, &q).powf(2.0 - sc);
    let gradient_mass_threshold = gradient_product(grid, lap, &q, sc);
    let below_gradient = gradient_mass < gradient_mass_threshold;
    Ok(ThresholdCheck {
        cond_1_4: energy_mass < energy_mass_threshold,
        cond_1_5: below_gradient,
        cond_1_6: below_gradient,
        energy_mass,
        gradient_mass,
        energy_mass_threshold,
        gradient_mass_threshold,
    })
}

/// Sums of `|Lu|²` and `r^{−b}|u|^{α+2}` over `r ≤ R/2`.
fn ball_terms(grid: &RadialGrid, lap: &Laplacian, u: &[Complex64], radius: f64, params: &ModelParams) -> (f64, f64) {
    let lu = lap.apply(u);
    let mut grad = 0.0;
    let mut pot = 0.0;
    for j in 0..grid.len() {
        let r = grid.nodes[j];
        if r > radius / 2.0 {
            break;
        }
        let w = grid.weights[j];
        grad += w * lu[j].norm_sqr();
        pot += w * r.powf(-params.b) * u[j].norm().powf(params.alpha + 2.0);
    }
    (grad, pot)
}

/// `−4 Σ_{r ≤ R/2} w [|Lu|² − (Nα+2b)/(4(α+2)) r^{−b}|u|^{α+2}]`.
pub fn virial_main_term(
    grid: &RadialGrid,
    lap: &Laplacian,
    u: &[Complex64],
    radius: f64,
    params: &ModelParams,
) -> Result<f64, DiagnosticsError> {
    let limit = grid.r_max / 2.0;
    if !(radius > 0.0 && radius <= limit) {
        return Err(DiagnosticsError::Radius { radius, limit });
    }
    let (grad, pot) = ball_terms(grid, lap, u, radius, params);
    Ok(-4.0 * (grad - params.virial_coefficient() * pot))
}

/// Empirical coercivity gap on the ball `r ≤ R/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoercivityGap {
    /// `bracket / potential`; zero when vacuous.
    pub gap: f64,
    pub bracket: f64,
    pub potential: f64,
    /// Set when the potential sum is below `1e−14`.
    pub vacuous: bool,
}

pub fn coercivity_gap(
    grid: &RadialGrid,
    lap: &Laplacian,
    u: &[Complex64],
    radius: f64,
    params: &ModelParams,
) -> CoercivityGap {
    let (grad, pot) = ball_terms(grid, lap, u, radius, params);
    let bracket = grad - params.virial_coefficient() * pot;
    if pot < 1e-14 {
        return CoercivityGap { gap: 0.0, bracket, potential: pot, vacuous: true };
    }
    CoercivityGap { gap: bracket / pot, bracket, potential: pot, vacuous: false }
}

/// `∫ η_R |u|²`.
pub fn localized_mass(grid: &RadialGrid, u: &[Complex64], cutoff: &CutoffWeight) -> f64 {
    grid.weights
        .iter()
        .zip(&cutoff.eta)
        .zip(u)
        .map(|((w, e), z)| w * e * z.norm_sqr())
        .sum()
}

/// `d/dt ∫ η_R |u|²` along `u_t = iΔ²u − i|x|^{−b}|u|^α u`.
///
/// Evaluated as `−2 Im Σ w ([L, η]ū)(Lu)` with the commutator
/// `[L, η]ū = L(ηū) − ηLū`, which is the exact time derivative for the
/// semi-discrete flow. Its continuum limit is
/// `−2 Im ∫ (Δη ū + 2∇η·∇ū) Δu`.
pub fn localized_mass_derivative(
    grid: &RadialGrid,
    lap: &Laplacian,
    u: &[Complex64],
    cutoff: &CutoffWeight,
) -> f64 {
    let lu = lap.apply(u);
    let ubar: Vec<Complex64> = u.iter().map(|z| z.conj()).collect();
    let eta_ubar: Vec<Complex64> = ubar.iter().zip(&cutoff.eta).map(|(z, e)| z * e).collect();
    let l_eta_ubar = lap.apply(&eta_ubar);
    let l_ubar: Vec<Complex64> = lu.iter().map(|z| z.conj()).collect();
    let mut acc = 0.0;
    for j in 0..u.len() {
        let comm = l_eta_ubar[j] - cutoff.eta[j] * l_ubar[j];
        acc += grid.weights[j] * (comm * lu[j]).im;
    }
    -2.0 * acc
}

/// Continuum form `−2 Im Σ w [(Δη_R) ū + 2 (∂_rη_R)(∂_r ū)] (Lu)` with the
/// analytic cutoff derivatives and centered differences for `∂_r u`.
pub fn localized_mass_derivative_pointwise(
    grid: &RadialGrid,
    lap: &Laplacian,
    u: &[Complex64],
    cutoff: &CutoffWeight,
) -> f64 {
    let lu = lap.apply(u);
    let du = radial_derivative(grid, u);
    let mut acc = 0.0;
    for j in 0..u.len() {
        let term = cutoff.lap_eta[j] * u[j].conj() + 2.0 * cutoff.d_eta[j] * du[j].conj();
        acc += grid.weights[j] * (term * lu[j]).im;
    }
    -2.0 * acc
}

/// Centered differences with the even reflection `u_{−1} = u_0` at the
/// origin and the Dirichlet ghost `u_M = −u_{M−1}` at the wall.
pub fn radial_derivative(grid: &RadialGrid, u: &[Complex64]) -> Vec<Complex64> {
    let m = u.len();
    let h = 2.0 * grid.dr;
    (0..m)
        .map(|j| {
            let left = if j == 0 { u[0] } else { u[j - 1] };
            let right = if j + 1 == m { -u[m - 1] } else { u[j + 1] };
            (right - left) / h
        })
        .collect()
}

/// `Z = Im Σ w (∂_r a_R)(∂_r u) ū`.
pub fn virial_quantity(grid: &RadialGrid, u: &[Complex64], weight: &VirialWeight) -> f64 {
    let du = radial_derivative(grid, u);
    (0..u.len())
        .map(|j| grid.weights[j] * weight.da[j] * (du[j] * u[j].conj()).im)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::weights::{build_cutoff, build_virial_weight};
    use crate::radial::{build_grid, build_laplacian};

    fn canonical() -> ModelParams {
        ModelParams::new(5, 1.0, 2.0, true).unwrap()
    }

    #[test]
    fn zero_field() {
        let g = build_grid(20.0, 64, 5).unwrap();
        let lap = build_laplacian(&g);
        let u = vec![Complex64::new(0.0, 0.0); 64];
        let p = canonical();
        assert_eq!(mass(&g, &u), 0.0);
        assert_eq!(energy(&g, &lap, &u, &p), 0.0);
        assert_eq!(virial_main_term(&g, &lap, &u, 10.0, &p).unwrap(), 0.0);
        assert!(coercivity_gap(&g, &lap, &u, 10.0, &p).vacuous);
    }

    #[test]
    fn ball_mass_limits() {
        let g = build_grid(10.0, 100, 5).unwrap();
        let u = g.sample_real(|r| (-r * r / 2.0).exp()).values;
        assert_eq!(mass_in_ball(&g, &u, 0.0), 0.0);
        assert_eq!(mass_in_ball(&g, &u, 10.0), mass(&g, &u));
    }

    #[test]
    fn real_fields_have_no_flux() {
        let g = build_grid(30.0, 300, 5).unwrap();
        let lap = build_laplacian(&g);
        let u = g.sample_real(|r| (-r * r / 20.0).exp() * (1.0 + r)).values;
        let c = build_cutoff(10.0, &g).unwrap();
        let v = build_virial_weight(10.0, &g).unwrap();
        assert_eq!(localized_mass_derivative(&g, &lap, &u, &c), 0.0);
        assert_eq!(localized_mass_derivative_pointwise(&g, &lap, &u, &c), 0.0);
        assert_eq!(virial_quantity(&g, &u, &v), 0.0);
    }

    #[test]
    fn energy_quadratic_without_potential() {
        let g = build_grid(10.0, 100, 5).unwrap();
        let lap = build_laplacian(&g);
        let u = g.sample_real(|r| (-r * r / 2.0).exp()).values;
        let p = ModelParams::unchecked(5, 0.0, 2.0, false);
        let lin = 0.5 * g.norm_sq(&lap.apply(&u));
        let pot = potential_integral(&g, &u, 0.0, 2.0) / 4.0;
        assert!((energy(&g, &lap, &u, &p) - (lin - pot)).abs() < 1e-12 * lin);
        let cu: Vec<_> = u.iter().map(|z| z * 3.0).collect();
        let lin3 = 0.5 * g.norm_sq(&lap.apply(&cu));
        assert!((lin3 - 9.0 * lin).abs() < 1e-12 * lin3);
    }
}
