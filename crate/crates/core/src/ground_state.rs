//! Petviashvili iteration for the radial ground state.
//!
//! Solves `Δ²Q + Q = |x|^{−b}|Q|^α Q` with `Δ²` realized as `L²`. The
//! resolvent `(L² + 1)^{−1}` is diagonal in the eigenbasis. The sign of the
//! linear term can be flipped through [`StationarySign::Minus`] for
//! experiments with `Δ²Q − Q = …`; that resolvent is not bounded below and
//! the iteration is not expected to converge there.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::GroundStateError;
use crate::params::ModelParams;
use crate::radial::{potential_integral, Laplacian, RadialGrid, SpectralBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StationarySign {
    /// `(Δ² + 1)Q = |x|^{−b}|Q|^α Q`.
    #[default]
    Plus,
    /// `(Δ² − 1)Q = |x|^{−b}|Q|^α Q`.
    Minus,
}

impl StationarySign {
    fn value(self) -> f64 {
        match self {
            StationarySign::Plus => 1.0,
            StationarySign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroundStateControls {
    pub max_iter: usize,
    /// Gate on the relative change between successive iterates.
    pub tol: f64,
    /// Gate on the relative residual of the stationary equation.
    pub residual_tol: f64,
    /// Weight kept on the previous iterate, in `[0, 1)`.
    pub damping: f64,
    /// Seed `exp(−(r/w)²)`.
    pub seed_width: f64,
    pub sign: StationarySign,
}

impl Default for GroundStateControls {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-10,
            residual_tol: 1e-6,
            damping: 0.0,
            seed_width: 1.0,
            sign: StationarySign::Plus,
        }
    }
}

/// Converged profile and its conserved quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub params: ModelParams,
    pub controls: GroundStateControls,
    pub dim: u32,
    pub cells: usize,
    pub r_max: f64,
    /// `Q(r_j)`; real.
    #[serde(skip)]
    pub profile: Vec<f64>,
    pub mass: f64,
    pub energy: f64,
    /// `‖ΔQ‖_{L²}`.
    pub grad_norm: f64,
    /// `∫ |x|^{−b} Q^{α+2}`.
    pub potential: f64,
    /// `‖Δ²Q ± Q − |x|^{−b}|Q|^α Q‖ / ‖Q‖` with `Δ²` applied as two
    /// tridiagonal products.
    pub residual: f64,
    /// `|‖ΔQ‖² ± ‖Q‖² − ∫|x|^{−b}Q^{α+2}| / ∫|x|^{−b}Q^{α+2}`.
    pub identity_defect: f64,
    pub iterations: usize,
    pub multipliers: Vec<f64>,
    pub converged: bool,
}

impl GroundState {
    pub fn field(&self) -> Vec<Complex64> {
        self.profile.iter().map(|&q| Complex64::new(q, 0.0)).collect()
    }

    pub fn final_multiplier(&self) -> f64 {
        self.multipliers.last().copied().unwrap_or(f64::NAN)
    }
}

fn nonlinearity(grid: &RadialGrid, q: &[f64], b: f64, alpha: f64) -> Vec<f64> {
    grid.nodes
        .iter()
        .zip(q)
        .map(|(r, v)| r.powf(-b) * v.abs().powf(alpha) * v)
        .collect()
}

fn weighted_norm(grid: &RadialGrid, f: &[f64]) -> f64 {
    grid.inner_real(f, f).sqrt()
}

/// Residual of the stationary equation using only the tridiagonal operator.
pub fn stationary_residual(
    grid: &RadialGrid,
    lap: &Laplacian,
    q: &[f64],
    params: &ModelParams,
    sign: StationarySign,
) -> f64 {
    let lq = lap.apply_real(q);
    let llq = lap.apply_real(&lq);
    let f = nonlinearity(grid, q, params.b, params.alpha);
    let s = sign.value();
    let res: Vec<f64> = (0..q.len()).map(|j| llq[j] + s * q[j] - f[j]).collect();
    weighted_norm(grid, &res) / weighted_norm(grid, q)
}

pub fn solve_ground_state(
    params: &ModelParams,
    grid: &RadialGrid,
    lap: &Laplacian,
    basis: &SpectralBasis,
    controls: &GroundStateControls,
) -> Result<GroundState, GroundStateError> {
    let b = params.b;
    let alpha = params.alpha;
    let s = controls.sign.value();
    let symbol: Vec<f64> = basis.eigenvalues.iter().map(|l| l * l + s).collect();
    let smallest = symbol.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    if smallest < 1e-12 {
        let k = symbol.iter().position(|x| x.abs() == smallest).unwrap_or(0);
        return Err(GroundStateError::SingularResolvent(basis.eigenvalues[k]));
    }
    let inverse: Vec<f64> = symbol.iter().map(|x| 1.0 / x).collect();
    let gamma = (alpha + 1.0) / alpha;

    let w = controls.seed_width;
    let mut q: Vec<f64> = grid.nodes.iter().map(|r| (-(r / w) * (r / w)).exp()).collect();
    let seed_norm = weighted_norm(grid, &q);
    let mut multipliers = Vec::new();
    let mut change = f64::INFINITY;
    let mut residual = f64::INFINITY;

    for it in 1..=controls.max_iter {
        let f = nonlinearity(grid, &q, b, alpha);
        let qc: Vec<Complex64> = q.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let coeffs = basis.coefficients(&qc);
        let num: f64 = coeffs.iter().zip(&symbol).map(|(c, x)| x * c.re * c.re).sum();
        let den = grid.inner_real(&f, &q);
        let m = num / den;
        multipliers.push(m);
        if !(m.is_finite() && m > 0.0) {
            return Err(GroundStateError::Collapsed { iterations: it, multipliers });
        }

        let fc: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let scale = m.powf(gamma);
        let mut next: Vec<f64> = basis
            .apply_real_symbol(&fc, &inverse)
            .into_iter()
            .map(|z| scale * z.re)
            .collect();
        if controls.damping > 0.0 {
            for (n, o) in next.iter_mut().zip(&q) {
                *n = (1.0 - controls.damping) * *n + controls.damping * o;
            }
        }
        let norm = weighted_norm(grid, &next);
        if !norm.is_finite() || norm < 1e-12 * seed_norm {
            return Err(GroundStateError::Collapsed { iterations: it, multipliers });
        }
        let diff: Vec<f64> = next.iter().zip(&q).map(|(a, c)| a - c).collect();
        change = weighted_norm(grid, &diff) / norm;
        q = next;

        if change < controls.tol {
            residual = stationary_residual(grid, lap, &q, params, controls.sign);
            if residual < controls.residual_tol {
                return Ok(finish(params, grid, lap, controls, q, it, multipliers, residual));
            }
        }
    }
    if residual.is_infinite() {
        residual = stationary_residual(grid, lap, &q, params, controls.sign);
    }
    Err(GroundStateError::NotConverged {
        iterations: controls.max_iter,
        change,
        residual,
        multipliers,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    params: &ModelParams,
    grid: &RadialGrid,
    lap: &Laplacian,
    controls: &GroundStateControls,
    profile: Vec<f64>,
    iterations: usize,
    multipliers: Vec<f64>,
    residual: f64,
) -> GroundState {
    let lq = lap.apply_real(&profile);
    let grad_sq = grid.inner_real(&lq, &lq);
    let mass = grid.inner_real(&profile, &profile);
    let qc: Vec<Complex64> = profile.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let potential = potential_integral(grid, &qc, params.b, params.alpha);
    let energy = 0.5 * grad_sq - potential / (params.alpha + 2.0);
    let identity_defect = (grad_sq + controls.sign.value() * mass - potential).abs() / potential;
    GroundState {
        params: *params,
        controls: *controls,
        dim: grid.dim,
        cells: grid.len(),
        r_max: grid.r_max,
        profile,
        mass,
        energy,
        grad_norm: grad_sq.sqrt(),
        potential,
        residual,
        identity_defect,
        iterations,
        multipliers,
        converged: true,
    }
}

/// `E[Q]^{s_c} M[Q]^{2−s_c}` and `‖ΔQ‖^{s_c} ‖Q‖^{2−s_c}`, with the grid and
/// solver settings they were computed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdQuantities {
    pub sc: f64,
    pub energy_mass: f64,
    pub gradient_mass: f64,
    pub dim: u32,
    pub cells: usize,
    pub r_max: f64,
    pub controls: GroundStateControls,
    /// Always `"(Δ²+1)Q = |x|^-b |Q|^α Q"` or its minus variant.
    pub convention: String,
}

pub fn threshold_quantities(gs: &GroundState, params: &ModelParams) -> Result<ThresholdQuantities, GroundStateError> {
    if !gs.converged {
        return Err(GroundStateError::Unconverged);
    }
    let sc = params.critical_index();
    let convention = match gs.controls.sign {
        StationarySign::Plus => "(Δ²+1)Q = |x|^-b |Q|^α Q",
        StationarySign::Minus => "(Δ²-1)Q = |x|^-b |Q|^α Q",
    };
    Ok(ThresholdQuantities {
        sc,
        energy_mass: gs.energy.powf(sc) * gs.mass.powf(2.0 - sc),
        gradient_mass: gs.grad_norm.powf(sc) * gs.mass.sqrt().powf(2.0 - sc),
        dim: gs.dim,
        cells: gs.cells,
        r_max: gs.r_max,
        controls: gs.controls,
        convention: convention.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{build_grid, build_laplacian, eigendecompose};

    fn setup(r_max: f64, m: usize) -> (ModelParams, RadialGrid, Laplacian, SpectralBasis) {
        let p = ModelParams::new(5, 1.0, 2.0, true).unwrap();
        let g = build_grid(r_max, m, 5).unwrap();
        let lap = build_laplacian(&g);
        let basis = eigendecompose(&lap).unwrap();
        (p, g, lap, basis)
    }

    #[test]
    fn converges_on_coarse_grid() {
        let (p, g, lap, basis) = setup(20.0, 256);
        let gs = solve_ground_state(&p, &g, &lap, &basis, &GroundStateControls::default()).unwrap();
        assert!(gs.residual < 1e-6);
        assert!(gs.identity_defect < 1e-6);
        assert!((gs.final_multiplier() - 1.0).abs() < 1e-8);
        assert!(gs.energy > 0.0);
        let th = threshold_quantities(&gs, &p).unwrap();
        assert!(th.energy_mass > 0.0 && th.gradient_mass > 0.0);
    }

    #[test]
    fn unconverged_state_refused() {
        let (p, g, lap, basis) = setup(20.0, 128);
        let controls = GroundStateControls { max_iter: 3, ..Default::default() };
        let err = solve_ground_state(&p, &g, &lap, &basis, &controls).unwrap_err();
        match err {
            GroundStateError::NotConverged { multipliers, .. } => assert_eq!(multipliers.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
        let mut gs = solve_ground_state(&p, &g, &lap, &basis, &GroundStateControls::default()).unwrap();
        gs.converged = false;
        assert_eq!(threshold_quantities(&gs, &p), Err(GroundStateError::Unconverged));
    }
}
