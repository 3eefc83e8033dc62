use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use super::laplacian::Laplacian;

/// Quadrature-weighted norms of a single field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldNorms {
    pub l2: f64,
    /// `(−⟨Lu, u⟩)^{1/2}`.
    pub h1_proxy: f64,
    /// `‖Lu‖`.
    pub h2_dot: f64,
    /// `(‖u‖² + ‖Lu‖²)^{1/2}`.
    pub h2: f64,
    /// `(p, ‖u‖_{L^p})` for each requested `p`.
    pub lp: Vec<(f64, f64)>,
    /// `Σ w r^{−b} |u|^{α+2}`.
    pub potential: f64,
}

/// `(Σ w |u|^p)^{1/p}`, or `max |u|` for `p = ∞`.
pub fn lp_norm(grid: &RadialGrid, u: &[Complex64], p: f64) -> f64 {
    assert!(p >= 1.0, "L^p norm needs p >= 1, got {p}");
    if p.is_infinite() {
        return u.iter().fold(0.0, |m, z| m.max(z.norm()));
    }
    let s: f64 = grid.weights.iter().zip(u).map(|(w, z)| w * z.norm().powf(p)).sum();
    s.powf(1.0 / p)
}

/// `∫ |x|^{−b} |u|^{α+2}` on the nodes.
pub fn potential_integral(grid: &RadialGrid, u: &[Complex64], b: f64, alpha: f64) -> f64 {
    grid.weights
        .iter()
        .zip(&grid.nodes)
        .zip(u)
        .map(|((w, r), z)| w * r.powf(-b) * z.norm().powf(alpha + 2.0))
        .sum()
}

pub fn norms(
    grid: &RadialGrid,
    lap: &Laplacian,
    u: &[Complex64],
    b: f64,
    alpha: f64,
    ps: &[f64],
) -> FieldNorms {
    let lu = lap.apply(u);
    let l2_sq = grid.norm_sq(u);
    let h2_sq = grid.norm_sq(&lu);
    let h1_sq = -grid.inner(&lu, u).re;
    FieldNorms {
        l2: l2_sq.sqrt(),
        h1_proxy: h1_sq.max(0.0).sqrt(),
        h2_dot: h2_sq.sqrt(),
        h2: (l2_sq + h2_sq).sqrt(),
        lp: ps.iter().map(|&p| (p, lp_norm(grid, u, p))).collect(),
        potential: potential_integral(grid, u, b, alpha),
    }
}
