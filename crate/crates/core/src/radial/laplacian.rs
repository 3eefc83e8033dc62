use std::ops::{Add, Div, Mul};

use num_complex::Complex64;

use super::grid::RadialGrid;

/// Flux-form discretization of `r^{1−N} ∂_r (r^{N−1} ∂_r)`.
///
/// Stored as `L = W^{−1} A` with `A` symmetric tridiagonal and `W` the
/// quadrature weights, so `L` is self-adjoint for `⟨f,g⟩ = Σ w f ḡ`.
/// The origin face carries no flux; the outer face sees a ghost value
/// `−u_{M−1}` (homogeneous Dirichlet at `R_max`).
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    /// Diagonal of `A`.
    pub diag: Vec<f64>,
    /// Super-diagonal `A_{j,j+1}`; length `M − 1`.
    pub upper: Vec<f64>,
    /// Sub-diagonal `A_{j+1,j}`; equal to `upper` as built.
    pub lower: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn build_laplacian(grid: &RadialGrid) -> Laplacian {
    let m = grid.len();
    let dr = grid.dr;
    let n1 = grid.dim as i32 - 1;
    let coupling: Vec<f64> = (1..m)
        .map(|j| grid.sigma * (j as f64 * dr).powi(n1) / dr)
        .collect();
    let mut diag = vec![0.0; m];
    for (j, c) in coupling.iter().enumerate() {
        diag[j] -= c;
        diag[j + 1] -= c;
    }
    // Dirichlet closure: flux σR^{N−1}(u_ghost − u)/Δr with u_ghost = −u,
    // i.e. a half-cell distance to the wall
    diag[m - 1] -= grid.sigma * grid.r_max.powi(n1) / (0.5 * dr);
    Laplacian { diag, lower: coupling.clone(), upper: coupling, weights: grid.weights.clone() }
}

impl Laplacian {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn apply_generic<T>(&self, u: &[T]) -> Vec<T>
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T> + Div<f64, Output = T>,
    {
        let m = self.len();
        assert_eq!(u.len(), m, "field length does not match operator");
        let mut out = Vec::with_capacity(m);
        for j in 0..m {
            let mut acc = u[j] * self.diag[j];
            if j > 0 {
                acc = acc + u[j - 1] * self.lower[j - 1];
            }
            if j + 1 < m {
                acc = acc + u[j + 1] * self.upper[j];
            }
            out.push(acc / self.weights[j]);
        }
        out
    }

    /// `L u`.
    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.apply_generic(u)
    }

    pub fn apply_real(&self, u: &[f64]) -> Vec<f64> {
        self.apply_generic(u)
    }

    /// Diagonal and off-diagonal of `W^{1/2} L W^{−1/2}`, a symmetric
    /// tridiagonal matrix with the spectrum of `L`.
    pub fn symmetrized(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.diag.iter().zip(&self.weights).map(|(a, w)| a / w).collect();
        let e = self
            .upper
            .iter()
            .zip(&self.lower)
            .enumerate()
            .map(|(j, (u, l))| (u * l).sqrt() / (self.weights[j] * self.weights[j + 1]).sqrt())
            .collect();
        (d, e)
    }

    /// Relative weighted asymmetry `|⟨Lf,g⟩ − ⟨f,Lg⟩| / (‖Lf‖‖g‖ + ‖f‖‖Lg‖)`
    /// on a fixed pair of deterministic test vectors.
    pub fn asymmetry(&self) -> f64 {
        let m = self.len();
        let f: Vec<f64> = (0..m).map(|j| ((j * 7 + 3) % 11) as f64 - 5.0).collect();
        let g: Vec<f64> = (0..m).map(|j| ((j * 5 + 1) % 13) as f64 - 6.0).collect();
        let lf = self.apply_real(&f);
        let lg = self.apply_real(&g);
        let ip = |a: &[f64], b: &[f64]| -> f64 {
            self.weights.iter().zip(a.iter().zip(b)).map(|(w, (x, y))| w * x * y).sum()
        };
        let norm = |a: &[f64]| ip(a, a).sqrt();
        let scale = norm(&lf) * norm(&g) + norm(&f) * norm(&lg);
        if scale == 0.0 {
            return 0.0;
        }
        (ip(&lf, &g) - ip(&f, &lg)).abs() / scale
    }

    /// Gershgorin bound on `max |λ|`.
    pub fn spectral_radius_bound(&self) -> f64 {
        let (d, e) = self.symmetrized();
        (0..d.len())
            .map(|j| {
                let left = if j > 0 { e[j - 1].abs() } else { 0.0 };
                let right = if j + 1 < d.len() { e[j].abs() } else { 0.0 };
                d[j].abs() + left + right
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::build_grid;

    #[test]
    fn rows_of_constants_sum_to_zero_away_from_wall() {
        let g = build_grid(2.0, 32, 5).unwrap();
        let lap = build_laplacian(&g);
        let lu = lap.apply_real(&vec![1.0; 32]);
        for v in &lu[..31] {
            assert!(v.abs() < 1e-10, "{v}");
        }
        assert!(lu[31] < 0.0);
    }

    #[test]
    fn symmetric_in_weighted_product() {
        let g = build_grid(10.0, 200, 5).unwrap();
        assert!(build_laplacian(&g).asymmetry() < 1e-14);
    }

    #[test]
    fn dimension_one_matches_standard_stencil() {
        let g = build_grid(1.0, 10, 1).unwrap();
        let lap = build_laplacian(&g);
        let (d, e) = lap.symmetrized();
        let h2 = g.dr * g.dr;
        assert!((d[5] + 2.0 / h2).abs() < 1e-9);
        assert!((e[5] - 1.0 / h2).abs() < 1e-9);
        // reflecting origin, half-cell Dirichlet wall
        assert!((d[0] + 1.0 / h2).abs() < 1e-9);
        assert!((d[9] + 3.0 / h2).abs() < 1e-9);
    }
}
