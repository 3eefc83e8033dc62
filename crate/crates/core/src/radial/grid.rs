use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::GridError;

/// Smallest cell count `build_grid` accepts.
pub const MIN_CELLS: usize = 2;

/// `Γ(n/2)` for a positive integer `n`, via the factorial and
/// half-integer closed forms.
fn gamma_half(n: u32) -> f64 {
    if n % 2 == 0 {
        (1..n / 2).fold(1.0, |acc, k| acc * k as f64)
    } else {
        // Γ(k + 1/2) = (2k−1)!! / 2^k · √π
        let k = (n - 1) / 2;
        (0..k).fold(PI.sqrt(), |acc, j| acc * (j as f64 + 0.5))
    }
}

/// Surface measure `σ_{N−1} = 2π^{N/2}/Γ(N/2)` of the unit sphere in `ℝ^N`.
pub fn sphere_area(dim: u32) -> f64 {
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_half(dim)
}

/// Cell-centered mesh on `[0, R_max]` with `N`-dimensional shell weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub dim: u32,
    pub r_max: f64,
    pub dr: f64,
    /// `r_j = (j + 1/2) Δr`.
    pub nodes: Vec<f64>,
    /// `w_j = σ_{N−1} r_j^{N−1} Δr`.
    pub weights: Vec<f64>,
    pub sigma: f64,
}

impl RadialGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Volume of the ball `|x| ≤ R_max` as integrated by the weights.
    pub fn volume(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weighted inner product `Σ w_j f_j conj(g_j)`.
    pub fn inner(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        self.weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (a, b))| *w * a * b.conj())
            .sum()
    }

    pub fn inner_real(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights.iter().zip(f.iter().zip(g)).map(|(w, (a, b))| w * a * b).sum()
    }

    /// `Σ w_j |f_j|²`.
    pub fn norm_sq(&self, f: &[Complex64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, z)| w * z.norm_sqr()).sum()
    }

    /// Samples a radial profile on the nodes.
    pub fn sample<F: Fn(f64) -> Complex64>(&self, f: F) -> RadialField {
        RadialField { values: self.nodes.iter().map(|&r| f(r)).collect() }
    }

    pub fn sample_real<F: Fn(f64) -> f64>(&self, f: F) -> RadialField {
        self.sample(|r| Complex64::new(f(r), 0.0))
    }
}

/// Builds the cell-centered grid with `M` cells on `[0, R_max]` in `ℝ^N`.
pub fn build_grid(r_max: f64, m: usize, dim: u32) -> Result<RadialGrid, GridError> {
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(GridError::Radius(r_max));
    }
    if m < MIN_CELLS {
        return Err(GridError::TooFewCells { min: MIN_CELLS, got: m });
    }
    if dim == 0 {
        return Err(GridError::Dimension);
    }
    let dr = r_max / m as f64;
    let sigma = sphere_area(dim);
    let nodes: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) * dr).collect();
    let weights = nodes.iter().map(|&r| sigma * r.powi(dim as i32 - 1) * dr).collect();
    Ok(RadialGrid { dim, r_max, dr, nodes, weights, sigma })
}

/// Complex samples `u(r_j)` aligned with a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    pub values: Vec<Complex64>,
}

impl RadialField {
    pub fn new(grid: &RadialGrid, values: Vec<Complex64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::Length { expected: grid.len(), got: values.len() });
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(GridError::NonFinite);
        }
        Ok(Self { values })
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        Self { values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self { values: values.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|z| z * c).collect() }
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}
