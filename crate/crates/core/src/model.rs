use crate::error::SetupError;
use crate::params::ModelParams;
use crate::radial::{build_grid, build_laplacian, eigendecompose, Laplacian, RadialGrid, SpectralBasis};

/// Parameters together with the grid, operator and eigenbasis built for them.
///
/// Everything here is immutable after construction and can be shared
/// read-only between runs.
#[derive(Debug, Clone)]
pub struct Model {
    pub params: ModelParams,
    pub grid: RadialGrid,
    pub lap: Laplacian,
    pub basis: SpectralBasis,
}

impl Model {
    /// Builds the discretization; `params` are taken as given, so callers
    /// that need the intercritical checks construct them via
    /// [`ModelParams::new`].
    pub fn new(params: ModelParams, r_max: f64, cells: usize) -> Result<Self, SetupError> {
        let grid = build_grid(r_max, cells, params.dim)?;
        let lap = build_laplacian(&grid);
        let basis = eigendecompose(&lap)?;
        Ok(Self { params, grid, lap, basis })
    }

    /// Default step `0.5 / max|λ|²`, which resolves the fastest linear phase.
    pub fn default_dt(&self) -> f64 {
        0.5 / self.basis.lambda_max().powi(2)
    }
}
