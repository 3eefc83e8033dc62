//! Cell-centered radial discretization of `ℝ^N`.

mod container;
mod grid;
mod laplacian;
mod norms;
mod spectral;

pub use container::{read_field, write_field, FieldHeader, Precision};
pub use grid::{build_grid, sphere_area, RadialField, RadialGrid};
pub use laplacian::{build_laplacian, Laplacian};
pub use norms::{lp_norm, norms, potential_integral, FieldNorms};
pub use spectral::{eigendecompose, SpectralBasis};
