//! Radial simulator and diagnostics for the focusing inhomogeneous
//! biharmonic nonlinear Schrödinger equation
//!
//! ```text
//! i u_t + Δ²u − |x|^{−b} |u|^α u = 0,   x ∈ ℝ^N,
//! ```
//!
//! restricted to radial data on a ball with a Dirichlet wall.
//!
//! The crate is organised bottom-up: [`params`] and [`exponents`] hold the
//! parameter and exponent algebra, [`radial`] the mesh, operator and
//! eigenbasis, then [`ground_state`], [`propagator`] and [`diagnostics`].

pub mod diagnostics;
pub mod error;
pub mod exponents;
pub mod ground_state;
mod model;
pub mod params;
pub mod propagator;
pub mod radial;

pub use error::*;
pub use model::Model;
pub use params::{validate_intercritical, ModelParams, ValidationReport};
pub use radial::{build_grid, build_laplacian, eigendecompose, Laplacian, RadialField, RadialGrid, SpectralBasis};

pub use num_complex::Complex64;
