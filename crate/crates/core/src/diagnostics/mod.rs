//! Conserved quantities, threshold tests, localized mass, virial and
//! Morawetz functionals, and scattering monitors.

mod functionals;
mod trajectory;
mod weights;

pub use functionals::{
    boundary_fraction, check_below_threshold, coercivity_gap, energy, gradient_product, localized_mass,
    localized_mass_derivative, localized_mass_derivative_pointwise, mass, mass_in_ball, radial_derivative,
    virial_main_term, virial_quantity, CoercivityGap, ThresholdCheck,
};
pub use trajectory::{
    least_squares_slope, morawetz_average, scattering_indicator, strichartz_proxy, write_csv, DiagnosticsRecord,
    MorawetzFit, RecordSpec, ScatteringVerdict, StrichartzProxy, BOUNDARY_SHELL,
};
pub use weights::{
    build_cutoff, build_virial_weight, cutoff, virial_profile, CutoffWeight, VirialWeight, VIRIAL_SLOPE_MAX,
};
