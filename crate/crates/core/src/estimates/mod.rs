//! Numerical checks of the functional inequalities, wall reductions,
//! energy and maximum-principle bounds, and the uniqueness argument.

pub mod boundary;
pub mod bounds;
pub mod families;
pub mod inequalities;
pub mod suite;
pub mod uniqueness;
mod verdict;

pub use boundary::{boundary_derivative, BoundaryCheck};
pub use bounds::{
    apriori_bound, cumulative_trapezoid, energy_rate_check, envelope_lower, envelope_upper,
    envelope_upper_high, existence_time, f_of_t, fit_energy_constant, fit_envelope_constant, max_principle_envelopes,
    running_sup, time_derivative, EnergyFit, Envelopes, ExistenceTimes, ForcingConstants,
};
pub use inequalities::{
    embedding_check, equivalence_check, hardy_check, hardy_check_profile, outer_derivative_l2,
    velocity_bounds_check, EquivalenceReport, HardyVariant, VelocityBounds,
};
pub use uniqueness::{gronwall_check, perturbation_gbar, GronwallFit};
pub use verdict::{CheckVerdict, MeasuredRatio};
