//! Spectra of the multiplication generator, counting functions, growth
//! estimators, partition functions and growth classification.

mod classify;
mod partition;
mod profile;
mod spectrum;
mod tail;

pub use classify::{
    classify, Classification, GrowthClass, DIMENSION_SPREAD, EXPONENTIAL_THRESHOLD,
    STABILITY_TOLERANCE,
};
pub use partition::{
    partition_from_profile, partition_function, sandwich_bounds, PartitionEstimate, Verdict,
    DEFAULT_TAIL_DEPTH,
};
pub use profile::{growth_profile, omega_estimate, GrowthProfile, OmegaEstimate, ESTIMATOR_WINDOW};
pub use spectrum::{group_values, spectrum_from_kernel, SpectralEntry, SpectrumTruncation, GROUPING_TOLERANCE};
pub(crate) use spectrum::certifying_radius;
pub use tail::{TailBound, TailModel};
