//! Stability-based sub-linear time algorithms for the minimum enclosing
//! ball problem and its outlier-robust variant, together with the
//! brute-force oracles, instance generators, and reporting machinery used
//! to verify their guarantees at desk scale.
//!
//! An instance is stable when its enclosing radius cannot drop much after
//! removing a small fraction of points; under that assumption the sampling
//! algorithms here touch a number of points independent of the input size
//! while still covering every required point (approximation on the radius
//! only).

pub mod coreset;
pub mod error;
pub mod geometry;
pub mod io;
pub mod outlier;
pub mod reference;
pub mod report;
pub mod rng;
pub mod stability;
pub mod sublinear;

pub use coreset::{approx_center, coreset_meb, exact_meb_small, CoresetState};
pub use error::{ConfigError, DataError};
pub use geometry::{
    coverage_count, dist, dist2, farthest_full, farthest_in, kth_farthest, Ball, PointSet,
    DEFAULT_SLACK,
};
pub use outlier::{meb_outliers_sublinear, outlier_radius_witness, OutlierConfig};
pub use reference::{reference_meb, REFERENCE_EPSILON};
pub use report::TrialReport;
pub use rng::{sample_indices, RngStream};
pub use stability::{
    brute_meb_outliers, check_outlier_stability_claim, generate, stability_coefficient, Family,
    InstanceSpec, StabilityReport,
};
pub use sublinear::{
    alg1_meb, alg2_meb, coreset_trial, estimate_radius_range, oracle_test_h, quick_meb,
    search_grid, AlgoConfig, OracleOutcome, RadiusRange,
};
