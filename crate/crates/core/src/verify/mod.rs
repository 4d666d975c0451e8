//! Verification harness: seeded samplers, sequential/parallel execution of
//! per-sample residual checks, and machine-readable suite reports.

mod exec;
mod report;
pub mod sample;
mod suites;

pub use exec::{run_samples, Execution};
pub use report::{fold_max, SuiteReport};
pub use sample::{rng_for, sample_points, Branch};
pub use suites::{
    algebroid_action, algebroid_algebra, calibrate, conservation, energy_correspondence,
    equivariance, explicit_constraints, gls_symplectic, hodograph_geometry, momentum_intertwine,
    moser_antisymplectic, poisson_table, roundtrip, run_all, run_suite, sigma_machinery,
    Calibration, VerifyConfig,
};
