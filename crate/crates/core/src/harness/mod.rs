//! Experiment drivers, statistical diagnostics, and independent validation oracles.

pub mod csv;
pub mod experiment;
pub mod quadrature;
pub mod stats;
pub mod validation;

pub use self::csv::Table;
pub use experiment::{
    lp_experiment_instance, qp_experiment_instance, run_experiment, CurveSummary, ExperimentConfig,
    ExperimentKind, ExperimentReport,
};
pub use quadrature::{gaussian_integral, gaussian_integral_check, wendel_bounds, QuadratureReport};
pub use stats::{ks_test, moment_diagnostics, normal_cdf, KsResult, Moments};
pub use validation::{brute_force_prox, norm_prox};
