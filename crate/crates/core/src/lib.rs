//! Proximal oracles for nonsmooth convex optimization and log-concave sampling.
//!
//! * [`bundle`] and [`prox`]: a regularized cutting-plane method returning certified
//!   δ-solutions of `min_x f(x) + ‖x − y‖²/(2η)`.
//! * [`apbm`]: an adaptive proximal bundle optimizer that halves η when the inner gap
//!   stops contracting fast enough.
//! * [`sampler`]: an alternating (Gibbs) proximal sampler whose restricted Gaussian
//!   oracle is exact rejection sampling around the prox solution.
//! * [`harness`]: experiment drivers and independent validation oracles.
//!
//! Everything numerical is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! below are the common instantiations.

pub mod apbm;
pub mod bundle;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod problems;
pub mod prox;
pub mod sampler;
pub mod scalar;

pub use apbm::{apbm_run, eta_floor, ApbmError, ApbmParams, ApbmRecord, ApbmTrace};
pub use bundle::{append_cut, minimize_model, model_value, Cut, CutModel, ModelMin};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use problems::{
    ConvexFunction, HolderComponent, HolderSpec, LpRegressionInstance, QpInstance, SubgradientOracle,
};
pub use prox::{delta1_bound, predicted_iters_holder, solve_prox, ProxParams, ProxResult};
pub use sampler::{asf_step, rgo_sample, stepsize_holder, stepsize_hybrid, AsfChain, RgoOutcome, Rng};
pub use scalar::Scalar;

pub type Oracle64 = SubgradientOracle<f64>;
pub type Oracle32 = SubgradientOracle<f32>;
pub type CutModel64 = CutModel<f64>;
pub type ProxParams64 = ProxParams<f64>;
pub type ProxResult64 = ProxResult<f64>;
pub type ApbmParams64 = ApbmParams<f64>;
pub type ApbmTrace64 = ApbmTrace<f64>;
pub type HolderSpec64 = HolderSpec<f64>;
pub type QpInstance64 = QpInstance<f64>;
pub type LpRegressionInstance64 = LpRegressionInstance<f64>;
pub type RgoOutcome64 = RgoOutcome<f64>;
pub type AsfChain64 = AsfChain<f64>;
