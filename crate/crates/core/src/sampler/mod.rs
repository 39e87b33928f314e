//! Proximal sampler: alternating Gaussian steps with an exact rejection-sampling
//! restricted Gaussian oracle.

mod asf;
mod rgo;
mod rng;
mod stepsize;

pub use asf::{asf_step, run_chains, AsfChain, ChainRecord, ChainRun};
pub use rgo::{rejection_sample, rgo_sample, RejectionOutcome, RgoOutcome, RgoProposal, DEFAULT_TRIAL_CAP};
pub use rng::{mix64, Rng};
pub use stepsize::{hybrid_trial_bound, stepsize_holder, stepsize_hybrid, stepsize_hybrid_capped, DEFAULT_MAX_STEPSIZE};
