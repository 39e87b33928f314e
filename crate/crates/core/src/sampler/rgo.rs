use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::dist_sq;
use crate::problems::SubgradientOracle;
use crate::prox::{prox_objective, solve_prox, ProxParams, ProxResult};
use crate::sampler::Rng;
use crate::scalar::Scalar;

pub const DEFAULT_TRIAL_CAP: u64 = 1_000_000;

/// Gaussian envelope `h₁(x) = ‖x − center‖²/(2η) + level`, which must minorize
/// `f_y^η` for the rejection step to be exact.
#[derive(Clone, Debug, PartialEq)]
pub struct RgoProposal<T> {
    pub center: Vec<T>,
    pub level: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RejectionOutcome<T> {
    pub sample: Vec<T>,
    pub trials: u64,
    pub log_accept_probs: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RgoOutcome<T> {
    pub sample: Vec<T>,
    pub trials: u64,
    pub prox: ProxResult<T>,
    pub log_accept_probs: Vec<T>,
    /// Prox-solver calls plus one value query per trial.
    pub oracle_calls: u64,
}

/// Draws from `∝ exp(−f(x) − ‖x − y‖²/(2η))` by proposing from `N(center, ηI)` and
/// accepting with probability `exp(−f_y^η(X) + h₁(X))`.
pub fn rejection_sample<T: Scalar>(
    oracle: &SubgradientOracle<T>,
    y: &[T],
    eta: T,
    proposal: &RgoProposal<T>,
    trial_cap: u64,
    rng: &mut Rng,
) -> Result<RejectionOutcome<T>> {
    let d = y.len();
    let sd = eta.sqrt();
    let two_eta = T::lit(2.0) * eta;
    let tol_floor = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
    let mut log_accept_probs = Vec::new();
    let mut x = vec![T::zero(); d];
    for trial in 1..=trial_cap {
        for (xi, &ci) in x.iter_mut().zip(&proposal.center) {
            *xi = ci + sd * T::lit(rng.standard_normal());
        }
        let f_eta = prox_objective(oracle.value(&x)?, &x, y, eta);
        let h1 = dist_sq(&x, &proposal.center) / two_eta + proposal.level;
        let log_ratio = h1 - f_eta;
        if log_ratio > tol_floor * T::one().max(f_eta.abs()) {
            return Err(Error::PositiveLogAcceptance(log_ratio.as_f64()));
        }
        log_accept_probs.push(log_ratio);
        if T::lit(rng.uniform_open().ln()) <= log_ratio {
            return Ok(RejectionOutcome {
                sample: x,
                trials: trial,
                log_accept_probs,
            });
        }
    }
    Err(Error::TrialCapExceeded { cap: trial_cap })
}

/// One exact draw from the restricted Gaussian oracle at `y`.
///
/// The prox subproblem is solved once to a δ-solution; the proposal is then centered at
/// `x_J` with level `f_y^η(x̃_J) − δ` and reused across rejections.
pub fn rgo_sample<T: Scalar>(
    oracle: &SubgradientOracle<T>,
    y: &[T],
    eta: T,
    delta: T,
    rng: &mut Rng,
) -> Result<RgoOutcome<T>> {
    rgo_sample_with(oracle, y, &ProxParams::new(eta, delta), DEFAULT_TRIAL_CAP, rng)
}

pub fn rgo_sample_with<T: Scalar>(
    oracle: &SubgradientOracle<T>,
    y: &[T],
    params: &ProxParams<T>,
    trial_cap: u64,
    rng: &mut Rng,
) -> Result<RgoOutcome<T>> {
    let prox = solve_prox(oracle, y, params, None)?.require_converged()?;
    let proposal = RgoProposal {
        center: prox.x_last.clone(),
        level: prox.f_eta_best - params.delta,
    };
    let rej = rejection_sample(oracle, y, params.eta, &proposal, trial_cap, rng)?;
    Ok(RgoOutcome {
        sample: rej.sample,
        trials: rej.trials,
        oracle_calls: prox.oracle_calls + rej.trials,
        prox,
        log_accept_probs: rej.log_accept_probs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_abs_oracle, make_qp_oracle, QpInstance};

    #[test]
    fn zero_function_ratio_is_constant() {
        let o = make_qp_oracle(QpInstance::<f64>::zero(2)).unwrap();
        let mut rng = Rng::new(1);
        let delta = 0.3;
        for _ in 0..50 {
            let r = rgo_sample(&o, &[1.0, 2.0], 0.5, delta, &mut rng).unwrap();
            assert_eq!(r.prox.x_last, vec![1.0, 2.0]);
            for &l in &r.log_accept_probs {
                assert!((l + delta).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn log_ratios_nonpositive_on_abs() {
        let o = make_abs_oracle::<f64>(3);
        let mut rng = Rng::new(2);
        for _ in 0..200 {
            let y: Vec<f64> = rng.normal_vec(3);
            let r = rgo_sample(&o, &y, 0.05, 0.1, &mut rng).unwrap();
            assert!(r.log_accept_probs.iter().all(|&l| l <= 1e-12));
            assert_eq!(r.trials as usize, r.log_accept_probs.len());
        }
    }

    #[test]
    fn broken_envelope_is_detected() {
        let o = make_abs_oracle::<f64>(1);
        let mut rng = Rng::new(3);
        let bad = RgoProposal {
            center: vec![0.0],
            level: 10.0,
        };
        let e = rejection_sample(&o, &[0.0], 1.0, &bad, 100, &mut rng).unwrap_err();
        assert!(matches!(e, Error::PositiveLogAcceptance(_)));
    }

    #[test]
    fn trial_cap_enforced() {
        let o = make_abs_oracle::<f64>(1);
        let mut rng = Rng::new(4);
        let hopeless = RgoProposal {
            center: vec![0.0],
            level: -1e3,
        };
        let e = rejection_sample(&o, &[0.0], 1.0, &hopeless, 10, &mut rng).unwrap_err();
        assert!(matches!(e, Error::TrialCapExceeded { cap: 10 }));
    }

    #[test]
    fn replay_is_deterministic() {
        let o = make_abs_oracle::<f64>(2);
        let a = rgo_sample(&o, &[0.5, -0.5], 0.1, 0.1, &mut Rng::new(9)).unwrap();
        let b = rgo_sample(&o, &[0.5, -0.5], 0.1, 0.1, &mut Rng::new(9)).unwrap();
        assert_eq!(a.sample, b.sample);
        assert_eq!(a.trials, b.trials);
    }
}
