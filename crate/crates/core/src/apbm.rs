//! Adaptive proximal bundle method: repeated prox solves at accuracy ε/2, halving the
//! stepsize whenever the inner gap fails to contract by the factor `1 + β₀`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::{HolderSpec, SubgradientOracle};
use crate::prox::{solve_prox, ProxParams};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApbmParams<T> {
    pub eta0: T,
    pub beta0: T,
    pub epsilon: T,
    pub max_outer: usize,
    /// Stop as soon as `f(ỹ_k) ≤ target`.
    pub target: Option<T>,
    /// Inner budget per prox solve; `None` uses the prox solver default.
    pub inner_max_iters: Option<usize>,
}

impl<T: Scalar> ApbmParams<T> {
    pub fn new(eta0: T, beta0: T, epsilon: T, max_outer: usize) -> Self {
        Self {
            eta0,
            beta0,
            epsilon,
            max_outer,
            target: None,
            inner_max_iters: None,
        }
    }

    pub fn with_target(mut self, target: T) -> Self {
        self.target = Some(target);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: T| v > T::zero() && v.is_finite();
        if !pos(self.eta0) || !pos(self.epsilon) {
            return Err(Error::InvalidParameter("eta0 and epsilon must be positive".into()));
        }
        if !(self.beta0 > T::zero() && self.beta0 <= T::one()) {
            return Err(Error::InvalidParameter(format!("beta0 must lie in (0, 1], got {}", self.beta0)));
        }
        if self.max_outer == 0 {
            return Err(Error::InvalidParameter("max_outer must be positive".into()));
        }
        Ok(())
    }

    pub fn inner_params(&self, eta: T) -> ProxParams<T> {
        ProxParams {
            eta,
            delta: self.epsilon / T::lit(2.0),
            max_iters: self.inner_max_iters,
            gap_tol_ratio: T::lit(0.1),
        }
    }
}

/// One outer cycle `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApbmRecord<T> {
    pub k: usize,
    /// Stepsize used in this cycle, `η_{k−1}`.
    pub eta: T,
    /// `y_k = x_J`
    pub y: Vec<T>,
    /// `ỹ_k = x̃_J`
    pub y_tilde: Vec<T>,
    pub f_at_ytilde: T,
    pub inner_iters: usize,
    pub inner_gap_tol: T,
    /// Whether `η_k = η_{k−1}/2`.
    pub halved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApbmTrace<T> {
    pub y0: Vec<T>,
    pub outer: Vec<ApbmRecord<T>>,
    pub best_value: T,
    pub best_point: Vec<T>,
    /// Stepsize after the last cycle.
    pub eta_final: T,
    pub oracle_calls: u64,
    pub reached_target: bool,
}

impl<T: Scalar> ApbmTrace<T> {
    /// Center of cycle `k` (1-based), i.e. `y_{k−1}`.
    pub fn center(&self, k: usize) -> &[T] {
        if k <= 1 {
            &self.y0
        } else {
            &self.outer[k - 2].y
        }
    }

    /// Writes `k,eta,f_at_ytilde,inner_iters,halved,best_value`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,eta,f_at_ytilde,inner_iters,halved,best_value")?;
        let mut best = T::infinity();
        for r in &self.outer {
            best = best.min(r.f_at_ytilde);
            writeln!(w, "{},{},{},{},{},{}", r.k, r.eta, r.f_at_ytilde, r.inner_iters, r.halved as u8, best)?;
        }
        Ok(())
    }
}

/// Failure of an inner solve, carrying the trace accumulated so far.
#[derive(Debug)]
pub struct ApbmError<T> {
    pub trace: ApbmTrace<T>,
    pub source: Error,
}

impl<T: Scalar> fmt::Display for ApbmError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "outer cycle {}: {}", self.trace.outer.len() + 1, self.source)
    }
}

impl<T: Scalar> std::error::Error for ApbmError<T> {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

/// Runs `max_outer` cycles (or until `target` is met). Each cycle calls the prox solver
/// at `(y_{k−1}, η_{k−1}, ε/2)` and always accepts its output.
pub fn apbm_run<T: Scalar>(
    oracle: &SubgradientOracle<T>,
    y0: &[T],
    params: &ApbmParams<T>,
) -> std::result::Result<ApbmTrace<T>, ApbmError<T>> {
    let calls_before = oracle.eval_count();
    let mut trace = ApbmTrace {
        y0: y0.to_vec(),
        outer: Vec::new(),
        best_value: T::infinity(),
        best_point: y0.to_vec(),
        eta_final: params.eta0,
        oracle_calls: 0,
        reached_target: false,
    };
    if let Err(source) = params.validate() {
        return Err(ApbmError { trace, source });
    }

    let mut y = y0.to_vec();
    let mut eta = params.eta0;
    for k in 1..=params.max_outer {
        let inner = solve_prox(oracle, &y, &params.inner_params(eta), Some(params.beta0))
            .and_then(|r| r.require_converged());
        let r = match inner {
            Ok(r) => r,
            Err(source) => {
                trace.oracle_calls = oracle.eval_count() - calls_before;
                return Err(ApbmError { trace, source });
            }
        };
        let halved = !r.test_held_throughout;
        if r.f_best < trace.best_value {
            trace.best_value = r.f_best;
            trace.best_point.clone_from(&r.x_best);
        }
        trace.outer.push(ApbmRecord {
            k,
            eta,
            y: r.x_last.clone(),
            y_tilde: r.x_best,
            f_at_ytilde: r.f_best,
            inner_iters: r.iters,
            inner_gap_tol: r.gap_tol,
            halved,
        });
        y = r.x_last;
        if halved {
            eta /= T::lit(2.0);
        }
        trace.eta_final = eta;
        if params.target.is_some_and(|t| trace.best_value <= t) {
            trace.reached_target = true;
            break;
        }
    }
    trace.oracle_calls = oracle.eval_count() - calls_before;
    Ok(trace)
}

/// Guaranteed lower bound on every stepsize:
/// `min{(1/(4β₀))((α+1)/L)^{2/(α+1)}(ε/2)^{(1−α)/(α+1)}, η₀}`.
pub fn eta_floor<T: Scalar>(spec: &HolderSpec<T>, beta0: T, epsilon: T, eta0: T) -> Result<T> {
    let c = spec.single_component()?;
    if c.l == T::zero() {
        return Ok(eta0);
    }
    let e = c.alpha + T::one();
    let first = (e / c.l).powf(T::lit(2.0) / e) * (epsilon / T::lit(2.0)).powf((T::one() - c.alpha) / e)
        / (T::lit(4.0) * beta0);
    Ok(first.min(eta0))
}
