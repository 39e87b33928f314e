//! Regularized cutting-plane method for the proximal subproblem
//! `min_x f_y^η(x) = f(x) + ‖x − y‖²/(2η)`.

use std::io::Write;

use serde::Serialize;

use crate::bundle::{Cut, CutModel, DualSolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{dist, dist_sq, norm};
use crate::problems::{HolderSpec, SubgradientOracle};
use crate::scalar::Scalar;

/// Fallback iteration budget when no Hölder information is available.
pub const DEFAULT_MAX_ITERS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProxParams<T> {
    pub eta: T,
    pub delta: T,
    /// `None` picks ten times the predicted iteration count when the oracle advertises
    /// Hölder constants, else [`DEFAULT_MAX_ITERS`].
    pub max_iters: Option<usize>,
    /// Dual tolerance of each model solve as a fraction of `delta`.
    pub gap_tol_ratio: T,
}

impl<T: Scalar> ProxParams<T> {
    pub fn new(eta: T, delta: T) -> Self {
        Self {
            eta,
            delta,
            max_iters: None,
            gap_tol_ratio: T::lit(0.1),
        }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = Some(max_iters);
        self
    }

    pub fn with_gap_tol_ratio(mut self, ratio: T) -> Self {
        self.gap_tol_ratio = ratio;
        self
    }

    pub fn gap_tol(&self) -> T {
        self.delta * self.gap_tol_ratio
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: T| v > T::zero() && v.is_finite();
        if !pos(self.eta) {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {}", self.eta)));
        }
        if !pos(self.delta) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.gap_tol_ratio > T::zero() && self.gap_tol_ratio <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "gap_tol_ratio must lie in (0, 1], got {}",
                self.gap_tol_ratio
            )));
        }
        if self.max_iters == Some(0) {
            return Err(Error::InvalidParameter("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// One iteration `j` of the cutting-plane loop.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProxStep<T> {
    pub iter: usize,
    /// `f_y^η(x̃_j) − D_j`, where `D_j` is the certified dual lower bound.
    pub delta_j: T,
    pub f_eta_best: T,
    pub model_optimum: T,
    /// `‖x_j − x_{j−1}‖`
    pub step_norm: T,
    pub dual_gap: T,
    /// Active-set iterations spent on the model subproblem.
    pub dual_iters: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProxResult<T> {
    /// `x_J`, the last model minimizer.
    pub x_last: Vec<T>,
    /// `x̃_J`, the best iterate for `f_y^η`.
    pub x_best: Vec<T>,
    /// `J`
    pub iters: usize,
    pub trace: Vec<ProxStep<T>>,
    /// Whether `(1 + β₀)δ_j ≤ δ_{j−1}` held at every step with `δ_j > δ`. Always `true`
    /// when no `β₀` was supplied.
    pub test_held_throughout: bool,
    pub oracle_calls: u64,
    pub converged: bool,
    /// `f(x̃_J)`
    pub f_best: T,
    /// `f_y^η(x̃_J)`
    pub f_eta_best: T,
    /// `f_y^η(x_J)`
    pub f_eta_last: T,
    pub gap_tol: T,
    pub max_iters: usize,
}

impl<T: Scalar> ProxResult<T> {
    pub fn delta_trajectory(&self) -> Vec<T> {
        self.trace.iter().map(|s| s.delta_j).collect()
    }

    pub fn final_delta(&self) -> T {
        self.trace.last().map_or(T::infinity(), |s| s.delta_j)
    }

    /// Writes `iter,delta_j,f_eta_best,model_optimum,step_norm`.
    pub fn write_trace_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iter,delta_j,f_eta_best,model_optimum,step_norm")?;
        for s in &self.trace {
            writeln!(
                w,
                "{},{},{},{},{}",
                s.iter, s.delta_j, s.f_eta_best, s.model_optimum, s.step_norm
            )?;
        }
        Ok(())
    }

    /// Fails with [`Error::ProxNotConverged`] when the budget ran out.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::ProxNotConverged {
                iters: self.iters,
                last_gap: self.final_delta().as_f64(),
            })
        }
    }
}

/// `f(x) + ‖x − y‖²/(2η)`
#[inline]
pub fn prox_objective<T: Scalar>(fx: T, x: &[T], y: &[T], eta: T) -> T {
    fx + dist_sq(x, y) / (T::lit(2.0) * eta)
}

/// Upper bound on `δ₁`: `Σᵢ Lᵢ η^{αᵢ+1} ‖f′(y)‖^{αᵢ+1}/(αᵢ+1)`.
pub fn delta1_bound<T: Scalar>(spec: &HolderSpec<T>, grad_norm_at_y: T, eta: T) -> T {
    spec.components
        .iter()
        .map(|c| {
            let e = c.alpha + T::one();
            c.l * (eta * grad_norm_at_y).powf(e) / e
        })
        .sum()
}

/// Contraction factor `β = (1/(2η))((α+1)/L)^{2/(α+1)} δ^{(1−α)/(α+1)}`.
pub fn holder_beta<T: Scalar>(alpha: T, l: T, eta: T, delta: T) -> T {
    let e = alpha + T::one();
    ((e / l).powf(T::lit(2.0) / e) * delta.powf((T::one() - alpha) / e)) / (T::lit(2.0) * eta)
}

/// `j₀ = 1 + ⌈(1+β)/β · log(δ₁/δ)⌉`, or 1 when `δ₁ ≤ δ`.
pub fn predicted_iters_holder<T: Scalar>(spec: &HolderSpec<T>, eta: T, delta: T, delta1: T) -> Result<usize> {
    let c = spec.single_component()?;
    if delta1 <= delta {
        return Ok(1);
    }
    let ratio = (delta1 / delta).ln();
    if c.l == T::zero() {
        return Ok(1 + ratio.ceil().to_usize().unwrap_or(usize::MAX));
    }
    let beta = holder_beta(c.alpha, c.l, eta, delta);
    let steps = ((T::one() + beta) / beta * ratio).ceil();
    Ok(1usize.saturating_add(steps.to_usize().unwrap_or(usize::MAX)))
}

/// `M = Σᵢ L_i^{2/(αᵢ+1)} / ((αᵢ+1)δ)^{(1−αᵢ)/(αᵢ+1)}`
pub fn hybrid_m<T: Scalar>(spec: &HolderSpec<T>, delta: T) -> T {
    spec.components
        .iter()
        .map(|c| {
            let e = c.alpha + T::one();
            c.l.powf(T::lit(2.0) / e) / (e * delta).powf((T::one() - c.alpha) / e)
        })
        .sum()
}

/// `(1 + ηM)·log(2δ₁/δ) + 1`, or 1 when `δ₁ ≤ δ`.
pub fn hybrid_iteration_cap<T: Scalar>(spec: &HolderSpec<T>, eta: T, delta: T, delta1: T) -> T {
    if delta1 <= delta {
        return T::one();
    }
    (T::one() + eta * hybrid_m(spec, delta)) * (T::lit(2.0) * delta1 / delta).ln() + T::one()
}

fn default_max_iters<T: Scalar>(spec: Option<&HolderSpec<T>>, eta: T, delta: T, grad_norm: T) -> usize {
    let Some(spec) = spec else {
        return DEFAULT_MAX_ITERS;
    };
    let d1 = delta1_bound(spec, grad_norm, eta);
    let predicted = if spec.is_single() {
        predicted_iters_holder(spec, eta, delta, d1).unwrap_or(DEFAULT_MAX_ITERS)
    } else {
        hybrid_iteration_cap(spec, eta, delta, d1)
            .ceil()
            .to_usize()
            .unwrap_or(DEFAULT_MAX_ITERS)
    };
    predicted.max(1).saturating_mul(10)
}

/// Runs the regularized cutting-plane method from `x₀ = x̃₀ = y` until the certified gap
/// `δ_j = f_y^η(x̃_j) − D_j` drops to `delta`. The loop always runs at least once.
///
/// With `beta0`, the per-step test `(1 + β₀)δ_j ≤ δ_{j−1}` is monitored on every
/// consecutive pair with `δ_j > δ`, allowing slack for the inexact dual solves.
///
/// Exhausting the budget is not an error: the partial result comes back with
/// `converged == false`.
pub fn solve_prox<T: Scalar>(
    oracle: &SubgradientOracle<T>,
    y: &[T],
    params: &ProxParams<T>,
    beta0: Option<T>,
) -> Result<ProxResult<T>> {
    params.validate()?;
    if let Some(b) = beta0 {
        if !(b > T::zero() && b <= T::one()) {
            return Err(Error::InvalidParameter(format!("beta0 must lie in (0, 1], got {b}")));
        }
    }
    let eta = params.eta;
    let delta = params.delta;
    let gap_tol = params.gap_tol();

    let e0 = oracle.eval(y)?;
    let max_iters = params.max_iters.unwrap_or_else(|| {
        default_max_iters(oracle.holder_spec().as_ref(), eta, delta, norm(&e0.subgradient))
    });

    let mut model = CutModel::new(y.to_vec(), eta)?.with_options(DualSolverOptions::default());
    let mut x_prev = y.to_vec();
    let mut best = y.to_vec();
    let mut f_best = e0.value;
    let mut f_eta_best = e0.value;
    let mut pending = e0;

    let mut trace: Vec<ProxStep<T>> = Vec::new();
    let mut test_held = true;
    let mut converged = false;
    let mut f_eta_last = f_eta_best;

    let slack = (T::one() + beta0.unwrap_or(T::zero())) * T::lit(2.0) * gap_tol;

    for j in 1..=max_iters {
        model.push_cut(Cut {
            point: x_prev.clone(),
            value: pending.value,
            slope: std::mem::take(&mut pending.subgradient),
        })?;
        let min = model.minimize(gap_tol)?;
        let x = min.minimizer;

        // One oracle call: its value decides x̃_j and its subgradient is the next cut.
        pending = oracle.eval(&x)?;
        f_eta_last = prox_objective(pending.value, &x, y, eta);
        if f_eta_last < f_eta_best {
            f_eta_best = f_eta_last;
            f_best = pending.value;
            best.clone_from(&x);
        }
        let delta_j = f_eta_best - min.model_optimum;
        let step = ProxStep {
            iter: j,
            delta_j,
            f_eta_best,
            model_optimum: min.model_optimum,
            step_norm: dist(&x, &x_prev),
            dual_gap: min.dual_gap,
            dual_iters: min.iterations,
        };
        if let (Some(b), Some(prev)) = (beta0, trace.last()) {
            if delta_j > delta && (T::one() + b) * delta_j > prev.delta_j + slack {
                test_held = false;
            }
        }
        trace.push(step);
        x_prev = x;
        if delta_j <= delta {
            converged = true;
            break;
        }
    }

    let iters = trace.len();
    Ok(ProxResult {
        x_last: x_prev,
        x_best: best,
        iters,
        trace,
        test_held_throughout: test_held,
        // Counted locally so concurrent users of a shared oracle do not skew it.
        oracle_calls: iters as u64 + 1,
        converged,
        f_best,
        f_eta_best,
        f_eta_last,
        gap_tol,
        max_iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::problems::{make_abs_oracle, make_lp_oracle, make_qp_oracle, qp_prox_closed_form, LpRegressionInstance, QpInstance};
    use crate::sampler::Rng;

    fn qp1(q: f64, c: f64) -> QpInstance<f64> {
        QpInstance::new(Matrix::from_diagonal(&[q]), vec![c]).unwrap()
    }

    #[test]
    fn zero_function_single_iteration() {
        let o = make_qp_oracle(QpInstance::<f64>::zero(3)).unwrap();
        let y = vec![0.3, -1.0, 2.0];
        let r = solve_prox(&o, &y, &ProxParams::new(1.0, 1e-6), None).unwrap();
        assert_eq!(r.x_last, y);
        assert_eq!(r.iters, 1);
        assert_eq!(r.trace[0].delta_j, 0.0);
        assert!(r.converged);
        assert_eq!(r.oracle_calls, 2);
    }

    #[test]
    fn scalar_quadratic() {
        let o = make_qp_oracle(qp1(1.0, 0.0)).unwrap();
        let r = solve_prox(&o, &[1.0], &ProxParams::new(1.0, 1e-8), None).unwrap();
        assert!(r.converged);
        assert!((r.x_best[0] - 0.5).abs() < 1e-4);
    }

    #[test]
    fn absolute_value_soft_threshold() {
        let o = make_abs_oracle::<f64>(1);
        let r = solve_prox(&o, &[2.0], &ProxParams::new(1.0, 1e-8), None).unwrap();
        assert!(r.converged);
        assert!((r.x_best[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn trajectory_invariants_on_random_qp() {
        let mut rng = Rng::new(3);
        let inst = QpInstance::<f64>::random(10, &mut rng);
        let o = make_qp_oracle(inst.clone()).unwrap();
        let y: Vec<f64> = rng.normal_vec(10);
        let eta = 5.0;
        let p = ProxParams::new(eta, 1e-7);
        let r = solve_prox(&o, &y, &p, None).unwrap();
        assert!(r.converged);
        assert!(r.final_delta() <= p.delta);
        assert!(r.f_eta_best <= r.f_eta_last);
        assert_eq!(r.oracle_calls, r.iters as u64 + 1);
        for w in r.trace.windows(2) {
            let lhs = w[1].delta_j + w[1].step_norm.powi(2) / (2.0 * eta);
            assert!(lhs <= w[0].delta_j + 2.0 * r.gap_tol);
        }
        let exact = qp_prox_closed_form(&inst, &y, eta).unwrap();
        let f_exact = prox_objective(inst.value(&exact), &exact, &y, eta);
        assert!(r.f_eta_best - f_exact <= p.delta + 1e-10);
    }

    #[test]
    fn holder_iteration_prediction_respected() {
        let mut rng = Rng::new(11);
        let inst = LpRegressionInstance::<f64>::random(30, 5, vec![1.5; 30], &mut rng).unwrap();
        let spec = crate::problems::holder_spec_of_lp(&inst);
        let o = make_lp_oracle(inst).unwrap();
        for eta in [0.1, 1.0, 10.0] {
            let y: Vec<f64> = rng.normal_vec(5);
            let g = o.eval(&y).unwrap().subgradient;
            let p = ProxParams::new(eta, 1e-4);
            let r = solve_prox(&o, &y, &p, None).unwrap();
            let d1 = delta1_bound(&spec, norm(&g), eta);
            assert!(r.trace[0].delta_j <= d1 + r.gap_tol);
            let j0 = predicted_iters_holder(&spec, eta, p.delta, r.trace[0].delta_j).unwrap();
            assert!(r.iters <= j0, "J = {} > j0 = {j0}", r.iters);
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut rng = Rng::new(1);
        let o = make_qp_oracle(QpInstance::<f64>::random(5, &mut rng)).unwrap();
        let y: Vec<f64> = rng.normal_vec(5);
        let r = solve_prox(&o, &y, &ProxParams::new(100.0, 1e-9).with_max_iters(2), None).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iters, 2);
        assert!(r.require_converged().is_err());
    }

    #[test]
    fn delta1_bound_examples() {
        assert_eq!(delta1_bound(&HolderSpec::single(0.0, 2.0), 1.0, 1.0), 2.0);
        assert_eq!(delta1_bound(&HolderSpec::single(0.3, 2.0), 0.0, 1.0), 0.0);
        assert_eq!(delta1_bound(&HolderSpec::single(1.0, 4.0), 2.0, 0.5), 2.0);
    }

    #[test]
    fn predicted_iters_examples() {
        let spec = HolderSpec::single(0.0, 1.0);
        assert_eq!(predicted_iters_holder(&spec, 1.0, 0.25, 1.0).unwrap(), 14);
        assert_eq!(predicted_iters_holder(&spec, 1.0, 0.25, 0.2).unwrap(), 1);
        assert!((holder_beta(0.0, 1.0, 1.0, 0.25) - 0.125f64).abs() < 1e-15);
        // smooth case: β = 1/(ηL) whatever δ is
        for delta in [1e-6, 1e-2, 1.0] {
            assert!((holder_beta(1.0, 3.0, 0.5, delta) - 1.0f64 / 1.5).abs() < 1e-14);
        }
        let two = HolderSpec::new(vec![spec.components[0]; 2]).unwrap();
        assert!(predicted_iters_holder(&two, 1.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let o = make_abs_oracle::<f64>(1);
        let r = solve_prox(&o, &[2.0], &ProxParams::new(1.0, 1e-6), None).unwrap();
        let mut buf = Vec::new();
        r.write_trace_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("iter,delta_j,f_eta_best,model_optimum,step_norm\n"));
        assert_eq!(s.lines().count(), r.iters + 1);
    }

    #[test]
    fn invalid_params_rejected() {
        let o = make_abs_oracle::<f64>(1);
        assert!(solve_prox(&o, &[0.0], &ProxParams::new(0.0, 1e-3), None).is_err());
        assert!(solve_prox(&o, &[0.0], &ProxParams::new(1.0, -1.0), None).is_err());
        assert!(solve_prox(&o, &[0.0], &ProxParams::new(1.0, 1e-3), Some(1.5)).is_err());
        assert!(solve_prox(&o, &[0.0, 1.0], &ProxParams::new(1.0, 1e-3), None).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let o = make_abs_oracle::<f32>(1);
        let r = solve_prox(&o, &[2.0f32], &ProxParams::new(1.0f32, 1e-4), None).unwrap();
        assert!((r.x_best[0] - 1.0).abs() < 1e-2);
    }
}
