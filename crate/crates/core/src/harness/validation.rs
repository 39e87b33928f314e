//! Independent oracles for the prox subproblem in low dimension.

use crate::error::{Error, Result};
use crate::linalg::dist;
use crate::problems::{HolderSpec, SubgradientOracle};
use crate::prox::prox_objective;
use crate::sampler::Rng;

/// Grid minimizer of `f_y^η` on the box `y ± halfwidth` (`d ≤ 2`), refined three times
/// by re-gridding a box four times smaller around the incumbent.
pub fn brute_force_prox(
    oracle: &SubgradientOracle<f64>,
    y: &[f64],
    eta: f64,
    halfwidth: f64,
    grid_points: usize,
) -> Result<Vec<f64>> {
    let d = y.len();
    if d == 0 || d > 2 {
        return Err(Error::InvalidParameter(format!("brute force supports d in 1..=2, got {d}")));
    }
    if grid_points < 9 || !(halfwidth > 0.0) || !(eta > 0.0) {
        return Err(Error::InvalidParameter("need at least 9 grid points and positive widths".into()));
    }
    if oracle.dim() != d {
        return Err(Error::DimensionMismatch { expected: oracle.dim(), found: d });
    }
    let f = oracle.function();
    let objective = |x: &[f64]| prox_objective(f.value(x), x, y, eta);
    let mut center = y.to_vec();
    let mut h = halfwidth;
    for level in 0..4 {
        let step = 2.0 * h / (grid_points - 1) as f64;
        let mut best = f64::INFINITY;
        let mut best_idx = vec![0usize; d];
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0; d];
        loop {
            for k in 0..d {
                x[k] = center[k] - h + idx[k] as f64 * step;
            }
            let v = objective(&x);
            if v < best {
                best = v;
                best_idx.clone_from(&idx);
            }
            // odometer increment
            let mut k = 0;
            while k < d {
                idx[k] += 1;
                if idx[k] < grid_points {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == d {
                break;
            }
        }
        if level == 0 && best_idx.iter().any(|&i| i == 0 || i == grid_points - 1) {
            return Err(Error::GridBoundary);
        }
        for k in 0..d {
            center[k] = center[k] - h + best_idx[k] as f64 * step;
        }
        h /= 4.0;
    }
    Ok(center)
}

/// `h₂(x) = ‖x − x*‖²/(2η) + Σᵢ Lᵢ/(αᵢ+1)‖x − x*‖^{αᵢ+1} + f_y^η(x*)`, an upper envelope
/// of `f_y^η` used only for validating the sampler's analysis.
pub fn h2_envelope(x: &[f64], x_star: &[f64], f_eta_star: f64, eta: f64, spec: &HolderSpec<f64>) -> f64 {
    let r = dist(x, x_star);
    r * r / (2.0 * eta) + spec.descent_bound(r) + f_eta_star
}

/// Checks `h₁ ≤ f_y^η ≤ h₂` at `samples` Gaussian points around `x*`; returns the
/// largest violation of either inequality (≤ 0 when both hold).
#[allow(clippy::too_many_arguments)]
pub fn envelope_violation(
    oracle: &SubgradientOracle<f64>,
    y: &[f64],
    eta: f64,
    spec: &HolderSpec<f64>,
    x_star: &[f64],
    h1_center: &[f64],
    h1_level: f64,
    samples: usize,
    rng: &mut Rng,
) -> f64 {
    let f = oracle.function();
    let f_eta_star = prox_objective(f.value(x_star), x_star, y, eta);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x: Vec<f64> = x_star.iter().map(|&c| c + eta.sqrt() * 2.0 * rng.standard_normal()).collect();
        let fe = prox_objective(f.value(&x), &x, y, eta);
        let h1 = dist(&x, h1_center).powi(2) / (2.0 * eta) + h1_level;
        let h2 = h2_envelope(&x, x_star, f_eta_star, eta, spec);
        worst = worst.max(h1 - fe).max(fe - h2);
    }
    worst
}

/// Exact prox of the Euclidean norm: `y·max(0, 1 − η/‖y‖)`.
pub fn norm_prox(y: &[f64], eta: f64) -> Vec<f64> {
    let n = crate::linalg::norm(y);
    let s = if n > eta { 1.0 - eta / n } else { 0.0 };
    y.iter().map(|&v| v * s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::problems::{make_abs_oracle, make_qp_oracle, qp_prox_closed_form, QpInstance};
    use crate::prox::{solve_prox, ProxParams};

    #[test]
    fn zero_function_returns_center() {
        let o = make_qp_oracle(QpInstance::<f64>::zero(2)).unwrap();
        let x = brute_force_prox(&o, &[0.3, -0.7], 1.0, 2.0, 41).unwrap();
        assert!(dist(&x, &[0.3, -0.7]) < 1e-12);
    }

    #[test]
    fn abs_soft_threshold() {
        let o = make_abs_oracle::<f64>(1);
        let x = brute_force_prox(&o, &[2.0], 1.0, 3.0, 101).unwrap();
        assert!((x[0] - 1.0).abs() < 3.0 / 100.0 / 64.0 * 2.0);
        assert!((norm_prox(&[2.0], 1.0)[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scalar_qp_matches_closed_form() {
        let inst = QpInstance::new(Matrix::from_diagonal(&[3.0]), vec![-1.0]).unwrap();
        let o = make_qp_oracle(inst.clone()).unwrap();
        let x = brute_force_prox(&o, &[0.5], 0.7, 2.0, 101).unwrap();
        let z = qp_prox_closed_form(&inst, &[0.5], 0.7).unwrap();
        assert!((x[0] - z[0]).abs() < 2.0 * 4.0 / 100.0 / 64.0);
    }

    #[test]
    fn boundary_minimizer_rejected() {
        let o = make_abs_oracle::<f64>(1);
        assert!(matches!(brute_force_prox(&o, &[5.0], 1.0, 0.5, 21), Err(Error::GridBoundary)));
        assert!(brute_force_prox(&make_abs_oracle::<f64>(3), &[0.0; 3], 1.0, 1.0, 21).is_err());
    }

    #[test]
    fn envelopes_sandwich_the_target() {
        let o = make_abs_oracle::<f64>(2);
        let y = [0.8, -0.4];
        let eta = 0.3;
        let delta = 0.05;
        let r = solve_prox(&o, &y, &ProxParams::new(eta, delta), None).unwrap();
        let xs = norm_prox(&y, eta);
        let spec = HolderSpec::single(0.0, 2.0);
        let v = envelope_violation(&o, &y, eta, &spec, &xs, &r.x_last, r.f_eta_best - delta, 2000, &mut Rng::new(1));
        assert!(v <= 1e-12, "violation {v}");
    }
}
