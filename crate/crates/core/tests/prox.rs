use proptest::prelude::*;
use proxkit::linalg::{dist_sq, norm};
use proxkit::problems::{holder_spec_of_lp, make_lp_oracle, make_qp_oracle, qp_prox_closed_form};
use proxkit::prox::{hybrid_iteration_cap, hybrid_m, prox_objective};
use proxkit::{delta1_bound, predicted_iters_holder, solve_prox, LpRegressionInstance, ProxParams, QpInstance, Rng};

fn lp(seed: u64, n: usize, d: usize, exponents: &[f64]) -> LpRegressionInstance<f64> {
    let mut rng = Rng::new(seed);
    let e: Vec<f64> = (0..n).map(|i| exponents[i % exponents.len()]).collect();
    LpRegressionInstance::random(n, d, e, &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn qp_certificate_and_recursion(seed in 0u64..10_000, d in 1usize..12, log_eta in -1.0f64..1.5, log_delta in -8.0f64..-2.0) {
        let (eta, delta) = (10f64.powf(log_eta), 10f64.powf(log_delta));
        let mut rng = Rng::new(seed);
        let inst = QpInstance::<f64>::random(d, &mut rng);
        let o = make_qp_oracle(inst.clone()).unwrap();
        let y: Vec<f64> = rng.normal_vec(d);
        let r = solve_prox(&o, &y, &ProxParams::new(eta, delta), None).unwrap();
        prop_assert!(r.converged);
        let x_star = qp_prox_closed_form(&inst, &y, eta).unwrap();
        let f_star = prox_objective(inst.value(&x_star), &x_star, &y, eta);
        prop_assert!(r.f_eta_best - f_star <= delta + 1e-10 * (1.0 + f_star.abs()));
        prop_assert!(r.f_eta_best <= r.f_eta_last);
        for w in r.trace.windows(2) {
            let lhs = w[1].delta_j + w[1].step_norm.powi(2) / (2.0 * eta);
            prop_assert!(lhs <= w[0].delta_j + 2.0 * r.gap_tol);
            prop_assert!(w[1].delta_j < w[0].delta_j + 1e-12);
        }
        // Solution guarantee against random comparison points.
        for _ in 0..10 {
            let x: Vec<f64> = x_star.iter().map(|v| v + rng.standard_normal()).collect();
            let fx = prox_objective(inst.value(&x), &x, &y, eta);
            let rhs = delta - dist_sq(&r.x_last, &x) / (2.0 * eta) + r.gap_tol;
            prop_assert!(r.f_eta_best - fx <= rhs + 1e-10 * (1.0 + fx.abs()));
        }
    }

    #[test]
    fn holder_recursion_and_caps(seed in 0u64..10_000, p in 1.0f64..2.0, d in 1usize..6, log_eta in -1.0f64..1.0) {
        let eta = 10f64.powf(log_eta);
        let inst = lp(seed, 20, d, &[p]);
        let spec = holder_spec_of_lp(&inst);
        let c = spec.components[0];
        let o = make_lp_oracle(inst).unwrap();
        let y: Vec<f64> = Rng::new(seed + 1).normal_vec(d);
        let delta = 1e-3;
        let r = solve_prox(&o, &y, &ProxParams::new(eta, delta), None).unwrap();
        prop_assert!(r.converged);
        let g = o.eval(&y).unwrap().subgradient;
        let d1 = r.trace[0].delta_j;
        prop_assert!(d1 <= delta1_bound(&spec, norm(&g), eta) + r.gap_tol);
        prop_assert!(r.iters <= predicted_iters_holder(&spec, eta, delta, d1).unwrap());
        for s in &r.trace[1..] {
            let bound = c.l * s.step_norm.powf(c.alpha + 1.0) / (c.alpha + 1.0);
            prop_assert!(s.delta_j <= bound + r.gap_tol + 1e-12);
        }
    }

    #[test]
    fn hybrid_recursion_and_cap(seed in 0u64..10_000, d in 1usize..6, log_eta in -1.0f64..1.0) {
        let eta = 10f64.powf(log_eta);
        let inst = lp(seed, 20, d, &[1.0, 1.5, 2.0]);
        let spec = holder_spec_of_lp(&inst);
        let o = make_lp_oracle(inst).unwrap();
        let y: Vec<f64> = Rng::new(seed + 2).normal_vec(d);
        let delta = 1e-3;
        let r = solve_prox(&o, &y, &ProxParams::new(eta, delta), None).unwrap();
        prop_assert!(r.converged);
        let m = hybrid_m(&spec, delta);
        let shift = spec.nonsmoothness() * delta / 2.0;
        let factor = 1.0 + 1.0 / (eta * m);
        for w in r.trace.windows(2) {
            prop_assert!(factor * (w[1].delta_j - shift) <= w[0].delta_j - shift + factor * 2.0 * r.gap_tol);
        }
        let cap = hybrid_iteration_cap(&spec, eta, delta, r.trace[0].delta_j);
        prop_assert!(r.iters as f64 <= cap);
    }
}

#[test]
fn eta_scaling_on_fixed_qp() {
    let mut rng = Rng::new(7);
    let inst = QpInstance::<f64>::random(50, &mut rng);
    let o = make_qp_oracle(inst).unwrap();
    let y: Vec<f64> = rng.normal_vec(50);
    let iters: Vec<usize> = [0.1, 1.0, 10.0]
        .iter()
        .map(|&eta| solve_prox(&o, &y, &ProxParams::new(eta, 1e-6), None).unwrap().iters)
        .collect();
    assert!(iters[0] <= iters[1] && iters[1] <= iters[2], "{iters:?}");
}

#[test]
fn beta_test_flags_slow_contraction() {
    let inst = lp(3, 20, 4, &[1.0]);
    let o = make_lp_oracle(inst).unwrap();
    let y = vec![2.0, -1.0, 0.5, 3.0];
    let strict = solve_prox(&o, &y, &ProxParams::new(1000.0, 1e-6), Some(1.0)).unwrap();
    assert!(!strict.test_held_throughout);
    let plain = solve_prox(&o, &y, &ProxParams::new(1000.0, 1e-6), None).unwrap();
    assert!(plain.test_held_throughout);
    assert_eq!(strict.delta_trajectory(), plain.delta_trajectory());
}
