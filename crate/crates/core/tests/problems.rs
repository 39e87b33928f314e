use proptest::prelude::*;
use proxkit::linalg::{dist, dot, sub};
use proxkit::problems::{Instance, InstanceFile};
use proxkit::problems::{holder_spec_of_lp, make_abs_oracle, make_lp_oracle, make_qp_oracle, qp_prox_closed_form};
use proxkit::{LpRegressionInstance, QpInstance, Rng, SubgradientOracle};

fn oracles(seed: u64, d: usize) -> Vec<SubgradientOracle<f64>> {
    let mut rng = Rng::new(seed);
    let qp = QpInstance::<f64>::random(d, &mut rng);
    let lp_exps = [1.0, 1.3, 1.7, 2.0];
    let mixed: Vec<f64> = (0..8).map(|i| lp_exps[i % 4]).collect();
    vec![
        make_qp_oracle(qp).unwrap(),
        make_lp_oracle(LpRegressionInstance::random(8, d, vec![1.0; 8], &mut rng).unwrap()).unwrap(),
        make_lp_oracle(LpRegressionInstance::random(8, d, vec![1.5; 8], &mut rng).unwrap()).unwrap(),
        make_lp_oracle(LpRegressionInstance::random(8, d, mixed, &mut rng).unwrap()).unwrap(),
        make_abs_oracle(d),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subgradient_inequality(seed in 0u64..1000, d in 1usize..6, scale in 0.1f64..10.0) {
        let mut rng = Rng::new(seed ^ 0xabc);
        for o in oracles(seed, d) {
            let u: Vec<f64> = rng.normal_vec::<f64>(d).iter().map(|v| v * scale).collect();
            let v: Vec<f64> = rng.normal_vec(d);
            let ev = o.eval(&v).unwrap();
            let fu = o.value(&u).unwrap();
            let lin = ev.value + dot(&ev.subgradient, &sub(&u, &v));
            prop_assert!(fu >= lin - 1e-9 * (1.0 + fu.abs()), "{}: {fu} < {lin}", o.function().name());
        }
    }

    #[test]
    fn holder_variation_and_descent(seed in 0u64..1000, d in 1usize..6, scale in 0.01f64..5.0) {
        let mut rng = Rng::new(seed ^ 0xdef);
        for o in oracles(seed, d) {
            let spec = o.holder_spec().unwrap();
            let u: Vec<f64> = rng.normal_vec(d);
            let step: Vec<f64> = rng.normal_vec::<f64>(d).iter().map(|v| v * scale).collect();
            let v: Vec<f64> = u.iter().zip(&step).map(|(a, b)| a + b).collect();
            let (eu, ev) = (o.eval(&u).unwrap(), o.eval(&v).unwrap());
            let r = dist(&u, &v);
            let var = dist(&eu.subgradient, &ev.subgradient);
            prop_assert!(var <= spec.variation_bound(r) + 1e-9, "{}: {var} > {}", o.function().name(), spec.variation_bound(r));
            let gap = eu.value - ev.value - dot(&ev.subgradient, &sub(&u, &v));
            prop_assert!(gap <= spec.descent_bound(r) + 1e-9 * (1.0 + eu.value.abs()));
        }
    }

    #[test]
    fn qp_closed_form_is_stationary(seed in 0u64..1000, d in 1usize..8, eta in 0.01f64..100.0) {
        let mut rng = Rng::new(seed);
        let inst = QpInstance::<f64>::random(d, &mut rng);
        let y: Vec<f64> = rng.normal_vec(d);
        let x = qp_prox_closed_form(&inst, &y, eta).unwrap();
        // Qx + c + (x − y)/η = 0
        let qx = inst.q.mul_vec(&x);
        for i in 0..d {
            let r = qx[i] + inst.c[i] + (x[i] - y[i]) / eta;
            prop_assert!(r.abs() < 1e-8 * (1.0 + y[i].abs() / eta));
        }
    }

    #[test]
    fn instance_json_round_trip(seed in 0u64..1000, n in 1usize..6, d in 1usize..5, p in 1.0f64..2.0) {
        let mut rng = Rng::new(seed);
        for inst in [
            Instance::Qp(QpInstance::<f64>::random(d, &mut rng)),
            Instance::Lp(LpRegressionInstance::random(n, d, vec![p; n], &mut rng).unwrap()),
        ] {
            let file = InstanceFile { instance: inst, seed: Some(seed) };
            let back = InstanceFile::<f64>::from_json_str(&file.to_json_string()).unwrap();
            prop_assert_eq!(back, file);
        }
    }
}

#[test]
fn uniform_lp_spec_is_single_component() {
    let mut rng = Rng::new(2);
    let inst = LpRegressionInstance::<f64>::random(5, 3, vec![1.4; 5], &mut rng).unwrap();
    let spec = holder_spec_of_lp(&inst);
    assert!(spec.is_single());
    assert!((spec.components[0].alpha - 0.4).abs() < 1e-15);
    let mixed = LpRegressionInstance::<f64>::random(4, 3, vec![1.0, 2.0, 1.0, 2.0], &mut rng).unwrap();
    assert_eq!(holder_spec_of_lp(&mixed).components.len(), 4);
}

#[test]
fn oracle_counts_calls_across_threads() {
    let o = make_abs_oracle::<f64>(2);
    std::thread::scope(|s| {
        for _ in 0..4 {
            s.spawn(|| {
                for _ in 0..100 {
                    o.eval(&[1.0, 2.0]).unwrap();
                }
            });
        }
    });
    assert_eq!(o.eval_count(), 400);
}
