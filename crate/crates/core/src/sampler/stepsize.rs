use crate::error::Result;
use crate::problems::HolderSpec;
use crate::scalar::Scalar;

/// Returned when every Hölder constant vanishes and the stepsize condition is vacuous.
pub const DEFAULT_MAX_STEPSIZE: f64 = 1e3;

/// `η = (α+1)^{2/(α+1)} / ((2L)^{2/(α+1)} d)`, the largest stepsize for which the
/// rejection step needs at most `2exp(δ)` trials on average.
pub fn stepsize_holder<T: Scalar>(spec: &HolderSpec<T>, d: usize) -> Result<T> {
    let c = spec.single_component()?;
    if c.l == T::zero() {
        return Ok(T::lit(DEFAULT_MAX_STEPSIZE));
    }
    let e = c.alpha + T::one();
    let q = T::lit(2.0) / e;
    Ok(e.powf(q) / ((T::lit(2.0) * c.l).powf(q) * T::from_count(d)))
}

/// `η = 1 / (d Σᵢ (Lᵢ/(αᵢ+1))^{2/(αᵢ+1)})`, capped at [`DEFAULT_MAX_STEPSIZE`].
pub fn stepsize_hybrid<T: Scalar>(spec: &HolderSpec<T>, d: usize) -> T {
    stepsize_hybrid_capped(spec, d, T::lit(DEFAULT_MAX_STEPSIZE))
}

pub fn stepsize_hybrid_capped<T: Scalar>(spec: &HolderSpec<T>, d: usize, max_eta: T) -> T {
    let s: T = spec
        .components
        .iter()
        .map(|c| {
            let e = c.alpha + T::one();
            (c.l / e).powf(T::lit(2.0) / e)
        })
        .sum();
    if s == T::zero() {
        return max_eta;
    }
    (T::one() / (T::from_count(d) * s)).min(max_eta)
}

/// Expected-trial bound `exp(δ + ½ + Σᵢ(1 − αᵢ)/4)` under the hybrid stepsize.
pub fn hybrid_trial_bound<T: Scalar>(spec: &HolderSpec<T>, delta: T) -> T {
    (delta + T::lit(0.5) + spec.nonsmoothness() / T::lit(4.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::HolderComponent;

    fn hc(alpha: f64, l: f64) -> HolderComponent<f64> {
        HolderComponent { alpha, l }
    }

    #[test]
    fn holder_examples() {
        assert!((stepsize_holder(&HolderSpec::single(0.0, 0.5), 1).unwrap() - 1.0f64).abs() < 1e-15);
        assert!((stepsize_holder(&HolderSpec::single(1.0, 1.0), 4).unwrap() - 0.25f64).abs() < 1e-15);
        let s = HolderSpec::single(0.4, 3.0);
        let mut prev = f64::INFINITY;
        for d in 1..50 {
            let v: f64 = stepsize_holder(&s, d).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn hybrid_examples() {
        let one = HolderSpec::single(0.5, 2.0);
        let two = HolderSpec::new(vec![hc(0.5, 2.0), hc(0.5, 2.0)]).unwrap();
        let a: f64 = stepsize_hybrid(&one, 3);
        let b: f64 = stepsize_hybrid(&two, 3);
        assert!((b - a / 2.0).abs() < 1e-15);
        let mixed = HolderSpec::new(vec![hc(0.0, 1.0), hc(1.0, 2.0)]).unwrap();
        assert!((stepsize_hybrid(&mixed, 2) - 0.25).abs() < 1e-15);
        let zero = HolderSpec::single(0.3, 0.0);
        assert_eq!(stepsize_hybrid_capped(&zero, 2, 7.0), 7.0);
    }

    #[test]
    fn trial_bound_examples() {
        let smooth = HolderSpec::new(vec![hc(1.0, 1.0), hc(1.0, 5.0)]).unwrap();
        assert!((hybrid_trial_bound(&smooth, 0.0) - 0.5f64.exp()).abs() < 1e-15);
        let lip = HolderSpec::single(0.0, 1.0);
        assert!((hybrid_trial_bound(&lip, 0.0) - 0.75f64.exp()).abs() < 1e-15);
        assert!(hybrid_trial_bound(&lip, 0.2) > hybrid_trial_bound(&lip, 0.1));
    }
}
