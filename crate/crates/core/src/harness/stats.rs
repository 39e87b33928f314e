//! Sample diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Moments {
    pub mean: Vec<f64>,
    /// Unbiased sample covariance.
    pub covariance: Matrix<f64>,
    /// `sqrt(var/N)` per coordinate.
    pub std_errors: Vec<f64>,
    pub n: usize,
}

pub fn moment_diagnostics(samples: &[Vec<f64>]) -> Result<Moments> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {n}")));
    }
    let d = samples[0].len();
    if let Some(bad) = samples.iter().find(|s| s.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.len() });
    }
    let mut mean = vec![0.0; d];
    for s in samples {
        for (m, &v) in mean.iter_mut().zip(s) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut cov: Matrix<f64> = Matrix::zeros(d, d);
    for s in samples {
        for i in 0..d {
            let di = s[i] - mean[i];
            for j in 0..=i {
                cov[(i, j)] += di * (s[j] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in 0..=i {
            let v = cov[(i, j)] / (n - 1) as f64;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    let std_errors = (0..d).map(|i| (cov[(i, i)] / n as f64).sqrt()).collect();
    Ok(Moments {
        mean,
        covariance: cov,
        std_errors,
        n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

impl KsResult {
    pub fn passes(&self, level: f64) -> bool {
        self.p_value > level
    }
}

/// One-sample Kolmogorov–Smirnov test with the asymptotic Kolmogorov distribution
/// (small-sample corrected argument `(√n + 0.12 + 0.11/√n)·D`).
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> KsResult {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    let sn = nf.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    KsResult {
        statistic: d,
        p_value: kolmogorov_q(lambda),
        n,
    }
}

/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²)`
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub fn normal_cdf(mean: f64, var: f64) -> impl Fn(f64) -> f64 {
    let sd = var.sqrt();
    move |x| 0.5 * statrs::function::erf::erfc(-(x - mean) / (sd * std::f64::consts::SQRT_2))
}
