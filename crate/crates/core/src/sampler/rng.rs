//! Counter-based splittable generator.
//!
//! Output `n` (1-based) of a stream with key `k` is `mix64(k + n * 0x9E3779B97F4A7C15)`,
//! where `mix64` is the SplitMix64 finalizer (Stafford variant 13). With `k = seed`
//! this reproduces the reference SplitMix64 sequence bit for bit, so streams are
//! identical on every platform. Any output can be computed directly from
//! `(key, counter)`, which is what makes [`Rng::split`] and [`Rng::at`] cheap.
//!
//! Gaussian variates use the Box–Muller transform on two uniforms; the second
//! variate of each pair is cached.

use crate::scalar::Scalar;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const SPLIT_SALT: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rng {
    seed: u64,
    key: u64,
    counter: u64,
    spare_normal: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            key: seed,
            counter: 0,
            spare_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Independent child stream, a pure function of this stream's key and `stream`.
    pub fn split(&self, stream: u64) -> Self {
        let key = mix64(self.key ^ mix64(stream.wrapping_add(SPLIT_SALT)));
        Self {
            seed: self.seed,
            key,
            counter: 0,
            spare_normal: None,
        }
    }

    /// Same stream positioned so that the next output is number `counter + 1`.
    pub fn at(&self, counter: u64) -> Self {
        Self {
            counter,
            spare_normal: None,
            ..self.clone()
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn normal_vec<T: Scalar>(&mut self, n: usize) -> Vec<T> {
        (0..n).map(|_| T::lit(self.standard_normal())).collect()
    }
}
