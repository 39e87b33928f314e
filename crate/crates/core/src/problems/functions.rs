use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, Matrix};
use crate::problems::{ConvexFunction, HolderComponent, HolderSpec, SubgradientOracle};
use crate::sampler::Rng;
use crate::scalar::Scalar;

/// `½xᵀQx + ⟨c, x⟩` with `Q` symmetric positive semidefinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpInstance<T> {
    pub q: Matrix<T>,
    pub c: Vec<T>,
}

impl<T: Scalar> QpInstance<T> {
    pub fn new(q: Matrix<T>, c: Vec<T>) -> Result<Self> {
        let inst = Self { q, c };
        inst.validate()?;
        Ok(inst)
    }

    /// The zero function in dimension `d`.
    pub fn zero(d: usize) -> Self {
        Self {
            q: Matrix::zeros(d, d),
            c: vec![T::zero(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.c.len();
        if self.q.rows() != d || self.q.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.q.rows().max(self.q.cols()),
            });
        }
        if !self.q.is_symmetric(T::lit(1e-12)) {
            return Err(Error::InvalidInstance("Q is not symmetric".into()));
        }
        // Cholesky of Q + τI succeeds exactly when λ_min(Q) > −τ.
        let tau = T::lit(1e-10).max(T::epsilon() * T::from_count(4 * d.max(1)) * self.q.max_abs());
        let mut shifted = self.q.clone();
        for i in 0..d {
            shifted[(i, i)] += tau;
        }
        if shifted.cholesky().is_err() {
            return Err(Error::InvalidInstance(
                "Q is not positive semidefinite".into(),
            ));
        }
        Ok(())
    }

    /// `Q = AAᵀ/‖AAᵀ‖_∞` with standard normal `A` (entrywise max norm) and standard normal `c`.
    pub fn random(d: usize, rng: &mut Rng) -> Self {
        let a = Matrix::from_row_major(d, d, rng.normal_vec(d * d)).expect("square");
        let mut q = a.gram_rows();
        let s: T = q.max_abs();
        if s > T::zero() {
            q.scale(s.recip());
        }
        let c = rng.normal_vec(d);
        Self { q, c }
    }

    pub fn value(&self, x: &[T]) -> T {
        let qx = self.q.mul_vec(x);
        T::lit(0.5) * dot(x, &qx) + dot(&self.c, x)
    }
}

/// Oracle view of a [`QpInstance`].
#[derive(Debug)]
pub struct Quadratic<T> {
    inst: QpInstance<T>,
    lambda_max: OnceLock<T>,
}

impl<T: Scalar> Quadratic<T> {
    pub fn new(inst: QpInstance<T>) -> Result<Self> {
        inst.validate()?;
        Ok(Self {
            inst,
            lambda_max: OnceLock::new(),
        })
    }

    pub fn instance(&self) -> &QpInstance<T> {
        &self.inst
    }

    pub fn lambda_max(&self) -> T {
        *self.lambda_max.get_or_init(|| {
            self.inst
                .q
                .symmetric_eigenvalues()
                .last()
                .copied()
                .unwrap_or_else(T::zero)
                .max(T::zero())
        })
    }
}

impl<T: Scalar> ConvexFunction<T> for Quadratic<T> {
    fn dim(&self) -> usize {
        self.inst.dim()
    }

    fn value_and_subgradient(&self, x: &[T], grad: &mut [T]) -> T {
        let q = &self.inst.q;
        let mut v = T::zero();
        for i in 0..x.len() {
            let qi = dot(q.row(i), x);
            grad[i] = qi + self.inst.c[i];
            v += x[i] * (T::lit(0.5) * qi + self.inst.c[i]);
        }
        v
    }

    fn holder_spec(&self) -> Option<HolderSpec<T>> {
        Some(HolderSpec::single(T::one(), self.lambda_max()))
    }

    fn name(&self) -> &str {
        "quadratic"
    }
}

pub fn make_qp_oracle<T: Scalar>(inst: QpInstance<T>) -> Result<SubgradientOracle<T>> {
    Ok(SubgradientOracle::new(Quadratic::new(inst)?))
}

/// Exact minimizer of `f(x) + ‖x − y‖²/(2η)` for a quadratic: `(Q + η⁻¹I)⁻¹(η⁻¹y − c)`.
pub fn qp_prox_closed_form<T: Scalar>(inst: &QpInstance<T>, y: &[T], eta: T) -> Result<Vec<T>> {
    if !(eta > T::zero()) {
        return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
    }
    let d = inst.dim();
    if y.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: y.len(),
        });
    }
    let inv = eta.recip();
    let mut m = inst.q.clone();
    for i in 0..d {
        m[(i, i)] += inv;
    }
    let rhs: Vec<T> = y.iter().zip(&inst.c).map(|(&yi, &ci)| yi * inv - ci).collect();
    Ok(m.cholesky()?.solve(&rhs))
}

/// Unconstrained minimizer `−Q⁻¹c`; fails when `Q` is numerically singular.
pub fn qp_minimizer<T: Scalar>(inst: &QpInstance<T>) -> Result<Vec<T>> {
    let rhs: Vec<T> = inst.c.iter().map(|&c| -c).collect();
    Ok(inst.q.cholesky()?.solve(&rhs))
}

/// `(1/n)Σᵢ|aᵢᵀx − bᵢ|^{pᵢ}` (the `1/n` factor is dropped when `normalize` is false).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpRegressionInstance<T> {
    pub a: Matrix<T>,
    pub b: Vec<T>,
    pub exponents: Vec<T>,
    pub normalize: bool,
}

impl<T: Scalar> LpRegressionInstance<T> {
    /// Same exponent `p` on every row.
    pub fn uniform(a: Matrix<T>, b: Vec<T>, p: T) -> Result<Self> {
        let n = a.rows();
        Self::mixed(a, b, vec![p; n])
    }

    pub fn mixed(a: Matrix<T>, b: Vec<T>, exponents: Vec<T>) -> Result<Self> {
        let inst = Self {
            a,
            b,
            exponents,
            normalize: true,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_normalize(mut self, normalize: bool) -> Self {
        self.normalize = normalize;
        self
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.rows();
        if n == 0 {
            return Err(Error::InvalidInstance("regression needs at least one row".into()));
        }
        for len in [self.b.len(), self.exponents.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        if let Some(p) = self
            .exponents
            .iter()
            .find(|&&p| !(p >= T::one() && p <= T::lit(2.0)))
        {
            return Err(Error::InvalidInstance(format!("exponent {p} outside [1, 2]")));
        }
        Ok(())
    }

    pub fn is_uniform(&self) -> bool {
        self.exponents.windows(2).all(|w| w[0] == w[1])
    }

    /// Standard normal `A` divided by its entrywise max norm, standard normal `b`.
    pub fn random(n: usize, d: usize, exponents: Vec<T>, rng: &mut Rng) -> Result<Self> {
        let mut a = Matrix::from_row_major(n, d, rng.normal_vec(n * d))?;
        let s: T = a.max_abs();
        if s > T::zero() {
            a.scale(s.recip());
        }
        let b = rng.normal_vec(n);
        Self::mixed(a, b, exponents)
    }

    fn weight(&self) -> T {
        if self.normalize {
            T::from_count(self.rows()).recip()
        } else {
            T::one()
        }
    }
}

/// Oracle view of an [`LpRegressionInstance`].
#[derive(Debug)]
pub struct LpRegression<T> {
    inst: LpRegressionInstance<T>,
}

impl<T: Scalar> LpRegression<T> {
    pub fn new(inst: LpRegressionInstance<T>) -> Result<Self> {
        inst.validate()?;
        Ok(Self { inst })
    }

    pub fn instance(&self) -> &LpRegressionInstance<T> {
        &self.inst
    }
}

impl<T: Scalar> ConvexFunction<T> for LpRegression<T> {
    fn dim(&self) -> usize {
        self.inst.dim()
    }

    fn value_and_subgradient(&self, x: &[T], grad: &mut [T]) -> T {
        grad.iter_mut().for_each(|g| *g = T::zero());
        let w = self.inst.weight();
        let mut v = T::zero();
        for i in 0..self.inst.rows() {
            let row = self.inst.a.row(i);
            let p = self.inst.exponents[i];
            let t = dot(row, x) - self.inst.b[i];
            let at = t.abs();
            v += at.powf(p);
            // sign(0)|0|^{p−1} is taken as 0, including p = 1.
            if t != T::zero() {
                let slope = p * t.signum() * at.powf(p - T::one());
                axpy(w * slope, row, grad);
            }
        }
        w * v
    }

    fn holder_spec(&self) -> Option<HolderSpec<T>> {
        Some(holder_spec_of_lp(&self.inst))
    }

    fn name(&self) -> &str {
        "lp regression"
    }
}

pub fn make_lp_oracle<T: Scalar>(inst: LpRegressionInstance<T>) -> Result<SubgradientOracle<T>> {
    Ok(SubgradientOracle::new(LpRegression::new(inst)?))
}

/// Hölder constants of an ℓp regression objective. Uniform exponents collapse into one
/// component `α = p − 1`, `L = (p·2^{2−p}/n)Σ‖aᵢ‖^p`; mixed exponents keep one component
/// per row.
pub fn holder_spec_of_lp<T: Scalar>(inst: &LpRegressionInstance<T>) -> HolderSpec<T> {
    let w = inst.weight();
    let two = T::lit(2.0);
    let per_row = (0..inst.rows()).map(|i| {
        let p = inst.exponents[i];
        let l = w * p * two.powf(two - p) * norm(inst.a.row(i)).powf(p);
        HolderComponent {
            alpha: p - T::one(),
            l,
        }
    });
    if inst.is_uniform() {
        let alpha = inst.exponents[0] - T::one();
        let l = per_row.map(|c| c.l).sum();
        HolderSpec::single(alpha, l)
    } else {
        HolderSpec {
            components: per_row.collect(),
        }
    }
}

/// Euclidean norm `‖x‖`, the `d`-dimensional absolute value. Subgradient 0 at the origin.
#[derive(Clone, Copy, Debug)]
pub struct AbsNorm {
    pub dim: usize,
}

impl<T: Scalar> ConvexFunction<T> for AbsNorm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value_and_subgradient(&self, x: &[T], grad: &mut [T]) -> T {
        let r = norm(x);
        for (g, &xi) in grad.iter_mut().zip(x) {
            *g = if r > T::zero() { xi / r } else { T::zero() };
        }
        r
    }

    fn holder_spec(&self) -> Option<HolderSpec<T>> {
        // Unit-norm subgradients differ by at most 2.
        Some(HolderSpec::single(T::zero(), T::lit(2.0)))
    }

    fn name(&self) -> &str {
        "euclidean norm"
    }
}

pub fn make_abs_oracle<T: Scalar>(dim: usize) -> SubgradientOracle<T> {
    SubgradientOracle::new(AbsNorm { dim })
}
