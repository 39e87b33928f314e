//! Piecewise-affine cutting-plane model and its regularized minimization.
//!
//! The model subproblem `min_x max_i ℓᵢ(x) + ‖x − y‖²/(2η)` is solved through its dual
//! over the probability simplex,
//!
//! ```text
//! max_λ  D(λ) = Σ λᵢ cᵢ − (η/2)‖Σ λᵢ gᵢ‖²,   cᵢ = f(xᵢ) + ⟨gᵢ, y − xᵢ⟩,
//! ```
//!
//! with primal recovery `x(λ) = y − η Σ λᵢ gᵢ`. For every feasible `λ` the model is
//! bounded below by the quadratic `D(λ) + ‖x − x(λ)‖²/(2η)`, so `D(λ)` is a certified
//! lower bound and the duality gap is exactly the Frank–Wolfe gap of the dual.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dist_sq, dot, norm_sq};
use crate::problems::SubgradientOracle;
use crate::scalar::Scalar;

const PARALLEL_GRADIENT_WORK: usize = 1 << 18;
const GRADIENT_CHUNK: usize = 512;

/// Affine minorant `value + ⟨slope, x − point⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cut<T> {
    pub point: Vec<T>,
    pub value: T,
    pub slope: Vec<T>,
}

impl<T: Scalar> Cut<T> {
    pub fn eval(&self, x: &[T]) -> T {
        self.value + self.point.iter().zip(&self.slope).zip(x).fold(T::zero(), |acc, ((&p, &g), &xi)| {
            acc + g * (xi - p)
        })
    }
}

/// Solution of the regularized model subproblem with its dual certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelMin<T> {
    pub minimizer: Vec<T>,
    /// Dual value `D(λ)`, a lower bound on the model subproblem optimum.
    pub model_optimum: T,
    pub dual_weights: Vec<T>,
    pub dual_gap: T,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualSolverOptions {
    pub max_iters: usize,
}

impl Default for DualSolverOptions {
    fn default() -> Self {
        Self { max_iters: 10_000 }
    }
}

/// Bundle of cuts around a fixed prox center.
#[derive(Clone, Debug)]
pub struct CutModel<T> {
    cuts: Vec<Cut<T>>,
    center: Vec<T>,
    eta: T,
    /// `cᵢ = value + ⟨slope, center − point⟩`
    offsets: Vec<T>,
    /// Slopes stored row-major for the dual gradient.
    slopes: Vec<T>,
    warm: Vec<T>,
    max_slope_norm: T,
    options: DualSolverOptions,
}

#[derive(Serialize)]
struct ModelDump<'a, T> {
    cuts: &'a [Cut<T>],
    center: &'a [T],
    eta: T,
}

impl<T: Scalar> CutModel<T> {
    pub fn new(center: Vec<T>, eta: T) -> Result<Self> {
        if !(eta > T::zero()) || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
        }
        Ok(Self {
            cuts: Vec::new(),
            center,
            eta,
            offsets: Vec::new(),
            slopes: Vec::new(),
            warm: Vec::new(),
            max_slope_norm: T::zero(),
            options: DualSolverOptions::default(),
        })
    }

    pub fn with_options(mut self, options: DualSolverOptions) -> Self {
        self.options = options;
        self
    }

    pub fn cuts(&self) -> &[Cut<T>] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn center(&self) -> &[T] {
        &self.center
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn push_cut(&mut self, cut: Cut<T>) -> Result<()> {
        let d = self.dim();
        for len in [cut.point.len(), cut.slope.len()] {
            if len != d {
                return Err(Error::DimensionMismatch { expected: d, found: len });
            }
        }
        self.offsets.push(cut.eval(&self.center));
        self.max_slope_norm = self.max_slope_norm.max(norm_sq(&cut.slope).sqrt());
        self.slopes.extend_from_slice(&cut.slope);
        self.cuts.push(cut);
        self.warm.push(T::zero());
        Ok(())
    }

    /// Evaluates the oracle at `x` and adds the resulting cut. All earlier cuts are kept.
    pub fn add_cut_at(&mut self, oracle: &SubgradientOracle<T>, x: &[T]) -> Result<()> {
        let e = oracle.eval(x)?;
        self.push_cut(Cut {
            point: x.to_vec(),
            value: e.value,
            slope: e.subgradient,
        })
    }

    /// `max_i ℓᵢ(x)`; the first maximal cut wins ties.
    pub fn model_value(&self, x: &[T]) -> Result<T> {
        Ok(self.cuts[self.active_cut(x)?].eval(x))
    }

    pub fn active_cut(&self, x: &[T]) -> Result<usize> {
        if self.cuts.is_empty() {
            return Err(Error::InvalidParameter("empty cutting-plane model".into()));
        }
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let mut best = 0;
        let mut best_v = self.cuts[0].eval(x);
        for (i, c) in self.cuts.iter().enumerate().skip(1) {
            let v = c.eval(x);
            if v > best_v {
                best = i;
                best_v = v;
            }
        }
        Ok(best)
    }

    /// Regularized model `f_j(x) + ‖x − center‖²/(2η)`.
    pub fn regularized_value(&self, x: &[T]) -> Result<T> {
        Ok(self.model_value(x)? + dist_sq(x, &self.center) / (T::lit(2.0) * self.eta))
    }

    /// Dual value `D(λ)` for weights on the simplex.
    pub fn dual_value(&self, weights: &[T]) -> T {
        let s = self.aggregate(weights);
        dot(weights, &self.offsets) - self.eta * T::lit(0.5) * norm_sq(&s)
    }

    fn slope(&self, i: usize) -> &[T] {
        let d = self.dim();
        &self.slopes[i * d..(i + 1) * d]
    }

    fn slope_rows(&self) -> std::slice::ChunksExact<'_, T> {
        self.slopes.chunks_exact(self.dim().max(1))
    }

    fn aggregate(&self, weights: &[T]) -> Vec<T> {
        let mut s = vec![T::zero(); self.dim()];
        for (w, g) in weights.iter().zip(self.slope_rows()) {
            if *w != T::zero() {
                axpy(*w, g, &mut s);
            }
        }
        s
    }

    /// `∇φ(λ) = η Gᵀs − c` for `φ = −D` and `s = Gλ`.
    fn dual_gradient(&self, s: &[T], out: &mut [T]) {
        let d = self.dim().max(1);
        let eta = self.eta;
        if out.len() * d >= PARALLEL_GRADIENT_WORK {
            out.par_chunks_mut(GRADIENT_CHUNK)
                .zip(self.slopes.par_chunks(GRADIENT_CHUNK * d))
                .zip(self.offsets.par_chunks(GRADIENT_CHUNK))
                .for_each(|((o, g), c)| {
                    for ((oi, gi), &ci) in o.iter_mut().zip(g.chunks_exact(d)).zip(c) {
                        *oi = eta * dot(gi, s) - ci;
                    }
                });
        } else {
            for ((o, g), &c) in out.iter_mut().zip(self.slope_rows()).zip(&self.offsets) {
                *o = eta * dot(g, s) - c;
            }
        }
    }

    /// Solves the model subproblem to `dual_gap ≤ gap_tol`, warm-started from the previous
    /// solution (new cuts start at weight 0). Updates the stored warm start.
    pub fn minimize(&mut self, gap_tol: T) -> Result<ModelMin<T>> {
        let min = self.solve_dual(gap_tol)?;
        self.warm.clone_from(&min.dual_weights);
        Ok(min)
    }

    fn solve_dual(&self, gap_tol: T) -> Result<ModelMin<T>> {
        if self.cuts.is_empty() {
            return Err(Error::InvalidParameter("empty cutting-plane model".into()));
        }
        if !(gap_tol > T::zero()) {
            return Err(Error::InvalidParameter(format!("gap tolerance must be positive, got {gap_tol}")));
        }
        let m = self.cuts.len();
        let eta = self.eta;

        let mut lambda = vec![T::zero(); m];
        let warm_sum: T = self.warm.iter().copied().filter(|&w| w > T::zero()).sum();
        let mut corral = None;
        if warm_sum > T::zero() {
            let support: Vec<usize> = (0..self.warm.len()).filter(|&i| self.warm[i] > T::zero()).collect();
            for &i in &support {
                lambda[i] = self.warm[i] / warm_sum;
            }
            corral = Corral::build(self, &support, &lambda);
            if corral.is_none() {
                lambda.iter_mut().for_each(|l| *l = T::zero());
            }
        }
        let mut corral = match corral {
            Some(c) => c,
            None => {
                // Best single cut: maximizes cᵢ − (η/2)‖gᵢ‖².
                let mut best = 0;
                let mut best_v = T::neg_infinity();
                for (i, &c) in self.offsets.iter().enumerate() {
                    let v = c - eta * T::lit(0.5) * norm_sq(self.slope(i));
                    if v > best_v {
                        best = i;
                        best_v = v;
                    }
                }
                lambda[best] = T::one();
                Corral::build(self, &[best], &lambda).expect("a single column is independent")
            }
        };

        let mut grad = vec![T::zero(); m];
        let mut s = self.aggregate(&lambda);
        self.dual_gradient(&s, &mut grad);
        let mut gap = frank_wolfe_gap(&lambda, &grad);
        let mut iters = 0;
        let mut stalls = 0;
        while gap > gap_tol {
            if stalls > 0 && gap <= self.rounding_floor(&s) {
                // The dual value is still a valid lower bound; only the arithmetic
                // prevents a tighter certificate.
                break;
            }
            if iters >= self.options.max_iters || stalls > 1 {
                return Err(Error::DualNotConverged {
                    gap: gap.as_f64(),
                    tol: gap_tol.as_f64(),
                    iters,
                });
            }
            iters += 1;
            let entering = argmin(&grad);
            if corral.idx.contains(&entering) {
                // Only rounding can bring us here: refactor from scratch and retry once.
                stalls += 1;
                let support = corral.idx.clone();
                match Corral::build(self, &support, &lambda) {
                    Some(c) => corral = c,
                    None => {
                        return Err(Error::DualNotConverged {
                            gap: gap.as_f64(),
                            tol: gap_tol.as_f64(),
                            iters,
                        })
                    }
                }
            } else {
                self.enter(&mut corral, &mut lambda, entering);
            }
            self.minor_cycles(&mut corral, &mut lambda);
            s = self.aggregate(&lambda);
            self.dual_gradient(&s, &mut grad);
            gap = frank_wolfe_gap(&lambda, &grad);
        }

        let minimizer: Vec<T> = self
            .center
            .iter()
            .zip(&s)
            .map(|(&y, &si)| y - eta * si)
            .collect();
        let model_optimum = dot(&lambda, &self.offsets) - eta * T::lit(0.5) * norm_sq(&s);
        // Regularized model value at the minimizer is −min ∇φ + (η/2)‖s‖², so the
        // primal-dual gap coincides with the Frank–Wolfe gap.
        let dual_gap = gap.max(T::zero());
        Ok(ModelMin {
            minimizer,
            model_optimum,
            dual_weights: lambda,
            dual_gap,
            iterations: iters,
        })
    }

    /// Gap attainable in floating point given the magnitudes entering the dual gradient.
    fn rounding_floor(&self, s: &[T]) -> T {
        let c_scale = self.offsets.iter().fold(T::zero(), |acc, &c| acc.max(c.abs()));
        T::epsilon()
            * T::lit(1024.0)
            * (c_scale + self.eta * self.max_slope_norm * norm_sq(s).sqrt() + T::one())
    }

    /// Adds `k` (weight 0) to the corral. If its slope is affinely dependent on the
    /// current ones, `Gλ` is constant along the exchange direction, so weight is shifted
    /// onto `k` until some other weight vanishes and that index leaves first.
    fn enter(&self, corral: &mut Corral<T>, lambda: &mut [T], k: usize) {
        loop {
            let Some(w) = corral.push(self, k) else { return };
            let mut tau = T::infinity();
            let mut hit = 0;
            for (p, (&i, &wi)) in corral.idx.iter().zip(&w).enumerate() {
                if wi > T::zero() && lambda[i] / wi < tau {
                    tau = lambda[i] / wi;
                    hit = p;
                }
            }
            if !tau.is_finite() {
                return;
            }
            for (&i, &wi) in corral.idx.iter().zip(&w) {
                lambda[i] = (lambda[i] - tau * wi).max(T::zero());
            }
            lambda[k] += tau;
            lambda[corral.idx[hit]] = T::zero();
            corral.remove(hit);
        }
    }

    /// Minor cycles: moves `lambda` to the minimizer of the dual over the affine hull of
    /// the corral, dropping indices whenever that minimizer leaves the simplex.
    fn minor_cycles(&self, corral: &mut Corral<T>, lambda: &mut [T]) {
        loop {
            let target = corral.affine_minimizer(self);
            if target.iter().all(|&t| t > T::zero()) {
                for (&i, &t) in corral.idx.iter().zip(&target) {
                    lambda[i] = t;
                }
                renormalize(lambda, &corral.idx);
                return;
            }
            // Walk toward the target until the first weight hits zero.
            let mut tau = T::one();
            let mut hit = 0;
            for (p, (&i, &t)) in corral.idx.iter().zip(&target).enumerate() {
                if t <= T::zero() {
                    let denom = lambda[i] - t;
                    if denom > T::zero() && lambda[i] / denom <= tau {
                        tau = lambda[i] / denom;
                        hit = p;
                    }
                }
            }
            for (&i, &t) in corral.idx.iter().zip(&target) {
                lambda[i] = (lambda[i] + tau * (t - lambda[i])).max(T::zero());
            }
            lambda[corral.idx[hit]] = T::zero();
            corral.remove(hit);
            let mut p = 0;
            while p < corral.idx.len() {
                if lambda[corral.idx[p]] > T::zero() {
                    p += 1;
                } else {
                    corral.remove(p);
                }
            }
            renormalize(lambda, &corral.idx);
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelDump {
            cuts: &self.cuts,
            center: &self.center,
            eta: self.eta,
        })?)
    }
}

fn argmin<T: Scalar>(v: &[T]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = i;
        }
    }
    best
}

fn renormalize<T: Scalar>(lambda: &mut [T], support: &[usize]) {
    let total: T = support.iter().map(|&i| lambda[i]).sum();
    if total > T::zero() {
        for &i in support {
            lambda[i] /= total;
        }
    }
}

/// Thin QR factorization of the lifted columns `aᵢ = (gᵢ − ḡ, ρ)` for the indices in the
/// corral. The lifted columns are linearly independent exactly when the slopes are
/// affinely independent, and on `Σλ = 1` the dual objective equals
/// `(η/2)‖Aλ‖² − Σλᵢ(cᵢ − η⟨ḡ, gᵢ⟩)` up to a constant. Centering at the current
/// aggregate `ḡ` keeps the rank test on the scale of the slope differences.
#[derive(Clone, Debug)]
struct Corral<T> {
    idx: Vec<usize>,
    reference: Vec<T>,
    lift: T,
    /// Orthonormal columns of length `d + 1`.
    q: Vec<Vec<T>>,
    /// Column `j` holds `R[0..=j, j]`.
    r: Vec<Vec<T>>,
}

impl<T: Scalar> Corral<T> {
    fn build(model: &CutModel<T>, support: &[usize], lambda: &[T]) -> Option<Self> {
        let mut reference = vec![T::zero(); model.dim()];
        for &i in support {
            axpy(lambda[i], model.slope(i), &mut reference);
        }
        let spread = |rows: &mut dyn Iterator<Item = &[T]>| {
            rows.map(|g| dist_sq(g, &reference)).fold(T::zero(), T::max).sqrt()
        };
        let mut lift = spread(&mut support.iter().map(|&i| model.slope(i)));
        if lift == T::zero() {
            lift = spread(&mut model.slope_rows());
        }
        if lift == T::zero() {
            lift = T::one();
        }
        let mut c = Self {
            idx: Vec::with_capacity(support.len()),
            reference,
            lift,
            q: Vec::with_capacity(support.len()),
            r: Vec::with_capacity(support.len()),
        };
        for &i in support {
            if c.push(model, i).is_some() {
                return None;
            }
        }
        Some(c)
    }

    fn column(&self, model: &CutModel<T>, i: usize) -> Vec<T> {
        let mut a: Vec<T> = model.slope(i).iter().zip(&self.reference).map(|(&g, &r)| g - r).collect();
        a.push(self.lift);
        a
    }

    /// Appends column `i`. On numerical dependence nothing changes and the coefficients
    /// `w` with `A w = aᵢ` (so `Σw = 1`) are returned.
    fn push(&mut self, model: &CutModel<T>, i: usize) -> Option<Vec<T>> {
        let a = self.column(model, i);
        let mut v = a.clone();
        let mut coef = vec![T::zero(); self.q.len()];
        for _ in 0..2 {
            for (c, qj) in coef.iter_mut().zip(&self.q) {
                let proj = dot(qj, &v);
                *c += proj;
                axpy(-proj, qj, &mut v);
            }
        }
        let nv = norm_sq(&v).sqrt();
        let tol = T::epsilon().sqrt() * T::lit(16.0) * norm_sq(&a).sqrt();
        if nv <= tol {
            return Some(self.back_substitute(&coef));
        }
        v.iter_mut().for_each(|x| *x /= nv);
        coef.push(nv);
        self.q.push(v);
        self.r.push(coef);
        self.idx.push(i);
        None
    }

    /// Drops the column at position `p`, restoring triangularity with Givens rotations.
    fn remove(&mut self, p: usize) {
        self.idx.remove(p);
        self.r.remove(p);
        for j in p..self.r.len() {
            let (a, b) = (self.r[j][j], self.r[j][j + 1]);
            let h = a.hypot(b);
            let (c, s) = if h > T::zero() { (a / h, b / h) } else { (T::one(), T::zero()) };
            for col in &mut self.r[j..] {
                let (x, y) = (col[j], col[j + 1]);
                col[j] = c * x + s * y;
                col[j + 1] = c * y - s * x;
            }
            self.r[j].pop();
            let (left, right) = self.q.split_at_mut(j + 1);
            for (x, y) in left[j].iter_mut().zip(right[0].iter_mut()) {
                let (u, w) = (*x, *y);
                *x = c * u + s * w;
                *y = c * w - s * u;
            }
        }
        self.q.pop();
    }

    /// Solves `R x = b`.
    fn back_substitute(&self, b: &[T]) -> Vec<T> {
        let n = b.len();
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            x[i] /= self.r[i][i];
            let xi = x[i];
            for (k, xk) in x.iter_mut().enumerate().take(i) {
                *xk -= self.r[i][k] * xi;
            }
        }
        x
    }

    /// Solves `AᵀA x = b`.
    fn normal_solve(&self, b: &[T]) -> Vec<T> {
        let n = b.len();
        let mut z = vec![T::zero(); n];
        for i in 0..n {
            let col = &self.r[i];
            let mut acc = b[i];
            for (k, &zk) in z.iter().enumerate().take(i) {
                acc -= col[k] * zk;
            }
            z[i] = acc / col[i];
        }
        self.back_substitute(&z)
    }

    /// `AᵀA x = b` with one step of iterative refinement against the explicit columns.
    fn refined_solve(&self, model: &CutModel<T>, b: &[T]) -> Vec<T> {
        let mut x = self.normal_solve(b);
        let cols: Vec<Vec<T>> = self.idx.iter().map(|&i| self.column(model, i)).collect();
        let mut ax = vec![T::zero(); model.dim() + 1];
        for (col, &xi) in cols.iter().zip(&x) {
            axpy(xi, col, &mut ax);
        }
        let resid: Vec<T> = b.iter().zip(&cols).map(|(&bi, col)| bi - dot(col, &ax)).collect();
        for (xi, c) in x.iter_mut().zip(self.normal_solve(&resid)) {
            *xi += c;
        }
        x
    }

    /// Minimizer of `φ(λ) = (η/2)‖Gλ‖² − cᵀλ` over `{Σλ = 1}` restricted to the corral:
    /// `λ = u + νv` with `AᵀA u = c/η`, `AᵀA v = 1`.
    fn affine_minimizer(&self, model: &CutModel<T>) -> Vec<T> {
        if self.idx.len() == 1 {
            return vec![T::one()];
        }
        let shifted: Vec<T> = self
            .idx
            .iter()
            .map(|&i| model.offsets[i] / model.eta - dot(model.slope(i), &self.reference))
            .collect();
        let c_max = shifted.iter().copied().fold(T::neg_infinity(), T::max);
        let rhs: Vec<T> = shifted.iter().map(|&c| c - c_max).collect();
        let u = self.refined_solve(model, &rhs);
        let v = self.refined_solve(model, &vec![T::one(); self.idx.len()]);
        let v_sum: T = v.iter().copied().sum();
        let nu = (T::one() - u.iter().copied().sum::<T>()) / v_sum;
        let mut lambda: Vec<T> = u.iter().zip(&v).map(|(&ui, &vi)| ui + nu * vi).collect();
        // `u + νv` cancels, so polish against the exact support gradient: a correction
        // `δ` with `Σδ = 0` and `ηAᵀAδ = −∇φ_S + const` removes the residual.
        for _ in 0..2 {
            let mut s = vec![T::zero(); model.dim()];
            for (&i, &l) in self.idx.iter().zip(&lambda) {
                axpy(l, model.slope(i), &mut s);
            }
            let resid: Vec<T> = self
                .idx
                .iter()
                .map(|&i| (model.offsets[i] - model.eta * dot(model.slope(i), &s)) / model.eta)
                .collect();
            let du = self.refined_solve(model, &resid);
            let dnu = -du.iter().copied().sum::<T>() / v_sum;
            for ((l, &a), &b) in lambda.iter_mut().zip(&du).zip(&v) {
                *l += a + dnu * b;
            }
        }
        lambda
    }
}

/// `max_i(−∇φ)ᵢ − ⟨λ, −∇φ⟩`
fn frank_wolfe_gap<T: Scalar>(lambda: &[T], grad: &[T]) -> T {
    let min_g = grad.iter().copied().fold(T::infinity(), T::min);
    dot(lambda, grad) - min_g
}

/// Returns the model after adding the cut `(x, f(x), f′(x))`.
pub fn append_cut<T: Scalar>(m: &CutModel<T>, oracle: &SubgradientOracle<T>, x: &[T]) -> Result<CutModel<T>> {
    let mut next = m.clone();
    next.add_cut_at(oracle, x)?;
    Ok(next)
}

pub fn model_value<T: Scalar>(m: &CutModel<T>, x: &[T]) -> Result<T> {
    m.model_value(x)
}

/// Solves the model subproblem from the model's stored warm start without mutating it.
pub fn minimize_model<T: Scalar>(m: &CutModel<T>, gap_tol: T) -> Result<ModelMin<T>> {
    m.solve_dual(gap_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_abs_oracle, make_qp_oracle, QpInstance};
    use crate::sampler::Rng;

    fn cut1(point: f64, value: f64, slope: f64) -> Cut<f64> {
        Cut {
            point: vec![point],
            value,
            slope: vec![slope],
        }
    }

    fn model1(center: f64, eta: f64, cuts: &[Cut<f64>]) -> CutModel<f64> {
        let mut m = CutModel::new(vec![center], eta).unwrap();
        for c in cuts {
            m.push_cut(c.clone()).unwrap();
        }
        m
    }

    #[test]
    fn model_value_examples() {
        let m = model1(0.0, 1.0, &[cut1(0.0, 0.0, 0.0)]);
        assert_eq!(m.model_value(&[7.0]).unwrap(), 0.0);
        let m = model1(0.0, 1.0, &[cut1(0.0, 0.0, 1.0), cut1(0.0, 0.0, -1.0)]);
        assert_eq!(m.model_value(&[2.0]).unwrap(), 2.0);
        let m = model1(0.0, 1.0, &[cut1(1.0, 1.0, 2.0), cut1(0.0, 0.0, -1.0)]);
        assert_eq!(m.model_value(&[0.5]).unwrap(), 0.0);
    }

    #[test]
    fn empty_model_and_mismatch_errors() {
        let m = CutModel::<f64>::new(vec![0.0], 1.0).unwrap();
        assert!(m.model_value(&[0.0]).is_err());
        assert!(minimize_model(&m, 1e-9).is_err());
        let m = model1(0.0, 1.0, &[cut1(0.0, 0.0, 1.0)]);
        assert!(matches!(m.model_value(&[0.0, 1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(CutModel::<f64>::new(vec![0.0], 0.0).is_err());
    }

    #[test]
    fn first_maximal_cut_wins_ties() {
        let m = model1(0.0, 1.0, &[cut1(0.0, 1.0, 0.0), cut1(0.0, 1.0, 0.0)]);
        assert_eq!(m.active_cut(&[3.0]).unwrap(), 0);
    }

    #[test]
    fn single_cut_closed_form() {
        let (y, eta, fy, g) = (0.3, 0.7, 2.0, -1.5);
        let m = model1(y, eta, &[cut1(y, fy, g)]);
        let r = minimize_model(&m, 1e-12).unwrap();
        assert_eq!(r.dual_weights, vec![1.0]);
        assert!((r.minimizer[0] - (y - eta * g)).abs() < 1e-15);
        assert!((r.model_optimum - (fy - 0.5 * eta * g * g)).abs() < 1e-15);
    }

    #[test]
    fn zero_cut() {
        let m = model1(1.5, 2.0, &[cut1(0.0, 0.0, 0.0)]);
        let r = minimize_model(&m, 1e-12).unwrap();
        assert_eq!(r.minimizer, vec![1.5]);
        assert_eq!(r.model_optimum, 0.0);
    }

    #[test]
    fn abs_model_symmetric_weights() {
        let m = model1(0.0, 1.0, &[cut1(0.0, 0.0, 1.0), cut1(0.0, 0.0, -1.0)]);
        let r = minimize_model(&m, 1e-12).unwrap();
        assert!((r.dual_weights[0] - 0.5).abs() < 1e-9);
        assert!(r.minimizer[0].abs() < 1e-9);
        assert!(r.model_optimum.abs() < 1e-12);
        // grid brute force of |x| + x²/2
        let grid_min = (-2000..=2000)
            .map(|i| {
                let x = i as f64 * 1e-3;
                x.abs() + 0.5 * x * x
            })
            .fold(f64::INFINITY, f64::min);
        assert!(r.model_optimum <= grid_min + 1e-12);
    }

    #[test]
    fn duplicate_cut_is_redundant() {
        let o = make_abs_oracle::<f64>(2);
        let mut m = CutModel::new(vec![1.0, -2.0], 0.5).unwrap();
        m.add_cut_at(&o, &[1.0, -2.0]).unwrap();
        m.add_cut_at(&o, &[-1.0, 0.5]).unwrap();
        let a = minimize_model(&m, 1e-13).unwrap();
        let m2 = append_cut(&m, &o, &[-1.0, 0.5]).unwrap();
        assert_eq!(m2.len(), m.len() + 1);
        let b = minimize_model(&m2, 1e-13).unwrap();
        assert!((a.model_optimum - b.model_optimum).abs() < 1e-12);
        assert!(crate::linalg::dist(&a.minimizer, &b.minimizer) < 1e-6);
    }

    #[test]
    fn qp_model_minorizes_after_three_cuts() {
        let mut rng = Rng::new(21);
        let inst = QpInstance::<f64>::random(2, &mut rng);
        let o = make_qp_oracle(inst).unwrap();
        let mut m = CutModel::new(vec![0.0, 0.0], 1.0).unwrap();
        for _ in 0..3 {
            let x: Vec<f64> = rng.normal_vec(2);
            m = append_cut(&m, &o, &x).unwrap();
        }
        for _ in 0..100 {
            let x: Vec<f64> = rng.normal_vec(2);
            let fx = o.function().value(&x);
            assert!(m.model_value(&x).unwrap() <= fx + 1e-12);
        }
    }

    #[test]
    fn kkt_and_certificate_hold() {
        let mut rng = Rng::new(8);
        let o = make_abs_oracle::<f64>(3);
        let center: Vec<f64> = rng.normal_vec(3);
        let mut m = CutModel::new(center.clone(), 0.8).unwrap();
        for _ in 0..6 {
            let x: Vec<f64> = rng.normal_vec(3);
            m.add_cut_at(&o, &x).unwrap();
        }
        let tol = 1e-10;
        let r = m.minimize(tol).unwrap();
        let sum: f64 = r.dual_weights.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(r.dual_weights.iter().all(|&w| w >= 0.0));
        assert!(r.dual_gap <= tol);
        let mut s = vec![0.0; 3];
        for (w, c) in r.dual_weights.iter().zip(m.cuts()) {
            axpy(*w, &c.slope, &mut s);
        }
        for k in 0..3 {
            assert_eq!(r.minimizer[k], center[k] - 0.8 * s[k]);
        }
        // strong-convexity growth around the returned minimizer
        for _ in 0..200 {
            let x: Vec<f64> = rng.normal_vec(3);
            let lhs = m.regularized_value(&x).unwrap();
            let rhs = r.model_optimum + dist_sq(&x, &r.minimizer) / (2.0 * 0.8);
            assert!(lhs >= rhs - 1e-12);
        }
    }

    #[test]
    fn json_dump() {
        let m = model1(0.0, 1.0, &[cut1(0.0, 0.0, 1.0)]);
        let s = m.to_json().unwrap();
        assert!(s.contains("\"cuts\"") && s.contains("\"center\"") && s.contains("\"eta\""));
    }
}
