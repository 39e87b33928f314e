use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problems::HolderSpec;
use crate::scalar::Scalar;

/// A convex function with a hand-coded subgradient.
pub trait ConvexFunction<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;

    /// Returns `f(x)` and writes one subgradient into `grad`.
    fn value_and_subgradient(&self, x: &[T], grad: &mut [T]) -> T;

    fn value(&self, x: &[T]) -> T {
        let mut g = vec![T::zero(); self.dim()];
        self.value_and_subgradient(x, &mut g)
    }

    /// Hölder constants, when known analytically.
    fn holder_spec(&self) -> Option<HolderSpec<T>> {
        None
    }

    fn name(&self) -> &str {
        "convex function"
    }
}

/// One oracle answer.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation<T> {
    pub value: T,
    pub subgradient: Vec<T>,
}

/// Counting first-order oracle. The counter is atomic so one oracle can be shared
/// by parallel workers.
pub struct SubgradientOracle<T: Scalar> {
    function: Arc<dyn ConvexFunction<T>>,
    calls: AtomicU64,
}

impl<T: Scalar> SubgradientOracle<T> {
    pub fn new<F: ConvexFunction<T> + 'static>(function: F) -> Self {
        Self::from_arc(Arc::new(function))
    }

    pub fn from_arc(function: Arc<dyn ConvexFunction<T>>) -> Self {
        Self {
            function,
            calls: AtomicU64::new(0),
        }
    }

    /// Fresh oracle over the same function with its own counter.
    pub fn fork(&self) -> Self {
        Self::from_arc(Arc::clone(&self.function))
    }

    pub fn dim(&self) -> usize {
        self.function.dim()
    }

    pub fn function(&self) -> &dyn ConvexFunction<T> {
        self.function.as_ref()
    }

    pub fn holder_spec(&self) -> Option<HolderSpec<T>> {
        self.function.holder_spec()
    }

    pub fn eval_count(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    fn check_dim(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[T]) -> Result<Evaluation<T>> {
        self.check_dim(x)?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        let mut subgradient = vec![T::zero(); x.len()];
        let value = self.function.value_and_subgradient(x, &mut subgradient);
        if !value.is_finite() || subgradient.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteOracle);
        }
        Ok(Evaluation { value, subgradient })
    }

    /// Function value only; still counts as one oracle call.
    pub fn value(&self, x: &[T]) -> Result<T> {
        self.check_dim(x)?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        let v = self.function.value(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteOracle);
        }
        Ok(v)
    }
}

impl<T: Scalar> fmt::Debug for SubgradientOracle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubgradientOracle")
            .field("function", &self.function.name())
            .field("dim", &self.dim())
            .field("calls", &self.eval_count())
            .finish()
    }
}
