use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One Hölder term `L‖u − v‖^α` bounding subgradient variation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderComponent<T> {
    pub alpha: T,
    pub l: T,
}

/// `‖f′(u) − f′(v)‖ ≤ Σᵢ Lᵢ‖u − v‖^{αᵢ}`. A single component is plain Hölder
/// smoothness; several components describe a hybrid function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderSpec<T> {
    pub components: Vec<HolderComponent<T>>,
}

impl<T: Scalar> HolderSpec<T> {
    pub fn single(alpha: T, l: T) -> Self {
        Self {
            components: vec![HolderComponent { alpha, l }],
        }
    }

    pub fn new(components: Vec<HolderComponent<T>>) -> Result<Self> {
        let spec = Self { components };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidParameter("empty Hölder spec".into()));
        }
        for c in &self.components {
            if !(c.alpha >= T::zero() && c.alpha <= T::one()) {
                return Err(Error::InvalidParameter(format!(
                    "Hölder exponent {} outside [0, 1]",
                    c.alpha
                )));
            }
            if !(c.l >= T::zero()) || !c.l.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "Hölder constant {} must be finite and nonnegative",
                    c.l
                )));
            }
        }
        Ok(())
    }

    pub fn is_single(&self) -> bool {
        self.components.len() == 1
    }

    /// The only component of a single-term spec.
    pub fn single_component(&self) -> Result<HolderComponent<T>> {
        match self.components.as_slice() {
            [c] => Ok(*c),
            _ => Err(Error::InvalidParameter(format!(
                "expected a single Hölder component, found {}",
                self.components.len()
            ))),
        }
    }

    /// Right-hand side of the subgradient-variation bound at distance `r`.
    pub fn variation_bound(&self, r: T) -> T {
        self.components
            .iter()
            .map(|c| c.l * holder_pow(r, c.alpha))
            .sum()
    }

    /// Upper bound on `f(u) − f(v) − ⟨f′(v), u − v⟩` at distance `r`.
    pub fn descent_bound(&self, r: T) -> T {
        self.components
            .iter()
            .map(|c| c.l / (c.alpha + T::one()) * r.powf(c.alpha + T::one()))
            .sum()
    }

    /// `Σᵢ (1 − αᵢ)`
    pub fn nonsmoothness(&self) -> T {
        self.components.iter().map(|c| T::one() - c.alpha).sum()
    }
}

/// `r^α` with the convention `0⁰ = 1`.
#[inline]
pub(crate) fn holder_pow<T: Scalar>(r: T, alpha: T) -> T {
    if alpha == T::zero() {
        T::one()
    } else {
        r.powf(alpha)
    }
}
