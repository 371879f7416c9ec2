//! Finite weighted measure spaces and real-valued fields on them.
//!
//! A [`MeasureSpace`] is the point set `{0, .., n-1}` with a positive mass per
//! point. A [`Field`] is one finite real per point. All inner products and
//! norms of squared type are weighted by the masses.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct MeasureSpace {
    weights: Arc<[f64]>,
}

impl MeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySpace);
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::BadWeight { index, value });
        }
        Ok(Self {
            weights: weights.into(),
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, point: usize) -> f64 {
        self.weights[point]
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn same_as(&self, other: &MeasureSpace) -> bool {
        Arc::ptr_eq(&self.weights, &other.weights) || self.weights == other.weights
    }
}

impl fmt::Debug for MeasureSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureSpace")
            .field("weights", &&*self.weights)
            .finish()
    }
}

#[derive(Clone, PartialEq)]
pub struct Field {
    space: MeasureSpace,
    values: Vec<f64>,
}

impl Field {
    pub fn new(space: &MeasureSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: values.len(),
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index, value });
        }
        Ok(Self {
            space: space.clone(),
            values,
        })
    }

    pub fn constant(space: &MeasureSpace, c: f64) -> Self {
        assert!(c.is_finite(), "constant field must be finite");
        Self {
            space: space.clone(),
            values: vec![c; space.len()],
        }
    }

    pub fn zeros(space: &MeasureSpace) -> Self {
        Self::constant(space, 0.0)
    }

    pub fn from_fn(space: &MeasureSpace, f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::new(space, (0..space.len()).map(f).collect())
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_same_space(&self, other: &Field) -> Result<()> {
        if self.space.same_as(&other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// Pointwise image under `f`. Panics if `f` produces a non-finite value.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Field {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Field {
            space: self.space.clone(),
            values,
        }
    }

    pub fn zip_with(&self, other: &Field, mut f: impl FnMut(f64, f64) -> f64) -> Result<Field> {
        self.check_same_space(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Field {
            space: self.space.clone(),
            values,
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }

    pub fn neg(&self) -> Field {
        self.map(|v| -v)
    }

    pub fn shift(&self, c: f64) -> Field {
        self.map(|v| v + c)
    }

    /// `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &Field, t: f64) -> Result<Field> {
        self.zip_with(other, |a, b| (1.0 - t) * a + t * b)
    }

    /// Weighted inner product `Σ m(x) f(x) g(x)`.
    pub fn dot(&self, other: &Field) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(self
            .space
            .weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(m, (a, b))| m * a * b)
            .sum())
    }

    pub fn l2_norm_squared(&self) -> f64 {
        self.space
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(m, v)| m * v * v)
            .sum()
    }

    /// `sqrt(Σ m(x) f(x)^2)`.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_squared().sqrt()
    }

    /// `max |f(x)|`, weights ignored.
    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Pointwise `self <= other`.
    pub fn leq(&self, other: &Field) -> Result<bool> {
        self.check_same_space(other)?;
        Ok(self.values.iter().zip(&other.values).all(|(a, b)| a <= b))
    }

    /// Largest amount by which `self` exceeds `other` anywhere (0 when ordered).
    pub fn order_violation(&self, other: &Field) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |acc, (a, b)| acc.max(a - b)))
    }

    pub fn linf_distance(&self, other: &Field) -> Result<f64> {
        Ok(self.sub(other)?.linf_norm())
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Field").field(&self.values).finish()
    }
}
