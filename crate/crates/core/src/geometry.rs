//! Strict coordinate-wise dominance and the sums/distances built on it.
//!
//! `a ≺ b` means `a[j] < b[j]` for every coordinate `j`. Equal coordinates
//! never dominate, so ties are always resolved as incomparable.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A point with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("a point needs at least one coordinate"));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(invalid(format!("non-finite coordinate {c}")));
        }
        Ok(Point(coords))
    }

    /// The point `(g/d, ..., g/d)`, whose coordinate sum is `g`.
    pub fn diagonal(d: usize, g: f64) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dimension must be positive"));
        }
        Point::new(vec![g / d as f64; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn plus_sum(&self) -> f64 {
        plus_sum(&self.0)
    }

    pub fn strictly_dominates(&self, other: &Point) -> Result<bool> {
        check_dims(self.dim(), other.dim())?;
        Ok(precedes(&self.0, &other.0))
    }

    pub fn l1_dist(&self, other: &Point) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(l1(&self.0, &other.0))
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `a ≺ b`: every coordinate of `a` is strictly smaller. Slices must have
/// equal length; use [`strictly_dominates`] for a checked version.
#[inline]
pub fn precedes(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).all(|(x, y)| x < y)
}

/// Checked `a ≺ b`.
pub fn strictly_dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    check_dims(a.len(), b.len())?;
    Ok(precedes(a, b))
}

#[inline]
pub fn plus_sum(a: &[f64]) -> f64 {
    a.iter().sum()
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn l1_dist(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    Ok(l1(a, b))
}
