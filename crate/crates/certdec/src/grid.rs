//! Parameter points and finite parameter grids.
//!
//! The parameter space is always represented as a finite, ordered grid of
//! points, so every supremum or infimum over it is an exact finite
//! maximum or minimum. Analytic shortcuts elsewhere in the crate are
//! checked against enumeration over these grids.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// A single parameter value: one real coordinate per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPoint {
    coords: Vec<f64>,
}

impl ParamPoint {
    /// Build a point, rejecting NaN and infinite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        for &c in &coords {
            if !c.is_finite() {
                return Err(Error::NonFinite {
                    context: "parameter coordinate",
                    value: c,
                });
            }
        }
        Ok(ParamPoint { coords })
    }

    /// Scalar point.
    pub fn scalar(value: f64) -> Result<Self> {
        Self::new(vec![value])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Coordinate by index; panics if out of range (grid and spec
    /// dimensions are validated before evaluation).
    pub fn coord(&self, i: usize) -> f64 {
        self.coords[i]
    }

    /// True when every coordinate lies in `[0, 1]`, the requirement for
    /// bounded-loss scenarios.
    pub fn in_unit_cube(&self) -> bool {
        self.coords.iter().all(|&c| (0.0..=1.0).contains(&c))
    }

    /// Bit-exact key for duplicate detection and table lookup.
    pub(crate) fn bit_key(&self) -> Vec<u64> {
        self.coords.iter().map(|c| c.to_bits()).collect()
    }

    pub(crate) fn display(&self) -> String {
        let inner: Vec<String> = self.coords.iter().map(|c| format!("{c}")).collect();
        format!("({})", inner.join(", "))
    }
}

/// An ordered, duplicate-free list of parameter points.
///
/// Empty grids are legal values (confidence sets may be empty) but must be
/// requested explicitly via [`ParamGrid::empty`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    points: Vec<ParamPoint>,
    label: String,
}

impl ParamGrid {
    /// Build a grid from points; rejects empty input, mixed dimensions and
    /// exact duplicates.
    pub fn new(label: impl Into<String>, points: Vec<ParamPoint>) -> Result<Self> {
        let label = label.into();
        if points.is_empty() {
            return Err(Error::invalid(format!(
                "grid `{label}` has no points; use ParamGrid::empty for an explicitly empty grid"
            )));
        }
        let dim = points[0].dim();
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
            if !seen.insert(p.bit_key()) {
                return Err(Error::invalid(format!(
                    "grid `{label}` contains duplicate point {}",
                    p.display()
                )));
            }
        }
        Ok(ParamGrid { points, label })
    }

    /// The explicitly empty grid.
    pub fn empty(label: impl Into<String>) -> Self {
        ParamGrid {
            points: Vec::new(),
            label: label.into(),
        }
    }

    /// `n` evenly spaced scalar points spanning `[lo, hi]`.
    pub fn linspace(label: impl Into<String>, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::invalid(format!(
                "linspace requires finite lo < hi and n >= 2 (got lo={lo}, hi={hi}, n={n})"
            )));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let points = (0..n)
            .map(|i| {
                let v = if i + 1 == n { hi } else { lo + step * i as f64 };
                ParamPoint::new(vec![v])
            })
            .collect::<Result<Vec<_>>>()?;
        ParamGrid::new(label, points)
    }

    /// Product grid over `[0, 1]^dims` with `per_dim` evenly spaced values
    /// in each coordinate.
    pub fn unit_cube(label: impl Into<String>, dims: usize, per_dim: usize) -> Result<Self> {
        if dims == 0 || per_dim < 2 {
            return Err(Error::invalid(format!(
                "unit cube grid requires dims >= 1 and per_dim >= 2 (got dims={dims}, per_dim={per_dim})"
            )));
        }
        let axis: Vec<f64> = (0..per_dim)
            .map(|i| i as f64 / (per_dim - 1) as f64)
            .collect();
        Self::product(label, &vec![axis; dims])
    }

    /// Product grid over arbitrary per-dimension coordinate lists.
    pub fn product(label: impl Into<String>, axes: &[Vec<f64>]) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(|a| a.is_empty()) {
            return Err(Error::invalid("product grid requires non-empty axes"));
        }
        let total: usize = axes.iter().map(|a| a.len()).product();
        let mut points = Vec::with_capacity(total);
        let dims = axes.len();
        let mut idx = vec![0usize; dims];
        loop {
            let coords: Vec<f64> = (0..dims).map(|d| axes[d][idx[d]]).collect();
            points.push(ParamPoint::new(coords)?);
            // odometer increment, last dimension fastest
            let mut d = dims;
            loop {
                if d == 0 {
                    return ParamGrid::new(label, points);
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < axes[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    pub fn points(&self) -> &[ParamPoint] {
        &self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(|p| p.dim())
    }

    /// Index of a point matching `p` bit-exactly, if present.
    pub fn position(&self, p: &ParamPoint) -> Option<usize> {
        let key = p.bit_key();
        self.points.iter().position(|q| q.bit_key() == key)
    }
}
