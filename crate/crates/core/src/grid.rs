//! Uniform transverse-momentum grids and complex fields sampled on them.

use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Square uniform grid of `n × n` sample points spanning
/// `center ± half_extent` on both axes (end points included).
///
/// Values on the grid are stored row-major: index `iy * n + ix`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseGrid {
    n: usize,
    half_extent: f64,
    center: Vec2,
}

impl TransverseGrid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(n_points_per_axis: usize, half_extent: f64, center: Vec2) -> Result<Self> {
        if n_points_per_axis < Self::MIN_POINTS || !n_points_per_axis.is_multiple_of(2) {
            return Err(Error::domain(
                "points per axis",
                "even and >= 8",
                n_points_per_axis as f64,
            ));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::domain("grid half extent", "positive", half_extent));
        }
        if !(center.x.is_finite() && center.y.is_finite()) {
            return Err(Error::domain("grid center", "finite", f64::NAN));
        }
        Ok(TransverseGrid {
            n: n_points_per_axis,
            half_extent,
            center,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / (self.n - 1) as f64
    }

    /// Area element `spacing²` of the midpoint rule.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    #[inline]
    pub fn axis_x(&self, ix: usize) -> f64 {
        self.center.x - self.half_extent + ix as f64 * self.spacing()
    }

    #[inline]
    pub fn axis_y(&self, iy: usize) -> f64 {
        self.center.y - self.half_extent + iy as f64 * self.spacing()
    }

    #[inline]
    pub fn point(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(self.axis_x(ix), self.axis_y(iy))
    }

    #[inline]
    pub fn point_at(&self, index: usize) -> Vec2 {
        self.point(index % self.n, index / self.n)
    }

    pub fn points(&self) -> impl Iterator<Item = Vec2> + '_ {
        (0..self.len()).map(move |i| self.point_at(i))
    }

    /// Same grid mirrored through the origin. Sample `(ix, iy)` of the
    /// mirror sits at minus sample `(n-1-ix, n-1-iy)` of `self`.
    pub fn reflected(&self) -> Self {
        TransverseGrid {
            center: -self.center,
            ..*self
        }
    }

    /// Equal geometry within a relative tolerance.
    pub fn approx_eq(&self, other: &TransverseGrid) -> bool {
        let scale = self.half_extent.max(other.half_extent);
        self.n == other.n
            && (self.half_extent - other.half_extent).abs() <= 1e-12 * scale
            && (self.center - other.center).norm() <= 1e-12 * scale.max(self.center.norm())
    }

    /// Index box of the samples whose coordinates fall within the square
    /// `q ± radius`. Possibly empty.
    pub fn window(&self, q: Vec2, radius: f64) -> IndexBox {
        let h = self.spacing();
        let range = |lo: f64, hi: f64, origin: f64| -> Range<usize> {
            let a = ((lo - origin) / h).ceil().max(0.0);
            let b = ((hi - origin) / h).floor() + 1.0;
            let b = b.min(self.n as f64);
            if b <= a {
                0..0
            } else {
                a as usize..b as usize
            }
        };
        let x0 = self.center.x - self.half_extent;
        let y0 = self.center.y - self.half_extent;
        IndexBox {
            x: range(q.x - radius, q.x + radius, x0),
            y: range(q.y - radius, q.y + radius, y0),
        }
    }

    pub fn full_box(&self) -> IndexBox {
        IndexBox {
            x: 0..self.n,
            y: 0..self.n,
        }
    }
}

/// Rectangular block of grid indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexBox {
    pub x: Range<usize>,
    pub y: Range<usize>,
}

impl IndexBox {
    pub fn intersect(&self, other: &IndexBox) -> IndexBox {
        let clamp = |a: &Range<usize>, b: &Range<usize>| {
            let lo = a.start.max(b.start);
            let hi = a.end.min(b.end);
            if hi <= lo {
                0..0
            } else {
                lo..hi
            }
        };
        IndexBox {
            x: clamp(&self.x, &other.x),
            y: clamp(&self.y, &other.y),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty() || self.y.is_empty()
    }

    pub fn count(&self) -> usize {
        self.x.len() * self.y.len()
    }
}

/// Second central moments of an intensity distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: Vec2,
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl Moments {
    /// Eigenvalues of the covariance matrix, largest first.
    pub fn principal(&self) -> (f64, f64) {
        let tr = 0.5 * (self.xx + self.yy);
        let d = (0.25 * (self.xx - self.yy).powi(2) + self.xy * self.xy).sqrt();
        (tr + d, tr - d)
    }
}

/// Complex amplitude sampled on a [`TransverseGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: TransverseGrid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: TransverseGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "field has {} samples, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::domain("field sample", "finite", f64::NAN));
        }
        Ok(ComplexField { grid, values })
    }

    pub fn from_fn(grid: TransverseGrid, f: impl Fn(Vec2) -> Complex64) -> Self {
        let values = grid.points().map(f).collect();
        ComplexField { grid, values }
    }

    pub fn grid(&self) -> &TransverseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[iy * self.grid.n() + ix]
    }

    /// Discrete `∫|f|² d²k` with the midpoint rule.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `⟨self, other⟩ = Σ conj(self)·other·spacing²`.
    pub fn inner(&self, other: &ComplexField) -> Result<Complex64> {
        if !self.grid.approx_eq(&other.grid) {
            return Err(Error::GridMismatch(
                "inner product of fields on different grids".into(),
            ));
        }
        let sum: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(sum * self.grid.cell_area())
    }

    /// Unit discrete L2 norm copy.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::ZeroMode("cannot normalize an all-zero field".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        ComplexField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Point reflection `f(k) → f(−k)` onto [`TransverseGrid::reflected`].
    pub fn reflected(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        ComplexField {
            grid: self.grid.reflected(),
            values,
        }
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Bounding box of samples with `|f| >= rel_threshold · max|f|`.
    pub fn significant_box(&self, rel_threshold: f64) -> Option<IndexBox> {
        let peak = self.max_abs();
        if peak <= 0.0 {
            return None;
        }
        let cut = rel_threshold * peak;
        let n = self.grid.n();
        let (mut x0, mut x1, mut y0, mut y1) = (n, 0, n, 0);
        for (i, v) in self.values.iter().enumerate() {
            if v.norm() >= cut {
                let (ix, iy) = (i % n, i / n);
                x0 = x0.min(ix);
                x1 = x1.max(ix);
                y0 = y0.min(iy);
                y1 = y1.max(iy);
            }
        }
        Some(IndexBox {
            x: x0..x1 + 1,
            y: y0..y1 + 1,
        })
    }

    /// Fraction of `∫|f|²` carried by the outermost ring of samples.
    pub fn edge_fraction(&self) -> f64 {
        let n = self.grid.n();
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        if total <= 0.0 {
            return 0.0;
        }
        let edge: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let (ix, iy) = (i % n, i / n);
                ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1
            })
            .map(|(_, v)| v.norm_sqr())
            .sum();
        edge / total
    }

    /// Centroid and second central moments of `|f|²`.
    pub fn moments(&self) -> Result<Moments> {
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        if !(total > 0.0) {
            return Err(Error::ZeroMode("moments of an all-zero field".into()));
        }
        let mut mean = Vec2::ZERO;
        for (i, v) in self.values.iter().enumerate() {
            mean += self.grid.point_at(i) * (v.norm_sqr() / total);
        }
        let (mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0);
        for (i, v) in self.values.iter().enumerate() {
            let d = self.grid.point_at(i) - mean;
            let w = v.norm_sqr() / total;
            xx += w * d.x * d.x;
            yy += w * d.y * d.y;
            xy += w * d.x * d.y;
        }
        Ok(Moments { mean, xx, yy, xy })
    }
}
