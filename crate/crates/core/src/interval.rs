//! Closed intervals on the real line, used for density domains and windows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::domain(format!(
                "interval bounds must be finite with lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    /// Interval restricted to strictly positive values, as required for
    /// density domains.
    pub fn positive(lo: f64, hi: f64) -> Result<Self> {
        if lo <= 0.0 {
            return Err(Error::domain(format!(
                "density interval must satisfy 0 < lo < hi, got [{lo}, {hi}]"
            )));
        }
        Self::new(lo, hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Geometric mean of the endpoints; the anchor point for quadrature-based
    /// antiderivatives on positive domains.
    pub fn geometric_mean(&self) -> f64 {
        (self.lo * self.hi).sqrt()
    }

    /// `n` evenly spaced samples including both endpoints.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        if n == 0 {
            return Vec::new();
        }
        if n == 1 {
            return vec![self.midpoint()];
        }
        let step = self.width() / (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n).map(|i| self.lo + step * i as f64).collect();
        // keep the endpoints bit-exact
        pts[0] = self.lo;
        pts[n - 1] = self.hi;
        pts
    }

    /// `n` log-spaced samples (endpoints included); requires `lo > 0`.
    pub fn logspace(&self, n: usize) -> Vec<f64> {
        if n == 0 {
            return Vec::new();
        }
        if n == 1 {
            return vec![self.geometric_mean()];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let step = (b - a) / (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
        pts[0] = self.lo;
        pts[n - 1] = self.hi;
        pts
    }

    /// Log spacing when the endpoint ratio is large, linear otherwise.
    pub fn scan_grid(&self, n: usize) -> Vec<f64> {
        if self.lo > 0.0 && self.hi / self.lo > 100.0 {
            self.logspace(n)
        } else {
            self.linspace(n)
        }
    }
}
