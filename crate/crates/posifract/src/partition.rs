//! Knot sequences and the affine contractive injections that partition the
//! base interval into subintervals, one per map.
//!
//! Interval membership uses the half-open convention `[x_{i-1}, x_i)` with
//! the last interval closed, so every point of the domain belongs to exactly
//! one piece and `locate` is a function.

use crate::error::{Error, Result};

/// Strictly increasing nonnegative knots `x_0 < x_1 < ... < x_n` with at
/// least two interior-defining intervals (`n >= 2`).
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    knots: Vec<f64>,
}

impl KnotVector {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 3 {
            return Err(Error::Configuration(format!(
                "need at least 3 knots (2 intervals), got {}",
                knots.len()
            )));
        }
        if !knots[0].is_finite() || knots[0] < 0.0 {
            return Err(Error::Parameter(format!(
                "knots must be nonnegative, got x_0 = {}",
                knots[0]
            )));
        }
        for w in knots.windows(2) {
            if !w[1].is_finite() || w[0] >= w[1] {
                return Err(Error::Parameter(format!(
                    "knots must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of intervals (= number of maps).
    pub fn interval_count(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }
}

/// One affine contraction `l(x) = x_left + a (x - x_0)`, stored in anchored
/// form so that `l(x_0) = x_left` holds exactly in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    slope: f64,
    left: f64,
    origin: f64,
}

impl AffineMap {
    pub fn apply(&self, x: f64) -> f64 {
        self.left + self.slope * (x - self.origin)
    }

    pub fn invert(&self, y: f64) -> f64 {
        self.origin + (y - self.left) / self.slope
    }

    /// Contraction ratio `a = sup |Dl|`.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    /// The translate `b` of the classical form `l(x) = a x + b`.
    pub fn translate(&self) -> f64 {
        self.left - self.slope * self.origin
    }
}

/// The partition maps `l_i : [x_0, x_n] -> [x_{i-1}, x_i]` together with
/// their knots and derivative bounds. Maps are always derived from the knots
/// so the endpoint conditions `l_i(x_0) = x_{i-1}`, `l_i(x_n) = x_i` cannot
/// be violated.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionFamily {
    knots: KnotVector,
    maps: Vec<AffineMap>,
}

impl ContractionFamily {
    /// Solve the two endpoint conditions per interval for the affine
    /// coefficients.
    pub fn from_knots(knots: KnotVector) -> Self {
        let (x0, xn) = knots.domain();
        let span = xn - x0;
        let maps = knots
            .knots()
            .windows(2)
            .map(|w| AffineMap {
                slope: (w[1] - w[0]) / span,
                left: w[0],
                origin: x0,
            })
            .collect();
        Self { knots, maps }
    }

    pub fn knots(&self) -> &KnotVector {
        &self.knots
    }

    pub fn domain(&self) -> (f64, f64) {
        self.knots.domain()
    }

    pub fn map_count(&self) -> usize {
        self.maps.len()
    }

    pub fn map(&self, i: usize) -> &AffineMap {
        &self.maps[i]
    }

    /// `sup |Dl_i|`; for affine maps this is the slope.
    pub fn derivative_sup(&self, i: usize) -> f64 {
        self.maps[i].slope
    }

    /// Largest contraction ratio `a = max_i a_i`.
    pub fn max_ratio(&self) -> f64 {
        self.maps.iter().fold(0.0, |m, l| m.max(l.slope))
    }

    /// Index of the unique interval containing `x` under the half-open
    /// convention (last interval closed).
    pub fn locate(&self, x: f64) -> Result<usize> {
        let (x0, xn) = self.domain();
        if !(x >= x0 && x <= xn) {
            return Err(Error::Domain(format!(
                "x = {x} lies outside the interval [{x0}, {xn}]"
            )));
        }
        let i = self.knots.knots().partition_point(|k| *k <= x);
        // i counts knots <= x, so x in [x_{i-1}, x_i); clamp x = x_n into the
        // final closed interval.
        Ok(i.min(self.maps.len()) - 1)
    }

    pub fn apply(&self, i: usize, x: f64) -> f64 {
        self.maps[i].apply(x)
    }

    /// Inverse of map `i`; errors if `y` lies outside the image `[x_{i-1}, x_i]`.
    pub fn invert(&self, i: usize, y: f64) -> Result<f64> {
        let lo = self.knots.knots()[i];
        let hi = self.knots.knots()[i + 1];
        if !(y >= lo && y <= hi) {
            return Err(Error::Domain(format!(
                "y = {y} lies outside the image [{lo}, {hi}] of map {i}"
            )));
        }
        Ok(self.maps[i].invert(y))
    }
}
