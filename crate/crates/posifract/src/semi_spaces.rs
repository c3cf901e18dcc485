//! Elements and metrics of the semi-vector spaces over the nonnegative reals:
//! finite vectors, finitely supported sequences, and sampled functions on a
//! compact interval.
//!
//! All distances use the max–min form `max{a,b} - min{a,b}` rather than
//! `|a - b|`; the two agree bit-for-bit on nonnegative doubles, but the
//! max–min form is the one that stays inside the cone arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Exponent of an `ℓ_p`/`L_p` structure: a finite `p >= 1` or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::Parameter(format!(
                "exponent must satisfy p >= 1, got {p}"
            )));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// A vector with nonnegative entries: an element of the Euclidean
/// semi-vector space of its dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveVector {
    values: Vec<f64>,
}

impl PositiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("vector must have length >= 1".into()));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::Parameter(format!(
                    "entry {i} = {v} is not a finite nonnegative real"
                )));
            }
        }
        Ok(Self {
            values: values.into_iter().map(canonical_nonneg).collect(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Componentwise `alpha * self + beta * other`; scalars must be nonnegative.
    pub fn combine(&self, other: &Self, alpha: f64, beta: f64) -> Result<Self> {
        check_scalars(alpha, beta)?;
        if self.len() != other.len() {
            return Err(dimension_error(self.len(), other.len()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| canonical_nonneg(alpha * a + beta * b))
            .collect();
        Ok(Self { values })
    }
}

/// Euclidean norm `sqrt(sum x_i^2)` of a nonnegative vector.
pub fn euclidean_norm(x: &PositiveVector) -> f64 {
    x.values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Euclidean metric `sqrt(sum (M_i - m_i)^2)` with `m_i = min{x_i,y_i}`,
/// `M_i = max{x_i,y_i}`.
pub fn euclidean_metric(x: &PositiveVector, y: &PositiveVector) -> Result<f64> {
    if x.len() != y.len() {
        return Err(dimension_error(x.len(), y.len()));
    }
    let sum: f64 = x
        .values
        .iter()
        .zip(&y.values)
        .map(|(a, b)| {
            let d = a.max(*b) - a.min(*b);
            d * d
        })
        .sum();
    Ok(sum.sqrt())
}

/// Inner product `sum x_i y_i`; induces the Euclidean norm.
pub fn euclidean_inner(x: &PositiveVector, y: &PositiveVector) -> Result<f64> {
    if x.len() != y.len() {
        return Err(dimension_error(x.len(), y.len()));
    }
    Ok(x.values.iter().zip(&y.values).map(|(a, b)| a * b).sum())
}

/// A finitely supported map `ℕ -> ℝ₀⁺` tagged with its exponent.
/// Unstored indices are implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveSequence {
    values: BTreeMap<usize, f64>,
    p: Exponent,
}

impl PositiveSequence {
    pub fn new(entries: impl IntoIterator<Item = (usize, f64)>, p: Exponent) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, v) in entries {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Parameter(format!(
                    "sequence entry at index {i} = {v} is not a finite nonnegative real"
                )));
            }
            if v != 0.0 {
                values.insert(i, v);
            }
        }
        Ok(Self { values, p })
    }

    pub fn zero(p: Exponent) -> Self {
        Self {
            values: BTreeMap::new(),
            p,
        }
    }

    pub fn exponent(&self) -> Exponent {
        self.p
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values.get(&i).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().map(|(i, v)| (*i, *v))
    }
}

/// `ℓ_p` distance of two sequences sharing the same exponent:
/// `(sum (M_n - m_n)^p)^(1/p)` for finite `p`, `sup (M_n - m_n)` for `p = inf`.
pub fn lp_sequence_metric(a: &PositiveSequence, b: &PositiveSequence) -> Result<f64> {
    if a.p != b.p {
        return Err(Error::ExponentMismatch {
            left: a.p.to_string(),
            right: b.p.to_string(),
        });
    }
    // Union of supports in increasing index order; the summation order is
    // therefore fixed and results are deterministic.
    let mut indices: Vec<usize> = a.values.keys().chain(b.values.keys()).copied().collect();
    indices.sort_unstable();
    indices.dedup();
    match a.p {
        Exponent::Finite(p) => {
            let mut sum = 0.0;
            for i in indices {
                let (x, y) = (a.get(i), b.get(i));
                sum += (x.max(y) - x.min(y)).powf(p);
            }
            Ok(sum.powf(1.0 / p))
        }
        Exponent::Infinity => {
            let mut sup: f64 = 0.0;
            for i in indices {
                let (x, y) = (a.get(i), b.get(i));
                sup = sup.max(x.max(y) - x.min(y));
            }
            Ok(sup)
        }
    }
}

/// Whether a sampled function is a continuous-cone or measurable-cone element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContinuityClass {
    Continuous,
    Measurable,
}

/// A nonnegative function on `[x0, xn]` represented by samples on a uniform
/// grid, evaluated piecewise-linearly between adjacent samples. The common
/// element type of the continuous and p-integrable cones.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPositiveFunction {
    x0: f64,
    xn: f64,
    samples: Vec<f64>,
    continuity: ContinuityClass,
}

impl SampledPositiveFunction {
    pub fn new(domain: (f64, f64), samples: Vec<f64>, continuity: ContinuityClass) -> Result<Self> {
        let (x0, xn) = domain;
        if !x0.is_finite() || !xn.is_finite() || x0 < 0.0 {
            return Err(Error::Parameter(format!(
                "domain endpoints must be finite and nonnegative, got [{x0}, {xn}]"
            )));
        }
        if x0.is_nan() || xn.is_nan() || x0 >= xn {
            return Err(Error::Parameter(format!(
                "domain endpoints must be ordered, got [{x0}, {xn}]"
            )));
        }
        if samples.len() < 2 {
            return Err(Error::Parameter(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        for (k, s) in samples.iter().enumerate() {
            if !s.is_finite() || *s < 0.0 {
                return Err(Error::Parameter(format!(
                    "sample {k} = {s} is not a finite nonnegative real"
                )));
            }
        }
        Ok(Self {
            x0,
            xn,
            samples: samples.into_iter().map(canonical_nonneg).collect(),
            continuity,
        })
    }

    /// The constant function `c` on a degenerate two-point grid.
    pub fn constant(domain: (f64, f64), c: f64, continuity: ContinuityClass) -> Result<Self> {
        Self::new(domain, vec![c, c], continuity)
    }

    /// The zero function on an `n`-point grid.
    pub fn zero(domain: (f64, f64), n: usize, continuity: ContinuityClass) -> Result<Self> {
        Self::new(domain, vec![0.0; n], continuity)
    }

    /// Sample a closed-form function on an `n`-point grid.
    pub fn from_fn(
        domain: (f64, f64),
        n: usize,
        continuity: ContinuityClass,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!(
                "need at least 2 samples, got {n}"
            )));
        }
        let samples = (0..n)
            .map(|k| f(grid_point(domain, n, k)))
            .collect::<Vec<_>>();
        Self::new(domain, samples, continuity)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x0, self.xn)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn continuity(&self) -> ContinuityClass {
        self.continuity
    }

    /// Abscissa of the `k`-th sample.
    pub fn grid_x(&self, k: usize) -> f64 {
        grid_point((self.x0, self.xn), self.samples.len(), k)
    }

    /// Largest sample value (the grid sup norm).
    pub fn max_sample(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(*s))
    }

    /// Smallest sample value.
    pub fn min_sample(&self) -> f64 {
        self.samples.iter().fold(f64::INFINITY, |m, s| m.min(*s))
    }

    /// Piecewise-linear evaluation. Arguments outside the domain (which can
    /// arise from roundoff in map inversion) are clamped to the endpoints.
    pub fn eval(&self, x: f64) -> f64 {
        let (cell, t) = self.locate_cell(x);
        let a = self.samples[cell];
        let b = self.samples[cell + 1];
        a + t * (b - a)
    }

    /// Interpolation cell and local coordinate for `x`; exact at grid points.
    pub fn locate_cell(&self, x: f64) -> (usize, f64) {
        let n = self.samples.len();
        let pos = (x - self.x0) / (self.xn - self.x0) * (n - 1) as f64;
        if pos <= 0.0 {
            return (0, 0.0);
        }
        if pos >= (n - 1) as f64 {
            return (n - 2, 1.0);
        }
        let cell = pos as usize;
        (cell, pos - cell as f64)
    }

    /// Whether `other` shares this function's domain and grid size exactly.
    pub fn same_grid(&self, other: &Self) -> bool {
        self.x0 == other.x0 && self.xn == other.xn && self.samples.len() == other.samples.len()
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if !self.same_grid(other) {
            return Err(Error::Dimension(format!(
                "grids differ: [{}, {}] with {} samples vs [{}, {}] with {} samples",
                self.x0,
                self.xn,
                self.samples.len(),
                other.x0,
                other.xn,
                other.samples.len()
            )));
        }
        Ok(())
    }

    /// Serialize as `x,value` CSV with full-precision decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (k, s) in self.samples.iter().enumerate() {
            out.push_str(&format!("{:.16e},{:.16e}\n", self.grid_x(k), s));
        }
        out
    }
}

/// Abscissa of sample `k` on the uniform `n`-point grid over `domain`.
/// The endpoints are returned exactly; the interior formula can otherwise
/// round the last point past the domain.
pub fn grid_point(domain: (f64, f64), n: usize, k: usize) -> f64 {
    if k == 0 {
        domain.0
    } else if k == n - 1 {
        domain.1
    } else {
        domain.0 + k as f64 * (domain.1 - domain.0) / (n - 1) as f64
    }
}

/// Sup distance on the shared grid: `max_k (max{f_k,g_k} - min{f_k,g_k})`.
pub fn sup_metric(f: &SampledPositiveFunction, g: &SampledPositiveFunction) -> Result<f64> {
    f.check_same_grid(g)?;
    let mut sup: f64 = 0.0;
    for (a, b) in f.samples.iter().zip(&g.samples) {
        sup = sup.max(a.max(*b) - a.min(*b));
    }
    Ok(sup)
}

/// `L_p` distance via composite trapezoidal quadrature on the shared grid,
/// with the `1/p` root so the triangle inequality holds; `p = inf` reduces to
/// the grid sup.
pub fn lp_metric(
    f: &SampledPositiveFunction,
    g: &SampledPositiveFunction,
    p: Exponent,
) -> Result<f64> {
    match p {
        Exponent::Finite(p) => {
            let sum = lp_power_sum(f, g, p)?;
            Ok(sum.powf(1.0 / p))
        }
        Exponent::Infinity => sup_metric(f, g),
    }
}

/// The rootless `p`-th power sum `∫ (max - min)^p dt` (trapezoidal). This is
/// the gauge in which the `Σ ‖Dl_i · S_i^p‖_∞` contraction factor is the
/// Lipschitz constant of an RB operator, so the fixed-point iteration and the
/// sequence stability bounds are expressed in it.
pub fn lp_metric_unrooted(
    f: &SampledPositiveFunction,
    g: &SampledPositiveFunction,
    p: Exponent,
) -> Result<f64> {
    match p {
        Exponent::Finite(p) => lp_power_sum(f, g, p),
        Exponent::Infinity => sup_metric(f, g),
    }
}

fn lp_power_sum(f: &SampledPositiveFunction, g: &SampledPositiveFunction, p: f64) -> Result<f64> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::Parameter(format!(
            "exponent must satisfy p >= 1, got {p}"
        )));
    }
    f.check_same_grid(g)?;
    let n = f.samples.len();
    let h = (f.xn - f.x0) / (n - 1) as f64;
    // Deterministic left-to-right summation with half weights at the ends.
    let mut sum = 0.0;
    for k in 0..n {
        let (a, b) = (f.samples[k], g.samples[k]);
        let d = (a.max(b) - a.min(b)).powf(p);
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        sum += w * d;
    }
    Ok(sum * h)
}

/// Norm as distance to the zero function: grid sup for `p = inf`, rooted
/// `L_p` quadrature otherwise.
pub fn norm_from_zero(f: &SampledPositiveFunction, p: Exponent) -> f64 {
    let zero = SampledPositiveFunction {
        x0: f.x0,
        xn: f.xn,
        samples: vec![0.0; f.samples.len()],
        continuity: f.continuity,
    };
    match p {
        Exponent::Finite(_) => lp_metric(f, &zero, p).expect("grids match by construction"),
        Exponent::Infinity => sup_metric(f, &zero).expect("grids match by construction"),
    }
}

/// Pointwise `alpha * f + beta * g` over nonnegative scalars; closed in the cone.
pub fn combine(
    f: &SampledPositiveFunction,
    g: &SampledPositiveFunction,
    alpha: f64,
    beta: f64,
) -> Result<SampledPositiveFunction> {
    check_scalars(alpha, beta)?;
    f.check_same_grid(g)?;
    let samples = f
        .samples
        .iter()
        .zip(&g.samples)
        .map(|(a, b)| canonical_nonneg(alpha * a + beta * b))
        .collect();
    Ok(SampledPositiveFunction {
        x0: f.x0,
        xn: f.xn,
        samples,
        continuity: f.continuity,
    })
}

fn check_scalars(alpha: f64, beta: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 || !beta.is_finite() || beta < 0.0 {
        return Err(Error::Parameter(format!(
            "scalars must be finite and nonnegative, got alpha = {alpha}, beta = {beta}"
        )));
    }
    Ok(())
}

fn dimension_error(left: usize, right: usize) -> Error {
    Error::Dimension(format!("lengths differ: {left} vs {right}"))
}

// Normalizes -0.0 to +0.0 so bitwise comparisons of cone elements behave.
fn canonical_nonneg(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}
