//! The iterated-function-system view of fractal functions: Hutchinson
//! operator, deterministic attractor iteration with resolution thinning,
//! Hausdorff-Pompeiu distance, and the graph IFS induced by an RB spec.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::ContractionFamily;
use crate::rb_core::{contraction_factor, validate_spec, RbForm, RbSpec};
use crate::semi_spaces::SampledPositiveFunction;

/// A finite nonempty point cloud standing in for a compact subset of the
/// plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<[f64; 2]>,
}

impl PointSet {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("point set must be nonempty".into()));
        }
        for p in &points {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(Error::Parameter(format!(
                    "point ({}, {}) is not finite",
                    p[0], p[1]
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Axis-aligned bounding box `[min_x, min_y, max_x, max_y]`.
    pub fn bbox(&self) -> [f64; 4] {
        let mut b = [
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        ];
        for p in &self.points {
            b[0] = b[0].min(p[0]);
            b[1] = b[1].min(p[1]);
            b[2] = b[2].max(p[0]);
            b[3] = b[3].max(p[1]);
        }
        b
    }

    /// Serialize as `x,y` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for p in &self.points {
            out.push_str(&format!("{:.16e},{:.16e}\n", p[0], p[1]));
        }
        out
    }
}

/// One point per grid sample of a function: `{(x_k, f(x_k))}`.
pub fn graph_of(f: &SampledPositiveFunction) -> PointSet {
    let points = (0..f.len())
        .map(|k| [f.grid_x(k), f.samples()[k]])
        .collect();
    PointSet { points }
}

/// Hausdorff-Pompeiu distance `max{d(S1, S2), d(S2, S1)}` of nonempty point
/// sets under the Euclidean plane metric, by exhaustive pairing.
pub fn hausdorff(s1: &PointSet, s2: &PointSet) -> Result<f64> {
    Ok(directed_sq(s1, s2).max(directed_sq(s2, s1)).sqrt())
}

fn directed_sq(from: &PointSet, to: &PointSet) -> f64 {
    let mut worst: f64 = 0.0;
    for p in &from.points {
        let mut best = f64::INFINITY;
        for q in &to.points {
            let dx = p[0] - q[0];
            let dy = p[1] - q[1];
            let d = dx * dx + dy * dy;
            if d < best {
                best = d;
            }
        }
        if best > worst {
            worst = best;
        }
    }
    worst
}

/// Hausdorff distance under an arbitrary plane metric; used by the
/// contractivity checks in the `d_theta` metric.
pub fn hausdorff_with(
    s1: &PointSet,
    s2: &PointSet,
    metric: impl Fn([f64; 2], [f64; 2]) -> f64,
) -> f64 {
    let directed = |from: &PointSet, to: &PointSet| {
        let mut worst: f64 = 0.0;
        for p in &from.points {
            let mut best = f64::INFINITY;
            for q in &to.points {
                best = best.min(metric(*p, *q));
            }
            worst = worst.max(best);
        }
        worst
    };
    directed(s1, s2).max(directed(s2, s1))
}

/// Map coefficients of one plane contraction `w_i(x, y) = (l_i(x), q_i(x) + S_i(x) y)`,
/// dumped for reproducibility.
#[derive(Debug, Clone, Serialize)]
pub struct MapCoefficients {
    pub slope: f64,
    pub translate: f64,
    pub q_samples: Vec<f64>,
    pub s_samples: Vec<f64>,
}

/// The graph IFS of an RB operator: plane maps `w_i(x, y) = (l_i(x), F_i(x, y))`
/// with `F_i(x, y) = q_i(x) + S_i(x) y`, contractive in the `d_theta` metric.
#[derive(Debug, Clone)]
pub struct GraphIfs {
    family: ContractionFamily,
    q: Vec<SampledPositiveFunction>,
    s: Vec<SampledPositiveFunction>,
    theta: f64,
    theta_fallback: bool,
    lipschitz_x: f64,
    vertical_contraction: f64,
    y_bound: f64,
}

impl GraphIfs {
    /// Build the graph IFS from a validated, contractive spec. For the C
    /// form the `q_i = f ∘ l_i - S_i · Lf` are derived on the germ's grid.
    pub fn from_spec(spec: &RbSpec) -> Result<Self> {
        let factor = contraction_factor(spec);
        if factor.is_nan() || factor >= 1.0 {
            return Err(Error::NotContractive { factor });
        }
        let report = validate_spec(spec);
        if !report.pass {
            return Err(Error::SpecInvalid(Box::new(report)));
        }
        let s_sup = spec.scaling().sup_norm_max();
        if s_sup.is_nan() || s_sup >= 1.0 {
            return Err(Error::Parameter(format!(
                "vertical contraction requires max_i ||S_i||_inf < 1, got {s_sup}"
            )));
        }

        let family = spec.family().clone();
        let s: Vec<SampledPositiveFunction> = spec.scaling().functions().to_vec();
        let q: Vec<SampledPositiveFunction> = match spec.form() {
            RbForm::Lp { q, .. } => q.clone(),
            RbForm::C { germ, operator } => {
                let lf = operator.apply(germ)?;
                let n = germ.len();
                let mut out = Vec::with_capacity(family.map_count());
                for i in 0..family.map_count() {
                    let mut samples = Vec::with_capacity(n);
                    for k in 0..n {
                        let x = germ.grid_x(k);
                        let v = germ.eval(family.apply(i, x))
                            - spec.scaling().function(i).eval(x) * lf.samples()[k];
                        if v < 0.0 {
                            return Err(Error::PositivityViolation { x, value: v });
                        }
                        samples.push(v);
                    }
                    out.push(SampledPositiveFunction::new(
                        germ.domain(),
                        samples,
                        germ.continuity(),
                    )?);
                }
                out
            }
        };

        // A priori bound on the attractor's vertical extent:
        // ||f*||_inf <= max_i ||q_i||_inf / (1 - s_sup).
        let q_max = q.iter().fold(0.0f64, |m, qi| m.max(qi.max_sample()));
        let y_bound = q_max / (1.0 - s_sup);

        // Lipschitz constant in x of the piecewise-linear F_i, attained at an
        // adjacent grid pair; F_i is affine in y, so probing the extreme
        // ordinates y = 0 and y = y_bound bounds the whole strip.
        let dom = family.domain();
        let probe = q[0].len().max(257);
        let mut lipschitz_x: f64 = 0.0;
        for i in 0..family.map_count() {
            for y in [0.0, y_bound] {
                let mut prev_x = dom.0;
                let mut prev_v = q[i].eval(prev_x) + s[i].eval(prev_x) * y;
                for k in 1..probe {
                    let x = crate::semi_spaces::grid_point(dom, probe, k);
                    let v = q[i].eval(x) + s[i].eval(x) * y;
                    lipschitz_x = lipschitz_x.max((v - prev_v).abs() / (x - prev_x));
                    prev_x = x;
                    prev_v = v;
                }
            }
        }

        let a = family.max_ratio();
        let (theta, theta_fallback) = if lipschitz_x > f64::MIN_POSITIVE {
            ((1.0 - a) / (2.0 * lipschitz_x), false)
        } else {
            (1.0, true)
        };

        Ok(Self {
            family,
            q,
            s,
            theta,
            theta_fallback,
            lipschitz_x,
            vertical_contraction: s_sup,
            y_bound,
        })
    }

    pub fn map_count(&self) -> usize {
        self.family.map_count()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn theta_fallback(&self) -> bool {
        self.theta_fallback
    }

    pub fn lipschitz_x(&self) -> f64 {
        self.lipschitz_x
    }

    pub fn y_bound(&self) -> f64 {
        self.y_bound
    }

    /// `max_i ||S_i||_inf` of the underlying scalings.
    pub fn vertical_contraction(&self) -> f64 {
        self.vertical_contraction
    }

    pub fn family(&self) -> &ContractionFamily {
        &self.family
    }

    pub fn map_point(&self, i: usize, p: [f64; 2]) -> [f64; 2] {
        let x = p[0].clamp(self.family.domain().0, self.family.domain().1);
        [
            self.family.apply(i, x),
            self.q[i].eval(x) + self.s[i].eval(x) * p[1],
        ]
    }

    /// `d_theta((x1,y1),(x2,y2)) = |x1-x2| + theta |y1-y2|`.
    pub fn d_theta(&self, p: [f64; 2], q: [f64; 2]) -> f64 {
        (p[0] - q[0]).abs() + self.theta * (p[1] - q[1]).abs()
    }

    /// Upper bound on the `d_theta` Lipschitz constant of map `i`:
    /// `max(a_i + theta L, s_i)`.
    pub fn map_lipschitz_dtheta(&self, i: usize) -> f64 {
        (self.family.derivative_sup(i) + self.theta * self.lipschitz_x).max(self.s[i].max_sample())
    }

    /// One Hutchinson step: the union of all map images, maps in index order.
    pub fn hutchinson_step(&self, set: &PointSet) -> PointSet {
        let mut points = Vec::with_capacity(self.map_count() * set.len());
        for i in 0..self.map_count() {
            for p in set.points() {
                points.push(self.map_point(i, *p));
            }
        }
        PointSet { points }
    }

    /// Default thinning resolution: `2^-12` of the working diameter (the
    /// bounding-box diagonal of the seed set united with the invariant box).
    pub fn default_resolution(&self, a0: &PointSet) -> f64 {
        let b = a0.bbox();
        let dom = self.family.domain();
        let min_x = b[0].min(dom.0);
        let min_y = b[1].min(0.0);
        let max_x = b[2].max(dom.1);
        let max_y = b[3].max(self.y_bound);
        let dx = max_x - min_x;
        let dy = max_y - min_y;
        (dx * dx + dy * dy).sqrt() / 4096.0
    }

    /// `k`-fold Hutchinson iteration with per-step snapping to a resolution
    /// grid and deduplication, which bounds memory at a quantified Hausdorff
    /// cost of at most `resolution/(1 - Lip)` in total.
    pub fn attractor(&self, a0: &PointSet, k: usize) -> Result<PointSet> {
        self.attractor_with_resolution(a0, k, self.default_resolution(a0))
    }

    pub fn attractor_with_resolution(
        &self,
        a0: &PointSet,
        k: usize,
        resolution: f64,
    ) -> Result<PointSet> {
        if k == 0 {
            return Err(Error::Parameter("iteration count k must be >= 1".into()));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::Parameter(format!(
                "thinning resolution must be positive, got {resolution}"
            )));
        }
        let mut current = a0.clone();
        for _ in 0..k {
            current = thin(&self.hutchinson_step(&current), resolution);
        }
        Ok(current)
    }

    /// Random-orbit rendering of the attractor (chaos game). Fast but only
    /// statistically close; rendering use only.
    pub fn chaos_game(&self, points: usize, seed: u64) -> Result<PointSet> {
        use rand::Rng;
        use rand::SeedableRng;
        if points == 0 {
            return Err(Error::Parameter("need at least one point".into()));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dom = self.family.domain();
        let mut p = [dom.0, self.q[0].eval(dom.0)];
        let burn_in = 64;
        let mut out = Vec::with_capacity(points);
        for step in 0..(points + burn_in) {
            let i = rng.random_range(0..self.map_count());
            p = self.map_point(i, p);
            if step >= burn_in {
                out.push(p);
            }
        }
        PointSet::new(out)
    }

    pub fn coefficients(&self) -> Vec<MapCoefficients> {
        (0..self.map_count())
            .map(|i| MapCoefficients {
                slope: self.family.map(i).slope(),
                translate: self.family.map(i).translate(),
                q_samples: self.q[i].samples().to_vec(),
                s_samples: self.s[i].samples().to_vec(),
            })
            .collect()
    }
}

/// Snap points to the resolution grid and deduplicate, keeping a sorted,
/// deterministic order.
fn thin(set: &PointSet, resolution: f64) -> PointSet {
    let mut snapped: Vec<(u64, u64)> = set
        .points()
        .iter()
        .map(|p| {
            let x = (p[0] / resolution).round() * resolution;
            let y = (p[1] / resolution).round() * resolution;
            (x.to_bits(), y.to_bits())
        })
        .collect();
    snapped.sort_unstable();
    snapped.dedup();
    PointSet {
        points: snapped
            .into_iter()
            .map(|(x, y)| [f64::from_bits(x), f64::from_bits(y)])
            .collect(),
    }
}
