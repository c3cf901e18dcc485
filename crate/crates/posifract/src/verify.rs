//! Property suites: metric axioms, contraction rates, the operator-norm
//! sandwich, semi-linearity, and sequence/series stability. Each suite is a
//! deterministic seeded run reporting per-property pass/fail with measured
//! slacks; the CLI `verify` command and the acceptance tests both route
//! through these functions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fractal_operator::{norm_sandwich_check, FractalTemplate, SemiLinearOperator};
use crate::ifs_attractor::{graph_of, hausdorff, GraphIfs, PointSet};
use crate::partition::{ContractionFamily, KnotVector};
use crate::rb_core::{
    apply_rb, contraction_factor, fixed_point, interpolation_check, validate_spec, RbForm, RbSpec,
    ScalingFamily,
};
use crate::semi_spaces::{
    combine, euclidean_metric, grid_point, lp_metric, lp_metric_unrooted, lp_sequence_metric,
    sup_metric, ContinuityClass, Exponent, PositiveSequence, PositiveVector,
    SampledPositiveFunction,
};
use crate::series::{fractal_sequence, fractal_series, MemberParams, ParameterSequence};

/// Suite names accepted by the CLI.
pub const SUITES: [&str; 5] = [
    "metrics",
    "contraction",
    "sandwich",
    "semilinearity",
    "series",
];

#[derive(Debug, Clone, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub pass: bool,
    /// The quantity the property constrains (worst case over the run).
    pub measured: f64,
    /// The bound it must satisfy.
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub properties: Vec<PropertyCheck>,
    pub pass: bool,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64, properties: Vec<PropertyCheck>) -> Self {
        let pass = properties.iter().all(|p| p.pass);
        Self {
            suite: suite.into(),
            seed,
            properties,
            pass,
        }
    }

    pub fn property(&self, name: &str) -> Option<&PropertyCheck> {
        self.properties.iter().find(|p| p.name == name)
    }
}

/// Run a named suite.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    match name {
        "metrics" => Ok(metrics_suite(seed)),
        "contraction" => Ok(contraction_suite(seed)),
        "sandwich" => Ok(sandwich_suite(seed)),
        "semilinearity" => Ok(semilinearity_suite(seed)),
        "series" => Ok(series_suite(seed)),
        other => Err(Error::Parameter(format!(
            "unknown suite '{other}'; expected one of {SUITES:?}"
        ))),
    }
}

fn check(name: &str, measured: f64, threshold: f64, detail: String) -> PropertyCheck {
    PropertyCheck {
        name: name.into(),
        pass: measured <= threshold,
        measured,
        threshold,
        detail,
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(stream),
    )
}

// ---------------------------------------------------------------------------
// random inputs
// ---------------------------------------------------------------------------

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> PositiveVector {
    PositiveVector::new((0..dim).map(|_| rng.random_range(0.0..10.0)).collect()).unwrap()
}

fn random_sequence(rng: &mut ChaCha8Rng, p: Exponent) -> PositiveSequence {
    let support = rng.random_range(0..6);
    PositiveSequence::new(
        (0..support).map(|_| (rng.random_range(0..12), rng.random_range(0.0..5.0))),
        p,
    )
    .unwrap()
}

fn random_samples(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// A smooth random function affinely normalized into `[lo, hi]` (both
/// attained, up to an ulp).
fn random_smooth(
    rng: &mut ChaCha8Rng,
    domain: (f64, f64),
    n: usize,
    lo: f64,
    hi: f64,
) -> SampledPositiveFunction {
    let coeffs: Vec<(f64, f64, f64)> = (1..=3)
        .map(|j| {
            (
                rng.random_range(0.1..1.0),
                j as f64 * std::f64::consts::PI,
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let raw: Vec<f64> = (0..n)
        .map(|k| {
            let tau = k as f64 / (n - 1) as f64;
            coeffs
                .iter()
                .map(|(c, freq, phase)| c * (freq * tau + phase).sin())
                .sum::<f64>()
        })
        .collect();
    let min = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let samples = if max > min {
        raw.iter()
            .map(|v| lo + (v - min) / (max - min) * (hi - lo))
            .collect()
    } else {
        vec![0.5 * (lo + hi); n]
    };
    SampledPositiveFunction::new(domain, samples, ContinuityClass::Continuous).unwrap()
}

/// A single-harmonic positive function with slope bounded by ~pi/2, for
/// residual checks whose bounds scale with the probe's Lipschitz constant.
fn bounded_slope_probe(
    rng: &mut ChaCha8Rng,
    domain: (f64, f64),
    n: usize,
) -> SampledPositiveFunction {
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let level = rng.random_range(1.0..1.5);
    SampledPositiveFunction::from_fn(domain, n, ContinuityClass::Continuous, |x| {
        let tau = (x - domain.0) / (domain.1 - domain.0);
        level + 0.25 * (std::f64::consts::TAU * tau + phase).sin()
    })
    .unwrap()
}

/// Knots placed exactly on the `grid`-point lattice over `[0, 1]`, so knot
/// evaluations carry no interpolation error.
fn random_knots_on_grid(rng: &mut ChaCha8Rng, grid: usize, intervals: usize) -> KnotVector {
    let dom = (0.0, 1.0);
    loop {
        let mut indices: Vec<usize> = rand::seq::index::sample(rng, grid - 2, intervals - 1)
            .into_iter()
            .map(|i| i + 1)
            .collect();
        indices.sort_unstable();
        indices.dedup();
        if indices.len() != intervals - 1 {
            continue;
        }
        let mut knots = vec![0.0];
        knots.extend(indices.iter().map(|i| grid_point(dom, grid, *i)));
        knots.push(1.0);
        // adjacent sampled indices can't collide after dedup
        return KnotVector::new(knots).unwrap();
    }
}

/// A random valid C-form spec with endpoint-affine operator: heterogeneous
/// sampled scalings with `S_inf = s_max`, and a germ lifted far enough above
/// zero that the derived q stay in the cone.
fn random_cform_spec(rng: &mut ChaCha8Rng, grid: usize, s_max: f64) -> RbSpec {
    let dom = (0.0, 1.0);
    let intervals = rng.random_range(2..=4);
    let family = ContractionFamily::from_knots(random_knots_on_grid(rng, grid, intervals));
    let scalings = (0..intervals)
        .map(|_| random_smooth(rng, dom, 33, 0.05 * s_max, s_max))
        .collect::<Vec<_>>();
    let scaling = ScalingFamily::new(scalings).unwrap();
    let shift = s_max / (1.0 - s_max) * 1.05 + 0.05;
    let base = random_smooth(rng, dom, grid, 0.0, 1.0);
    let germ = SampledPositiveFunction::new(
        dom,
        base.samples().iter().map(|v| v + shift).collect(),
        ContinuityClass::Continuous,
    )
    .unwrap();
    let spec = RbSpec::new(
        family,
        scaling,
        RbForm::C {
            germ,
            operator: SemiLinearOperator::EndpointAffine,
        },
    )
    .unwrap();
    debug_assert!(validate_spec(&spec).pass);
    spec
}

/// A random Lp-form spec whose discrete iteration contracts at exactly the
/// printed factor: uniform knots aligned with the grid (`grid - 1 = n^m`),
/// one shared constant scaling, constant q per interval. On such grids the
/// pullback of every grid point is again a grid point and the trapezoid mass
/// is transported exactly, so the per-step ratio equals the factor.
fn random_lp_ratio_spec(rng: &mut ChaCha8Rng) -> RbSpec {
    let dom = (0.0, 1.0);
    let (n, grid) = *[(2usize, 513usize), (4, 257), (8, 513)]
        .get(rng.random_range(0..3))
        .unwrap();
    let knots: Vec<f64> = (0..=n)
        .map(|i| grid_point(dom, grid, i * (grid - 1) / n))
        .collect();
    let family = ContractionFamily::from_knots(KnotVector::new(knots).unwrap());
    let p_int = rng.random_range(1..=2);
    let p = Exponent::finite(p_int as f64).unwrap();
    let s_cap: f64 = 0.9f64.powf(1.0 / p_int as f64);
    let s = rng.random_range(0.3..(s_cap * 0.999));
    let scaling = ScalingFamily::constants(dom, &vec![s; n]).unwrap();
    let mut values: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    // The left endpoint is the only grid-aligned pullback fixed point; at
    // the step where the pullback addresses collapse onto it, the iterate
    // difference keeps only the first interval's value. Putting the smallest
    // constant there keeps that step's mass ratio at or below one.
    let min_pos = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    values.swap(0, min_pos);
    let q = values
        .into_iter()
        .map(|c| {
            SampledPositiveFunction::from_fn(dom, grid, ContinuityClass::Measurable, |_| c).unwrap()
        })
        .collect();
    RbSpec::new(family, scaling, RbForm::Lp { q, p }).unwrap()
}

// ---------------------------------------------------------------------------
// metrics suite
// ---------------------------------------------------------------------------

/// Metric axioms for the four metrics on 1000 random triples each, plus the
/// bit-exact agreement of the max–min and absolute-difference forms.
pub fn metrics_suite(seed: u64) -> SuiteReport {
    let mut props = Vec::new();
    let triples = 1000;
    // Floating-point guard for the triangle inequality: the mathematical
    // inequality is strict of measure one, but summation roundoff can shave
    // a few ulps off the right-hand side.
    let fp_slack = 4.0 * f64::EPSILON;

    {
        let mut rng = rng_for(seed, 1);
        let mut max_excess: f64 = f64::NEG_INFINITY;
        let mut symmetric = true;
        let mut identity = true;
        for _ in 0..triples {
            let dim = rng.random_range(1..=6);
            let x = random_vector(&mut rng, dim);
            let y = random_vector(&mut rng, dim);
            let z = random_vector(&mut rng, dim);
            let dxy = euclidean_metric(&x, &y).unwrap();
            let dyx = euclidean_metric(&y, &x).unwrap();
            let dyz = euclidean_metric(&y, &z).unwrap();
            let dxz = euclidean_metric(&x, &z).unwrap();
            symmetric &= dxy.to_bits() == dyx.to_bits();
            identity &= euclidean_metric(&x, &x).unwrap() == 0.0;
            max_excess = max_excess.max(dxz - (dxy + dyz) * (1.0 + fp_slack));
        }
        props.push(check(
            "euclidean_axioms",
            if symmetric && identity {
                max_excess.max(0.0)
            } else {
                1.0
            },
            0.0,
            format!("{triples} triples; symmetry bitwise, triangle excess {max_excess:e}"),
        ));
    }

    {
        let mut rng = rng_for(seed, 2);
        let mut max_excess: f64 = f64::NEG_INFINITY;
        let mut symmetric = true;
        for _ in 0..triples {
            let p = match rng.random_range(0..3) {
                0 => Exponent::finite(1.0).unwrap(),
                1 => Exponent::finite(2.0).unwrap(),
                _ => Exponent::Infinity,
            };
            let a = random_sequence(&mut rng, p);
            let b = random_sequence(&mut rng, p);
            let c = random_sequence(&mut rng, p);
            let dab = lp_sequence_metric(&a, &b).unwrap();
            let dba = lp_sequence_metric(&b, &a).unwrap();
            let dbc = lp_sequence_metric(&b, &c).unwrap();
            let dac = lp_sequence_metric(&a, &c).unwrap();
            symmetric &= dab.to_bits() == dba.to_bits();
            max_excess = max_excess.max(dac - (dab + dbc) * (1.0 + fp_slack));
        }
        props.push(check(
            "lp_sequence_axioms",
            if symmetric { max_excess.max(0.0) } else { 1.0 },
            0.0,
            format!("{triples} triples over p in {{1, 2, inf}}; triangle excess {max_excess:e}"),
        ));
    }

    let dom = (0.0, 1.0);
    let n = 33;
    {
        let mut rng = rng_for(seed, 3);
        let mut max_excess: f64 = f64::NEG_INFINITY;
        let mut symmetric = true;
        for _ in 0..triples {
            let f = SampledPositiveFunction::new(
                dom,
                random_samples(&mut rng, n, 0.0, 4.0),
                ContinuityClass::Continuous,
            )
            .unwrap();
            let g = SampledPositiveFunction::new(
                dom,
                random_samples(&mut rng, n, 0.0, 4.0),
                ContinuityClass::Continuous,
            )
            .unwrap();
            let h = SampledPositiveFunction::new(
                dom,
                random_samples(&mut rng, n, 0.0, 4.0),
                ContinuityClass::Continuous,
            )
            .unwrap();
            let dfg = sup_metric(&f, &g).unwrap();
            let dgf = sup_metric(&g, &f).unwrap();
            let dgh = sup_metric(&g, &h).unwrap();
            let dfh = sup_metric(&f, &h).unwrap();
            symmetric &= dfg.to_bits() == dgf.to_bits();
            max_excess = max_excess.max(dfh - (dfg + dgh) * (1.0 + fp_slack));
        }
        props.push(check(
            "sup_metric_axioms",
            if symmetric { max_excess.max(0.0) } else { 1.0 },
            0.0,
            format!("{triples} triples; triangle excess {max_excess:e}"),
        ));
    }

    {
        let mut rng = rng_for(seed, 4);
        let mut max_excess: f64 = f64::NEG_INFINITY;
        let mut symmetric = true;
        for _ in 0..triples {
            let p = Exponent::finite(if rng.random_range(0..2) == 0 {
                1.0
            } else {
                2.0
            })
            .unwrap();
            let f = SampledPositiveFunction::new(
                dom,
                random_samples(&mut rng, n, 0.0, 4.0),
                ContinuityClass::Measurable,
            )
            .unwrap();
            let g = SampledPositiveFunction::new(
                dom,
                random_samples(&mut rng, n, 0.0, 4.0),
                ContinuityClass::Measurable,
            )
            .unwrap();
            let h = SampledPositiveFunction::new(
                dom,
                random_samples(&mut rng, n, 0.0, 4.0),
                ContinuityClass::Measurable,
            )
            .unwrap();
            let dfg = lp_metric(&f, &g, p).unwrap();
            let dgf = lp_metric(&g, &f, p).unwrap();
            let dgh = lp_metric(&g, &h, p).unwrap();
            let dfh = lp_metric(&f, &h, p).unwrap();
            symmetric &= dfg.to_bits() == dgf.to_bits();
            max_excess = max_excess.max(dfh - (dfg + dgh) * (1.0 + fp_slack));
        }
        props.push(check(
            "lp_metric_axioms",
            if symmetric { max_excess.max(0.0) } else { 1.0 },
            0.0,
            format!("{triples} triples, rooted quadrature metric; triangle excess {max_excess:e}"),
        ));
    }

    {
        // max–min equals the absolute difference bit-for-bit, componentwise
        // and after identical-order summation.
        let mut rng = rng_for(seed, 5);
        let mut all_equal = true;
        for _ in 0..triples {
            let a: f64 = rng.random_range(0.0..10.0);
            let b: f64 = rng.random_range(0.0..10.0);
            let maxmin = a.max(b) - a.min(b);
            all_equal &= maxmin.to_bits() == (a - b).abs().to_bits();
        }
        for _ in 0..200 {
            let dim = rng.random_range(1..=6);
            let x = random_vector(&mut rng, dim);
            let y = random_vector(&mut rng, dim);
            let viamaxmin = euclidean_metric(&x, &y).unwrap();
            let viaabs = x
                .values()
                .iter()
                .zip(y.values())
                .map(|(a, b)| {
                    let d = (a - b).abs();
                    d * d
                })
                .sum::<f64>()
                .sqrt();
            all_equal &= viamaxmin.to_bits() == viaabs.to_bits();
        }
        props.push(check(
            "maxmin_equals_abs_bitwise",
            if all_equal { 0.0 } else { 1.0 },
            0.0,
            "componentwise and metric-level bit equality".into(),
        ));
    }

    SuiteReport::new("metrics", seed, props)
}

// ---------------------------------------------------------------------------
// contraction suite
// ---------------------------------------------------------------------------

/// Contraction rates, the two-formula factor reduction, knot interpolation,
/// the worked dyadic value, and intrinsic positivity.
pub fn contraction_suite(seed: u64) -> SuiteReport {
    let mut props = Vec::new();
    let dom = (0.0, 1.0);
    let grid = 513;

    // 50 random C-form specs with S_inf up to 0.9: per-step ratios bounded
    // by the factor, knots interpolated, iterates in the cone.
    {
        let mut rng = rng_for(seed, 10);
        let mut max_ratio_excess: f64 = f64::NEG_INFINITY;
        let mut max_knot_err: f64 = 0.0;
        let mut min_iterate_sample: f64 = f64::INFINITY;
        let mut failures = String::new();
        for trial in 0..50 {
            let s_max = rng.random_range(0.15..0.9);
            let spec = random_cform_spec(&mut rng, grid, s_max);
            let g0 = SampledPositiveFunction::zero(dom, grid, ContinuityClass::Continuous).unwrap();
            match fixed_point(&spec, &g0, 1e-10, 800) {
                Ok(result) => {
                    let c = result.contraction_factor;
                    // the iterate samples carry rounding of a few ulps of
                    // their own magnitude, which is the floor below which
                    // step ratios stop carrying rate information
                    let floor = 32.0 * f64::EPSILON * result.fstar.max_sample();
                    for w in result.history.windows(2) {
                        max_ratio_excess = max_ratio_excess.max(w[1] - ((c + 1e-6) * w[0] + floor));
                    }
                    max_knot_err =
                        max_knot_err.max(interpolation_check(&spec, &result.fstar).unwrap());
                    min_iterate_sample = min_iterate_sample.min(result.fstar.min_sample());
                }
                Err(e) => failures.push_str(&format!("trial {trial}: {e}; ")),
            }
        }
        let ok = failures.is_empty();
        props.push(check(
            "cform_ratio_bound",
            if ok { max_ratio_excess.max(0.0) } else { 1.0 },
            0.0,
            format!("50 specs; worst history[k+1] - (factor+1e-6)·history[k] = {max_ratio_excess:e} {failures}"),
        ));
        props.push(check(
            "cform_knot_interpolation",
            max_knot_err,
            1e-8,
            format!("50 specs; worst |f*(x_j) - f(x_j)| = {max_knot_err:e}"),
        ));
        props.push(check(
            "cform_positive_iterates",
            -min_iterate_sample,
            0.0,
            format!("smallest sample over all fixed points: {min_iterate_sample:e}"),
        ));
    }

    // 50 Lp-form specs on measure-exact grids: ratios bounded by the
    // rootless-gauge factor.
    {
        let mut rng = rng_for(seed, 11);
        let mut max_ratio_excess: f64 = f64::NEG_INFINITY;
        let mut failures = String::new();
        for trial in 0..50 {
            let spec = random_lp_ratio_spec(&mut rng);
            let g0 =
                SampledPositiveFunction::zero(dom, spec.grid_size(), ContinuityClass::Measurable)
                    .unwrap();
            match fixed_point(&spec, &g0, 1e-10, 800) {
                Ok(result) => {
                    let c = result.contraction_factor;
                    let floor = 32.0 * f64::EPSILON * result.fstar.max_sample();
                    for w in result.history.windows(2) {
                        max_ratio_excess = max_ratio_excess.max(w[1] - ((c + 1e-6) * w[0] + floor));
                    }
                }
                Err(e) => failures.push_str(&format!("trial {trial}: {e}; ")),
            }
        }
        let ok = failures.is_empty();
        props.push(check(
            "lpform_ratio_bound",
            if ok { max_ratio_excess.max(0.0) } else { 1.0 },
            0.0,
            format!("50 specs; worst excess {max_ratio_excess:e} {failures}"),
        ));
    }

    // Factor reduction: for affine maps and a shared constant scaling the
    // summed formula collapses to max_i ||S_i^p||_inf, to 4 ulps.
    {
        let mut rng = rng_for(seed, 12);
        let mut worst_rel: f64 = 0.0;
        for _ in 0..100 {
            let intervals = rng.random_range(2..=4);
            let family =
                ContractionFamily::from_knots(random_knots_on_grid(&mut rng, 513, intervals));
            let s = rng.random_range(0.1..0.95);
            let scaling = ScalingFamily::constants(dom, &vec![s; intervals]).unwrap();
            let q: Vec<SampledPositiveFunction> = (0..intervals)
                .map(|_| {
                    SampledPositiveFunction::constant(dom, 1.0, ContinuityClass::Measurable)
                        .unwrap()
                })
                .collect();
            for p_int in [1.0, 2.0] {
                let spec = RbSpec::new(
                    family.clone(),
                    scaling.clone(),
                    RbForm::Lp {
                        q: q.clone(),
                        p: Exponent::finite(p_int).unwrap(),
                    },
                )
                .unwrap();
                let summed = contraction_factor(&spec);
                let reduced = s.powf(p_int);
                worst_rel = worst_rel.max((summed - reduced).abs() / reduced);
            }
            // sup-analog: the infinity form reduces to S_inf = s exactly
            let spec_inf = RbSpec::new(
                family.clone(),
                scaling.clone(),
                RbForm::Lp {
                    q: q.clone(),
                    p: Exponent::Infinity,
                },
            )
            .unwrap();
            worst_rel = worst_rel.max((contraction_factor(&spec_inf) - s).abs() / s);
        }
        props.push(check(
            "factor_reduction_4ulps",
            worst_rel,
            4.0 * f64::EPSILON,
            format!("100 draws, p in {{1, 2, sup-analog}}; worst relative gap {worst_rel:e}"),
        ));
    }

    // The worked dyadic value, checked against an independent scalar
    // recursion on the pullback chain (depth 40).
    {
        let spec = worked_example_spec(513);
        let g0 = SampledPositiveFunction::zero(dom, 513, ContinuityClass::Continuous).unwrap();
        let result = fixed_point(&spec, &g0, 1e-12, 200).unwrap();
        let oracle_quarter = dyadic_oracle(0.25, 40);
        let oracle_half = dyadic_oracle(0.5, 40);
        let err = (result.fstar.eval(0.25) - 0.9375)
            .abs()
            .max((result.fstar.eval(0.5) - 1.25).abs())
            .max((oracle_quarter - 0.9375).abs())
            .max((oracle_half - 1.25).abs());
        props.push(check(
            "worked_dyadic_values",
            err,
            1e-9,
            format!(
                "f*(0.25) = {}, oracle {oracle_quarter}; f*(0.5) = {}, oracle {oracle_half}",
                result.fstar.eval(0.25),
                result.fstar.eval(0.5)
            ),
        ));
    }

    // The square germ without the +1 lift leaves the cone and is rejected at
    // validation, naming the derived-q positivity check.
    {
        let family = ContractionFamily::from_knots(KnotVector::new(vec![0.0, 0.5, 1.0]).unwrap());
        let scaling = ScalingFamily::constants(dom, &[0.5, 0.5]).unwrap();
        let germ =
            SampledPositiveFunction::from_fn(dom, 513, ContinuityClass::Continuous, |x| x * x)
                .unwrap();
        let spec = RbSpec::new(
            family,
            scaling,
            RbForm::C {
                germ,
                operator: SemiLinearOperator::EndpointAffine,
            },
        )
        .unwrap();
        let report = validate_spec(&spec);
        let q_check = report.check("q_nonnegative");
        let rejected = !report.pass
            && q_check
                .map(|c| !c.pass && c.detail.contains("positive cone"))
                .unwrap_or(false);
        let g0 = SampledPositiveFunction::zero(dom, 513, ContinuityClass::Continuous).unwrap();
        let refused = matches!(
            fixed_point(&spec, &g0, 1e-10, 100),
            Err(Error::SpecInvalid(_))
        );
        props.push(check(
            "square_germ_rejected",
            if rejected && refused { 0.0 } else { 1.0 },
            0.0,
            format!(
                "validation verdict: {}; q check: {}",
                report.pass,
                q_check.map(|c| c.detail.clone()).unwrap_or_default()
            ),
        ));
    }

    SuiteReport::new("contraction", seed, props)
}

/// The worked spec: germ x^2 + 1 on [0, 1], knots (0, 1/2, 1), scalings 1/2,
/// endpoint-affine operator.
pub fn worked_example_spec(grid: usize) -> RbSpec {
    let family = ContractionFamily::from_knots(KnotVector::new(vec![0.0, 0.5, 1.0]).unwrap());
    let scaling = ScalingFamily::constants((0.0, 1.0), &[0.5, 0.5]).unwrap();
    let germ =
        SampledPositiveFunction::from_fn((0.0, 1.0), grid, ContinuityClass::Continuous, |x| {
            x * x + 1.0
        })
        .unwrap();
    RbSpec::new(
        family,
        scaling,
        RbForm::C {
            germ,
            operator: SemiLinearOperator::EndpointAffine,
        },
    )
    .unwrap()
}

/// Closed-form pullback recursion for the worked example; independent of the
/// grid machinery.
fn dyadic_oracle(x: f64, depth: usize) -> f64 {
    let f = |x: f64| x * x + 1.0;
    let lf = |x: f64| x + 1.0;
    if depth == 0 {
        return f(x);
    }
    let y = if x < 0.5 { 2.0 * x } else { 2.0 * x - 1.0 };
    f(x) + 0.5 * (dyadic_oracle(y, depth - 1) - lf(y))
}

// ---------------------------------------------------------------------------
// sandwich suite
// ---------------------------------------------------------------------------

/// The fixed sample set for operator-norm estimates: constants, shifted
/// monomials, and 20 seeded random piecewise-linear positive functions. All
/// are admissible germs for scalings up to `s_max` under the endpoint-affine
/// operator.
pub fn standard_sample_set(
    domain: (f64, f64),
    grid: usize,
    s_max: f64,
    seed: u64,
) -> Vec<(String, SampledPositiveFunction)> {
    let mut out = Vec::new();
    for c in [0.5, 1.0, 2.0] {
        out.push((
            format!("const_{c}"),
            SampledPositiveFunction::from_fn(domain, grid, ContinuityClass::Continuous, |_| c)
                .unwrap(),
        ));
    }
    // shift monomials so min f >= s_max * max f with a little headroom
    for k in 0..=4u32 {
        let max_raw = domain.1.powi(k as i32);
        let min_raw = domain.0.powi(k as i32);
        let shift = ((s_max * max_raw - min_raw) / (1.0 - s_max)).max(0.0) * 1.05 + 0.05;
        out.push((
            format!("monomial_{k}"),
            SampledPositiveFunction::from_fn(domain, grid, ContinuityClass::Continuous, |x| {
                x.powi(k as i32) + shift
            })
            .unwrap(),
        ));
    }
    let mut rng = rng_for(seed, 40);
    let lo = 1.2;
    let hi = lo / s_max.max(0.51) * 0.98;
    for j in 0..20 {
        out.push((
            format!("random_{j:02}"),
            SampledPositiveFunction::new(
                domain,
                random_samples(&mut rng, grid, lo, hi.max(lo + 0.1)),
                ContinuityClass::Continuous,
            )
            .unwrap(),
        ));
    }
    out
}

/// The raw norm-sandwich reports for the identity and endpoint-affine
/// operators on the fixed sample set (what the CLI dumps as JSON).
pub fn sandwich_reports(
    seed: u64,
) -> Result<Vec<(String, crate::fractal_operator::SandwichReport)>> {
    let dom = (0.0, 1.0);
    let grid = 257;
    let s = 0.5;
    let family = ContractionFamily::from_knots(KnotVector::new(vec![0.0, 0.5, 1.0]).unwrap());
    let samples = standard_sample_set(dom, grid, s, seed);
    let mut out = Vec::new();
    for (label, operator) in [
        ("identity", SemiLinearOperator::Identity),
        ("endpoint_affine", SemiLinearOperator::EndpointAffine),
    ] {
        let template = FractalTemplate {
            family: family.clone(),
            scaling: ScalingFamily::constants(dom, &[s, s]).unwrap(),
            operator,
            norm: Exponent::Infinity,
        };
        out.push((
            label.to_string(),
            norm_sandwich_check(&template, &samples, 1e-12, 400)?,
        ));
    }
    Ok(out)
}

/// Operator-norm sandwich for the identity and endpoint-affine operators on
/// the fixed sample set, plus the eigenfunction statement for the identity.
pub fn sandwich_suite(seed: u64) -> SuiteReport {
    let mut props = Vec::new();
    let dom = (0.0, 1.0);
    let grid = 257;
    let s = 0.5;
    let family = ContractionFamily::from_knots(KnotVector::new(vec![0.0, 0.5, 1.0]).unwrap());
    let samples = standard_sample_set(dom, grid, s, seed);
    let tol = 1e-12;

    for (label, operator) in [
        ("identity", SemiLinearOperator::Identity),
        ("endpoint_affine", SemiLinearOperator::EndpointAffine),
    ] {
        let template = FractalTemplate {
            family: family.clone(),
            scaling: ScalingFamily::constants(dom, &[s, s]).unwrap(),
            operator,
            norm: Exponent::Infinity,
        };
        match norm_sandwich_check(&template, &samples, tol, 400) {
            Ok(report) => {
                props.push(check(
                    &format!("sandwich_lower_{label}"),
                    1.0 - report.estimate,
                    1e-9,
                    format!("estimate {} >= 1 - 1e-9", report.estimate),
                ));
                props.push(check(
                    &format!("sandwich_upper_{label}"),
                    report.estimate - report.upper_bound,
                    1e-6,
                    format!(
                        "estimate {} vs 1 + S/(1-S)·||I-L|| = {}",
                        report.estimate, report.upper_bound
                    ),
                ));
                let worst = report
                    .per_function
                    .iter()
                    .map(|b| b.lhs - b.rhs)
                    .fold(f64::NEG_INFINITY, f64::max);
                props.push(check(
                    &format!("displacement_bound_{label}"),
                    worst.max(0.0),
                    0.0,
                    format!(
                        "{} samples; worst ||f(S)-f|| - bound = {worst:e}",
                        report.per_function.len()
                    ),
                ));
            }
            Err(e) => props.push(check(
                &format!("sandwich_{label}"),
                1.0,
                0.0,
                format!("failed: {e}"),
            )),
        }
    }

    // Identity-operator eigenfunction statement: every germ, in particular
    // the constant one, is fixed, so the empirical norm is exactly one.
    {
        let template = FractalTemplate {
            family,
            scaling: ScalingFamily::constants(dom, &[s, s]).unwrap(),
            operator: SemiLinearOperator::Identity,
            norm: Exponent::Infinity,
        };
        let one = SampledPositiveFunction::from_fn(dom, grid, ContinuityClass::Continuous, |_| 1.0)
            .unwrap();
        let fs = template.fractal_map(&one, tol, 100).unwrap().fstar;
        let gap = sup_metric(&fs, &one).unwrap();
        props.push(check(
            "identity_fixes_constant_one",
            gap,
            0.0,
            format!("sup distance of F^S(1) to 1: {gap:e}"),
        ));
    }

    SuiteReport::new("sandwich", seed, props)
}

// ---------------------------------------------------------------------------
// semilinearity suite
// ---------------------------------------------------------------------------

/// Semi-linearity of the operators and of the q-to-fixed-point map.
pub fn semilinearity_suite(seed: u64) -> SuiteReport {
    let mut props = Vec::new();
    let dom = (0.0, 1.0);

    // Additivity and nonnegative homogeneity of each built-in L.
    {
        let mut rng = rng_for(seed, 20);
        let grid = 65;
        let mut worst_rel: f64 = 0.0;
        for _ in 0..100 {
            let f = random_smooth(&mut rng, dom, grid, 0.1, 3.0);
            let g = random_smooth(&mut rng, dom, grid, 0.0, 2.0);
            let v = random_smooth(&mut rng, dom, grid, 0.0, 1.5);
            let lam = rng.random_range(0.0..3.0);
            for op in [
                SemiLinearOperator::Identity,
                SemiLinearOperator::EndpointAffine,
                SemiLinearOperator::Multiplier(v),
            ] {
                let sum = combine(&f, &g, 1.0, 1.0).unwrap();
                let l_sum = op.apply(&sum).unwrap();
                let sum_l =
                    combine(&op.apply(&f).unwrap(), &op.apply(&g).unwrap(), 1.0, 1.0).unwrap();
                for (a, b) in l_sum.samples().iter().zip(sum_l.samples()) {
                    worst_rel = worst_rel.max((a - b).abs() / (1.0 + a.abs()));
                }
                let scaled = combine(&f, &g, lam, 0.0).unwrap();
                let l_scaled = op.apply(&scaled).unwrap();
                let lf = op.apply(&f).unwrap();
                for (a, b) in l_scaled.samples().iter().zip(lf.samples()) {
                    worst_rel = worst_rel.max((a - lam * b).abs() / (1.0 + a.abs()));
                }
            }
        }
        props.push(check(
            "operator_semilinearity_ulps",
            worst_rel,
            8.0 * f64::EPSILON,
            format!("100 random pairs, 3 operator kinds; worst relative gap {worst_rel:e}"),
        ));
    }

    // The q-to-fixed-point map is semi-linear: additivity and scaling by
    // lambda in {0, 0.5, 2} on 25 random Lp pairs.
    {
        let mut rng = rng_for(seed, 21);
        let grid = 257;
        let tol = 1e-12;
        let solver_tol = 1e-14;
        let mut worst: f64 = 0.0;
        let mut failures = String::new();
        for trial in 0..25 {
            let intervals = rng.random_range(2..=3);
            let family =
                ContractionFamily::from_knots(random_knots_on_grid(&mut rng, grid, intervals));
            let p_int = rng.random_range(1..=2) as f64;
            let p = Exponent::finite(p_int).unwrap();
            let s_values: Vec<f64> = (0..intervals)
                .map(|_| rng.random_range(0.05..0.25f64.powf(1.0 / p_int)))
                .collect();
            let scaling = ScalingFamily::constants(dom, &s_values).unwrap();
            let q1: Vec<SampledPositiveFunction> = (0..intervals)
                .map(|_| random_smooth(&mut rng, dom, grid, 0.2, 2.0))
                .collect();
            let q2: Vec<SampledPositiveFunction> = (0..intervals)
                .map(|_| random_smooth(&mut rng, dom, grid, 0.1, 1.5))
                .collect();
            let solve = |q: Vec<SampledPositiveFunction>| -> Result<SampledPositiveFunction> {
                let spec = RbSpec::new(family.clone(), scaling.clone(), RbForm::Lp { q, p })?;
                let g0 = SampledPositiveFunction::zero(dom, grid, ContinuityClass::Measurable)?;
                Ok(fixed_point(&spec, &g0, solver_tol, 1000)?.fstar)
            };
            let run = || -> Result<f64> {
                let f1 = solve(q1.clone())?;
                let f2 = solve(q2.clone())?;
                let q_sum: Vec<_> = q1
                    .iter()
                    .zip(&q2)
                    .map(|(a, b)| combine(a, b, 1.0, 1.0).unwrap())
                    .collect();
                let f_sum = solve(q_sum)?;
                let additivity = lp_metric_unrooted(&f_sum, &combine(&f1, &f2, 1.0, 1.0)?, p)?;
                let mut worst_here = additivity;
                for lam in [0.0, 0.5, 2.0] {
                    let q_scaled: Vec<_> = q1
                        .iter()
                        .map(|a| combine(a, a, lam, 0.0).unwrap())
                        .collect();
                    let f_scaled = solve(q_scaled)?;
                    let expected = combine(&f1, &f1, lam, 0.0)?;
                    worst_here = worst_here.max(lp_metric_unrooted(&f_scaled, &expected, p)?);
                }
                Ok(worst_here)
            };
            match run() {
                Ok(w) => worst = worst.max(w),
                Err(e) => failures.push_str(&format!("trial {trial}: {e}; ")),
            }
        }
        let ok = failures.is_empty();
        props.push(check(
            "fixed_point_semilinearity",
            if ok { worst } else { 1.0 },
            10.0 * tol,
            format!("25 pairs, lambda in {{0, 0.5, 2}}; worst gauge gap {worst:e} {failures}"),
        ));
    }

    // Homogeneity of the fractal operator over nonnegative scalars.
    {
        let mut rng = rng_for(seed, 22);
        let grid = 257;
        let tol = 1e-12;
        let solver_tol = 1e-13;
        let mut worst: f64 = 0.0;
        let family = ContractionFamily::from_knots(KnotVector::new(vec![0.0, 0.5, 1.0]).unwrap());
        let template = FractalTemplate {
            family,
            scaling: ScalingFamily::constants(dom, &[0.4, 0.35]).unwrap(),
            operator: SemiLinearOperator::EndpointAffine,
            norm: Exponent::Infinity,
        };
        for _ in 0..10 {
            let base = random_smooth(&mut rng, dom, grid, 1.0, 2.0);
            let f_base = template.fractal_map(&base, solver_tol, 400).unwrap().fstar;
            for lam in [0.0, 0.5, 2.0] {
                let scaled_germ = combine(&base, &base, lam, 0.0).unwrap();
                if lam == 0.0 {
                    // zero germ fixes the zero function
                    let fs = template
                        .fractal_map(&scaled_germ, solver_tol, 400)
                        .unwrap()
                        .fstar;
                    worst = worst.max(fs.max_sample());
                    continue;
                }
                let fs = template
                    .fractal_map(&scaled_germ, solver_tol, 400)
                    .unwrap()
                    .fstar;
                let expected = combine(&f_base, &f_base, lam, 0.0).unwrap();
                worst = worst.max(sup_metric(&fs, &expected).unwrap());
            }
        }
        props.push(check(
            "fractal_operator_homogeneity",
            worst,
            10.0 * tol,
            format!("10 germs, lambda in {{0, 0.5, 2}}; worst sup gap {worst:e}"),
        ));
    }

    SuiteReport::new("semilinearity", seed, props)
}

// ---------------------------------------------------------------------------
// series suite
// ---------------------------------------------------------------------------

/// Stability of the geometric parameter sequence and Cauchy behavior of the
/// geometric series partial sums.
pub fn series_suite(seed: u64) -> SuiteReport {
    let mut props = Vec::new();
    let dom = (0.0, 1.0);
    let grid = 513;
    let p = Exponent::finite(1.0).unwrap();
    let tol = 1e-12;
    let mut rng = rng_for(seed, 30);

    let family = ContractionFamily::from_knots(KnotVector::new(vec![0.0, 0.5, 1.0]).unwrap());
    // Non-constant scalings leave genuine slack in the stability bound.
    let scaling = ScalingFamily::new(vec![
        random_smooth(&mut rng, dom, 65, 0.1, 0.3),
        random_smooth(&mut rng, dom, 65, 0.15, 0.35),
    ])
    .unwrap();
    let q: Vec<SampledPositiveFunction> = vec![
        random_smooth(&mut rng, dom, grid, 0.5, 2.0),
        random_smooth(&mut rng, dom, grid, 0.8, 1.8),
    ];

    // q_{m,i} = (1 - 2^-m) q_i, S fixed.
    {
        let members: Vec<MemberParams> = (1..=20)
            .map(|m| {
                let lam = 1.0 - (0.5f64).powi(m);
                MemberParams {
                    scaling: scaling.clone(),
                    q: q.iter()
                        .map(|qi| combine(qi, qi, lam, 0.0).unwrap())
                        .collect(),
                }
            })
            .collect();
        let ps = ParameterSequence {
            family: family.clone(),
            members,
            limit: MemberParams {
                scaling: scaling.clone(),
                q: q.clone(),
            },
            p,
        };
        match fractal_sequence(&ps, 20, tol, 600) {
            Ok((_, _, report)) => {
                let worst = report
                    .distances
                    .iter()
                    .zip(&report.bounds)
                    .map(|(d, b)| d - b)
                    .fold(f64::NEG_INFINITY, f64::max);
                props.push(check(
                    "stability_bound_20_members",
                    worst.max(0.0),
                    0.0,
                    format!("worst d(f_m, f) - bound = {worst:e}"),
                ));
                let lhs = report.distances[19];
                let rhs = (0.5f64).powi(19) * report.distances[0] / (1.0 - 0.5) + 10.0 * tol;
                props.push(check(
                    "tail_distance_m20",
                    lhs - rhs,
                    0.0,
                    format!("d(f_20, f) = {lhs:e} vs 2^-19 d(f_1, f)/(1 - 1/2) + 10 tol = {rhs:e}"),
                ));
                // monotone parameter convergence drives the distance profile
                // down: the last quarter stays below the first quarter
                let quarter = report.distances.len() / 4;
                let head_min = report.distances[..quarter]
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                let tail_max = report.distances[report.distances.len() - quarter..]
                    .iter()
                    .cloned()
                    .fold(0.0f64, f64::max);
                props.push(check(
                    "distance_profile_decays",
                    tail_max - head_min,
                    0.0,
                    format!("tail max {tail_max:e} vs head min {head_min:e}"),
                ));
            }
            Err(e) => props.push(check(
                "stability_bound_20_members",
                1.0,
                0.0,
                format!("failed: {e}"),
            )),
        }
    }

    // Geometric series with vanishing scalings: partial-sum fixed points are
    // Cauchy with step ratio 1/2.
    {
        let zero_scaling = ScalingFamily::constants(dom, &[0.0, 0.0]).unwrap();
        let terms: Vec<MemberParams> = (1..=20)
            .map(|k| MemberParams {
                scaling: zero_scaling.clone(),
                q: q.iter()
                    .map(|qi| combine(qi, qi, (0.5f64).powi(k), 0.0).unwrap())
                    .collect(),
            })
            .collect();
        match fractal_series(&family, &terms, 20, p, tol, 200) {
            Ok((_, report)) => {
                let worst = report
                    .cauchy_ratios
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                props.push(check(
                    "series_cauchy_ratio",
                    worst,
                    0.51,
                    format!("K = 20 partial sums; worst consecutive-step ratio {worst}"),
                ));
                let contractive = report.partial_factors.iter().all(|f| *f < 1.0);
                props.push(check(
                    "series_partial_factors",
                    if contractive { 0.0 } else { 1.0 },
                    0.0,
                    "every partial sum is contractive".into(),
                ));
            }
            Err(e) => props.push(check(
                "series_cauchy_ratio",
                1.0,
                0.0,
                format!("failed: {e}"),
            )),
        }
    }

    SuiteReport::new("series", seed, props)
}

// ---------------------------------------------------------------------------
// attractor equivalence (run by the acceptance suite and cmd_attractor)
// ---------------------------------------------------------------------------

/// Ten shipped example specs with mild scalings, used for the
/// graph-attractor equivalence runs.
pub fn example_specs() -> Vec<(String, RbSpec)> {
    let dom = (0.0, 1.0);
    let grid = 513;
    let mut specs: Vec<(String, RbSpec)> = Vec::new();

    let uniform2 = || ContractionFamily::from_knots(KnotVector::new(vec![0.0, 0.5, 1.0]).unwrap());
    let knots_quarter =
        || ContractionFamily::from_knots(KnotVector::new(vec![0.0, 0.25, 1.0]).unwrap());
    let uniform4 =
        || ContractionFamily::from_knots(KnotVector::new(vec![0.0, 0.25, 0.5, 0.75, 1.0]).unwrap());

    let cform = |name: &str,
                 family: ContractionFamily,
                 s: Vec<f64>,
                 germ: SampledPositiveFunction,
                 op: SemiLinearOperator| {
        (
            name.to_string(),
            RbSpec::new(
                family,
                ScalingFamily::constants(dom, &s).unwrap(),
                RbForm::C { germ, operator: op },
            )
            .unwrap(),
        )
    };

    // 1: diagonal (Lp, fixed point is the identity function)
    {
        let q = vec![
            SampledPositiveFunction::zero(dom, grid, ContinuityClass::Measurable).unwrap(),
            SampledPositiveFunction::from_fn(dom, grid, ContinuityClass::Measurable, |_| 0.5)
                .unwrap(),
        ];
        specs.push((
            "diagonal".into(),
            RbSpec::new(
                uniform2(),
                ScalingFamily::constants(dom, &[0.5, 0.5]).unwrap(),
                RbForm::Lp {
                    q,
                    p: Exponent::finite(1.0).unwrap(),
                },
            )
            .unwrap(),
        ));
    }
    // 2-4: C-form germs with mild constant scalings
    specs.push(cform(
        "parabola_mild",
        uniform2(),
        vec![0.3, 0.3],
        SampledPositiveFunction::from_fn(dom, grid, ContinuityClass::Continuous, |x| x * x + 1.0)
            .unwrap(),
        SemiLinearOperator::EndpointAffine,
    ));
    specs.push(cform(
        "cosine_bump",
        uniform2(),
        vec![0.25, 0.35],
        SampledPositiveFunction::from_fn(dom, grid, ContinuityClass::Continuous, |x| {
            1.5 + 0.5 * (std::f64::consts::PI * x).cos()
        })
        .unwrap(),
        SemiLinearOperator::EndpointAffine,
    ));
    specs.push(cform(
        "affine_germ",
        uniform2(),
        vec![0.4, 0.4],
        SampledPositiveFunction::from_fn(dom, grid, ContinuityClass::Continuous, |x| x + 1.0)
            .unwrap(),
        SemiLinearOperator::EndpointAffine,
    ));
    // 5: identity operator fixes the germ
    specs.push(cform(
        "identity_fixture",
        uniform2(),
        vec![0.5, 0.5],
        SampledPositiveFunction::from_fn(dom, grid, ContinuityClass::Continuous, |x| {
            2.0 + 0.5 * (2.0 * std::f64::consts::PI * x).sin()
        })
        .unwrap(),
        SemiLinearOperator::Identity,
    ));
    // 6: multiplier with unit endpoints keeps the join-up conditions
    {
        let v = SampledPositiveFunction::from_fn(dom, grid, ContinuityClass::Continuous, |x| {
            1.0 + 0.25 * x * (1.0 - x)
        })
        .unwrap();
        specs.push(cform(
            "multiplier_bump",
            uniform2(),
            vec![0.3, 0.3],
            SampledPositiveFunction::from_fn(dom, grid, ContinuityClass::Continuous, |x| {
                2.5 + 0.5 * x
            })
            .unwrap(),
            SemiLinearOperator::Multiplier(v),
        ));
    }
    // 7: a non-uniform partition
    specs.push(cform(
        "nonuniform_knots",
        knots_quarter(),
        vec![0.2, 0.15],
        SampledPositiveFunction::from_fn(dom, grid, ContinuityClass::Continuous, |x| {
            1.0 + x * (1.0 - x)
        })
        .unwrap(),
        SemiLinearOperator::EndpointAffine,
    ));
    // 8-10: Lp forms with smooth q
    let lp = |name: &str,
              family: ContractionFamily,
              s: Vec<f64>,
              p: f64,
              qs: Vec<Box<dyn Fn(f64) -> f64>>| {
        let q = qs
            .into_iter()
            .map(|f| {
                SampledPositiveFunction::from_fn(dom, grid, ContinuityClass::Measurable, f).unwrap()
            })
            .collect();
        (
            name.to_string(),
            RbSpec::new(
                family,
                ScalingFamily::constants(dom, &s).unwrap(),
                RbForm::Lp {
                    q,
                    p: Exponent::finite(p).unwrap(),
                },
            )
            .unwrap(),
        )
    };
    specs.push(lp(
        "lp_smooth_p1",
        uniform2(),
        vec![0.3, 0.3],
        1.0,
        vec![Box::new(|x| 1.0 + 0.5 * x), Box::new(|x| 1.5 - 0.5 * x * x)],
    ));
    specs.push(lp(
        "lp_smooth_p2",
        uniform2(),
        vec![0.35, 0.25],
        2.0,
        vec![
            Box::new(|x| 0.8 + 0.2 * (3.0 * x).sin().abs()),
            Box::new(|x| 1.2 - 0.3 * x),
        ],
    ));
    specs.push(lp(
        "lp_four_maps",
        uniform4(),
        vec![0.2, 0.25, 0.15, 0.2],
        1.0,
        vec![
            Box::new(|x| 1.0 + 0.3 * x),
            Box::new(|x| 1.3 - 0.2 * x),
            Box::new(|x| 0.9 + 0.1 * x * x),
            Box::new(|x| 1.1 + 0.2 * (1.0 - x)),
        ],
    ));

    specs
}

/// Graph-attractor equivalence and operator/set-map commutation, reported as
/// a suite.
pub fn attractor_suite(seed: u64) -> SuiteReport {
    let mut props = Vec::new();
    let mut worst_rel: f64 = f64::NEG_INFINITY;
    let mut detail = String::new();
    let tol = 1e-12;

    for (name, spec) in example_specs() {
        let run = || -> Result<(f64, f64)> {
            let g0 =
                SampledPositiveFunction::zero(spec.domain(), spec.grid_size(), spec.continuity())?;
            let fstar = fixed_point(&spec, &g0, tol, 400)?.fstar;
            let ifs = GraphIfs::from_spec(&spec)?;
            let (x0, xn) = spec.domain();
            let a0 = PointSet::new(vec![
                [x0, fstar.samples()[0]],
                [xn, *fstar.samples().last().unwrap()],
            ])?;
            let res = ifs.default_resolution(&a0);
            let attractor = ifs.attractor(&a0, 30)?;
            let d = hausdorff(&attractor, &graph_of(&fstar))?;
            let h = (xn - x0) / (spec.grid_size() - 1) as f64;
            Ok((d, 5.0 * (h + res)))
        };
        match run() {
            Ok((d, bound)) => {
                worst_rel = worst_rel.max(d / bound);
                detail.push_str(&format!("{name}: {:.3}; ", d / bound));
            }
            Err(e) => {
                worst_rel = f64::INFINITY;
                detail.push_str(&format!("{name}: failed ({e}); "));
            }
        }
    }
    props.push(check(
        "graph_attractor_equivalence",
        worst_rel,
        1.0,
        format!("hausdorff / bound per spec: {detail}"),
    ));

    // Commutation G(Tg) = F_T(G(g)) at grid resolution for random g.
    {
        let mut rng = rng_for(seed, 50);
        let spec = worked_example_spec(513);
        let mild = example_specs();
        let spec2 = &mild[1].1;
        let mut worst: f64 = f64::NEG_INFINITY;
        for trial in 0..10 {
            let use_first = trial % 2 == 0;
            let s = if use_first { &spec } else { spec2 };
            let ifs = GraphIfs::from_spec(s).unwrap();
            let g = bounded_slope_probe(&mut rng, s.domain(), s.grid_size());
            let lhs = graph_of(&apply_rb(s, &g).unwrap());
            let rhs = ifs.hutchinson_step(&graph_of(&g));
            let d = hausdorff(&lhs, &rhs).unwrap();
            let h = (s.domain().1 - s.domain().0) / (s.grid_size() - 1) as f64;
            let a0 = PointSet::new(vec![[0.0, 0.0]]).unwrap();
            let bound = 5.0 * (h + ifs.default_resolution(&a0));
            worst = worst.max(d / bound);
        }
        props.push(check(
            "operator_set_map_commutation",
            worst,
            1.0,
            format!("10 random g; worst hausdorff / bound = {worst:.3}"),
        ));
    }

    SuiteReport::new("attractor", seed, props)
}
