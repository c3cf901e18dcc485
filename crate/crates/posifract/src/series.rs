//! Sequences and infinite series of fractal functions whose defining
//! parameters (scaling families and q-tuples) converge, with the stability
//! bound relating parameter distances to fixed-point distances.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::ContractionFamily;
use crate::rb_core::{
    contraction_factor, fixed_point, FixedPointResult, RbForm, RbSpec, ScalingFamily,
};
use crate::semi_spaces::{
    combine, lp_metric_unrooted, sup_metric, Exponent, SampledPositiveFunction,
};

/// One member's parameters: a scaling family and a q-tuple on the shared
/// partition and grid.
#[derive(Debug, Clone)]
pub struct MemberParams {
    pub scaling: ScalingFamily,
    pub q: Vec<SampledPositiveFunction>,
}

impl MemberParams {
    fn spec(&self, family: &ContractionFamily, p: Exponent) -> Result<RbSpec> {
        RbSpec::new(
            family.clone(),
            self.scaling.clone(),
            RbForm::Lp {
                q: self.q.clone(),
                p,
            },
        )
    }
}

/// A sequence of member parameters with declared limit parameters. The
/// metric is the rootless p-power gauge for finite `p` and the grid sup for
/// `p = inf` (the continuous-cone mode).
#[derive(Debug, Clone)]
pub struct ParameterSequence {
    pub family: ContractionFamily,
    pub members: Vec<MemberParams>,
    pub limit: MemberParams,
    pub p: Exponent,
}

/// Distances and stability bounds for a computed sequence of fractal
/// functions against the limit function.
#[derive(Debug, Clone, Serialize)]
pub struct SequenceReport {
    /// `d(f_m, f)` per member, in the sequence metric.
    pub distances: Vec<f64>,
    /// The stability bound evaluated per member.
    pub bounds: Vec<f64>,
    pub within_bound: Vec<bool>,
    pub contraction_factors: Vec<f64>,
    pub limit_factor: f64,
    pub pass: bool,
}

fn member_distance(
    a: &SampledPositiveFunction,
    b: &SampledPositiveFunction,
    p: Exponent,
) -> Result<f64> {
    match p {
        Exponent::Finite(_) => lp_metric_unrooted(a, b, p),
        Exponent::Infinity => sup_metric(a, b),
    }
}

/// Compute the fractal functions of the first `m_count` members and of the
/// limit parameters, and verify the stability bound
/// `d(f_m, f) <= Σ_i [c_i d(q_{m,i}, q_i) + e_i d(S_{m,i}, S_i)] / (1 - factor) + 10 tol`
/// where for finite `p` the coefficients are `c_i = ||Dl_i||_inf` and
/// `e_i = ||Dl_i · f^p||_inf`, and in sup mode `c_i = 1`, `e_i = ||f||_inf`.
pub fn fractal_sequence(
    ps: &ParameterSequence,
    m_count: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<FixedPointResult>, FixedPointResult, SequenceReport)> {
    if m_count < 2 {
        return Err(Error::Parameter(format!(
            "need at least 2 members, got {m_count}"
        )));
    }
    if ps.members.len() < m_count {
        return Err(Error::Parameter(format!(
            "sequence declares {} members, {m_count} requested",
            ps.members.len()
        )));
    }

    let limit_spec = ps
        .limit
        .spec(&ps.family, ps.p)
        .map_err(|e| Error::Configuration(format!("limit parameters: {e}")))?;
    let limit_factor = contraction_factor(&limit_spec);
    let g0 = zero_like(&limit_spec)?;
    let limit_result = fixed_point(&limit_spec, &g0, tol, max_iter)
        .map_err(|e| Error::Configuration(format!("limit parameters: {e}")))?;
    let f_limit = &limit_result.fstar;
    let f_max = f_limit.max_sample();

    let mut results = Vec::with_capacity(m_count);
    let mut distances = Vec::with_capacity(m_count);
    let mut bounds = Vec::with_capacity(m_count);
    let mut within = Vec::with_capacity(m_count);
    let mut factors = Vec::with_capacity(m_count);

    for m in 0..m_count {
        let member = &ps.members[m];
        let spec = member
            .spec(&ps.family, ps.p)
            .map_err(|e| Error::Configuration(format!("member {}: {e}", m + 1)))?;
        let result = fixed_point(&spec, &g0, tol, max_iter)
            .map_err(|e| Error::Configuration(format!("member {}: {e}", m + 1)))?;
        factors.push(result.contraction_factor);

        let d = member_distance(&result.fstar, f_limit, ps.p)?;

        // Stability bound numerator from the parameter distances.
        let mut numerator = 0.0;
        for i in 0..ps.family.map_count() {
            let dq = member_distance(&member.q[i], &ps.limit.q[i], ps.p)?;
            let ds = member_distance(
                member.scaling.function(i),
                ps.limit.scaling.function(i),
                ps.p,
            )?;
            let (c_i, e_i) = match ps.p {
                Exponent::Finite(p) => {
                    let a_i = ps.family.derivative_sup(i);
                    (a_i, a_i * f_max.powf(p))
                }
                Exponent::Infinity => (1.0, f_max),
            };
            numerator += c_i * dq + e_i * ds;
        }
        let bound = numerator / (1.0 - limit_factor) + 10.0 * tol;

        distances.push(d);
        bounds.push(bound);
        within.push(d <= bound);
        results.push(result);
    }

    let pass = within.iter().all(|w| *w);
    let report = SequenceReport {
        distances,
        bounds,
        within_bound: within,
        contraction_factors: factors,
        limit_factor,
        pass,
    };
    Ok((results, limit_result, report))
}

/// Partial-sum behavior of an infinite series of fractal functions whose
/// parameters are summed termwise.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesReport {
    /// Contraction factor of each partial-sum spec.
    pub partial_factors: Vec<f64>,
    /// `d(f^(k+1), f^(k))` between consecutive partial-sum fixed points.
    pub cauchy_steps: Vec<f64>,
    /// Ratios of consecutive Cauchy steps.
    pub cauchy_ratios: Vec<f64>,
}

/// Sum the first `k_terms` parameter tuples termwise, computing the fixed
/// point of every partial sum; errors if any partial sum stops being
/// contractive, naming the offending index.
pub fn fractal_series(
    family: &ContractionFamily,
    terms: &[MemberParams],
    k_terms: usize,
    p: Exponent,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<FixedPointResult>, SeriesReport)> {
    if k_terms == 0 || terms.len() < k_terms {
        return Err(Error::Parameter(format!(
            "need 1 <= k_terms <= {}, got {k_terms}",
            terms.len()
        )));
    }
    let n = family.map_count();
    let mut partials: Vec<FixedPointResult> = Vec::with_capacity(k_terms);
    let mut factors = Vec::with_capacity(k_terms);
    let mut running: Option<MemberParams> = None;

    for (k, term) in terms.iter().take(k_terms).enumerate() {
        let summed = match &running {
            None => term.clone(),
            Some(acc) => {
                let mut q = Vec::with_capacity(n);
                let mut s = Vec::with_capacity(n);
                for i in 0..n {
                    q.push(
                        combine(&acc.q[i], &term.q[i], 1.0, 1.0)
                            .map_err(|e| Error::Configuration(format!("term {}: {e}", k + 1)))?,
                    );
                    s.push(
                        combine(acc.scaling.function(i), term.scaling.function(i), 1.0, 1.0)
                            .map_err(|e| Error::Configuration(format!("term {}: {e}", k + 1)))?,
                    );
                }
                MemberParams {
                    scaling: ScalingFamily::new(s)?,
                    q,
                }
            }
        };
        let spec = summed
            .spec(family, p)
            .map_err(|e| Error::Configuration(format!("partial sum {}: {e}", k + 1)))?;
        let factor = contraction_factor(&spec);
        if factor.is_nan() || factor >= 1.0 {
            return Err(Error::Configuration(format!(
                "partial sum {} is not contractive: factor {factor}",
                k + 1
            )));
        }
        factors.push(factor);
        let g0 = zero_like(&spec)?;
        let result = fixed_point(&spec, &g0, tol, max_iter)
            .map_err(|e| Error::Configuration(format!("partial sum {}: {e}", k + 1)))?;
        partials.push(result);
        running = Some(summed);
    }

    let mut cauchy_steps = Vec::new();
    for w in partials.windows(2) {
        cauchy_steps.push(member_distance(&w[1].fstar, &w[0].fstar, p)?);
    }
    let mut cauchy_ratios = Vec::new();
    for w in cauchy_steps.windows(2) {
        cauchy_ratios.push(if w[0] > 0.0 { w[1] / w[0] } else { 0.0 });
    }

    Ok((
        partials,
        SeriesReport {
            partial_factors: factors,
            cauchy_steps,
            cauchy_ratios,
        },
    ))
}

fn zero_like(spec: &RbSpec) -> Result<SampledPositiveFunction> {
    SampledPositiveFunction::zero(spec.domain(), spec.grid_size(), spec.continuity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::KnotVector;
    use crate::semi_spaces::ContinuityClass;

    fn dom() -> (f64, f64) {
        (0.0, 1.0)
    }

    fn family() -> ContractionFamily {
        ContractionFamily::from_knots(KnotVector::new(vec![0.0, 0.5, 1.0]).unwrap())
    }

    fn base_q(n: usize) -> Vec<SampledPositiveFunction> {
        vec![
            SampledPositiveFunction::from_fn(dom(), n, ContinuityClass::Measurable, |x| {
                1.0 + 0.5 * (3.0 * x).sin().abs()
            })
            .unwrap(),
            SampledPositiveFunction::from_fn(dom(), n, ContinuityClass::Measurable, |x| {
                2.0 - x * 0.5
            })
            .unwrap(),
        ]
    }

    fn varying_scaling(n: usize) -> ScalingFamily {
        ScalingFamily::new(vec![
            SampledPositiveFunction::from_fn(dom(), n, ContinuityClass::Continuous, |x| {
                0.2 + 0.2 * x * (1.0 - x)
            })
            .unwrap(),
            SampledPositiveFunction::from_fn(dom(), n, ContinuityClass::Continuous, |x| {
                0.3 - 0.1 * x
            })
            .unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn constant_sequence_stays_at_the_limit() {
        let n = 129;
        let member = MemberParams {
            scaling: varying_scaling(n),
            q: base_q(n),
        };
        let ps = ParameterSequence {
            family: family(),
            members: vec![member.clone(); 5],
            limit: member,
            p: Exponent::finite(1.0).unwrap(),
        };
        let tol = 1e-11;
        let (_, _, report) = fractal_sequence(&ps, 5, tol, 300).unwrap();
        assert!(report.pass);
        for d in &report.distances {
            assert!(*d <= 10.0 * tol);
        }
    }

    #[test]
    fn geometric_q_sequence_converges_at_rate_two() {
        let n = 129;
        let q = base_q(n);
        let scaling = varying_scaling(n);
        let members: Vec<MemberParams> = (1..=8)
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
            family: family(),
            members,
            limit: MemberParams {
                scaling: scaling.clone(),
                q: q.clone(),
            },
            p: Exponent::finite(1.0).unwrap(),
        };
        let tol = 1e-12;
        let (results, limit, report) = fractal_sequence(&ps, 8, tol, 400).unwrap();
        assert!(report.pass, "{report:?}");
        // Semi-linearity gives f_m = (1 - 2^-m) f exactly, so distances halve.
        for (m, d) in report.distances.iter().enumerate() {
            let expected = (0.5f64).powi(m as i32 + 1)
                * member_distance(&limit.fstar, &zero_like_fn(n), ps.p).unwrap();
            assert!(
                (d - expected).abs() <= 1e-8 * expected.max(1.0),
                "member {m}: {d} vs {expected}"
            );
        }
        // Monotone parameter convergence means the distance profile decays.
        assert!(report.distances.windows(2).all(|w| w[1] <= w[0] * 0.5001));
        let _ = results;
    }

    fn zero_like_fn(n: usize) -> SampledPositiveFunction {
        SampledPositiveFunction::zero(dom(), n, ContinuityClass::Measurable).unwrap()
    }

    #[test]
    fn zero_scaling_members_reduce_to_pushforwards() {
        let n = 129;
        let q = base_q(n);
        let zero_scaling = ScalingFamily::constants(dom(), &[0.0, 0.0]).unwrap();
        let members: Vec<MemberParams> = (1..=4)
            .map(|m| {
                let lam = 1.0 - (0.5f64).powi(m);
                MemberParams {
                    scaling: zero_scaling.clone(),
                    q: q.iter()
                        .map(|qi| combine(qi, qi, lam, 0.0).unwrap())
                        .collect(),
                }
            })
            .collect();
        let ps = ParameterSequence {
            family: family(),
            members,
            limit: MemberParams {
                scaling: zero_scaling,
                q,
            },
            p: Exponent::finite(1.0).unwrap(),
        };
        // With S = 0 there is no recursion: each member converges in at most
        // two applications and the distances decay directly with the
        // parameters. (The stability bound itself is an equality here, so
        // quadrature wobble can land on either side of it; the bound is
        // asserted on specs with slack elsewhere.)
        let (results, _, report) = fractal_sequence(&ps, 4, 1e-12, 100).unwrap();
        for r in &results {
            assert!(r.iterations <= 2);
        }
        assert!(report.distances.windows(2).all(|w| w[1] <= w[0] * 0.5001));
    }

    #[test]
    fn sup_mode_carries_over() {
        let n = 129;
        let member = MemberParams {
            scaling: varying_scaling(n),
            q: base_q(n),
        };
        let ps = ParameterSequence {
            family: family(),
            members: vec![member.clone(); 3],
            limit: member,
            p: Exponent::Infinity,
        };
        let (_, _, report) = fractal_sequence(&ps, 3, 1e-11, 300).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn invalid_member_is_named() {
        let n = 129;
        let good = MemberParams {
            scaling: varying_scaling(n),
            q: base_q(n),
        };
        let bad = MemberParams {
            scaling: ScalingFamily::constants(dom(), &[1.5, 1.5]).unwrap(),
            q: base_q(n),
        };
        let ps = ParameterSequence {
            family: family(),
            members: vec![good.clone(), bad],
            limit: good,
            p: Exponent::finite(1.0).unwrap(),
        };
        match fractal_sequence(&ps, 2, 1e-10, 100) {
            Err(Error::Configuration(msg)) => assert!(msg.contains("member 2"), "{msg}"),
            other => panic!("expected configuration error, got {other:?}"),
        }
    }

    #[test]
    fn single_term_series_is_the_plain_fixed_point() {
        let n = 129;
        let term = MemberParams {
            scaling: varying_scaling(n),
            q: base_q(n),
        };
        let p = Exponent::finite(1.0).unwrap();
        let (partials, report) =
            fractal_series(&family(), std::slice::from_ref(&term), 1, p, 1e-11, 300).unwrap();
        assert_eq!(partials.len(), 1);
        assert_eq!(report.cauchy_steps.len(), 0);
        let spec = term.spec(&family(), p).unwrap();
        let direct = fixed_point(&spec, &zero_like_fn(n), 1e-11, 300).unwrap();
        assert_eq!(partials[0].fstar.samples(), direct.fstar.samples());
    }

    #[test]
    fn geometric_series_partial_sums_are_cauchy() {
        let n = 129;
        let q = base_q(n);
        let zero_scaling = ScalingFamily::constants(dom(), &[0.0, 0.0]).unwrap();
        let terms: Vec<MemberParams> = (1..=20)
            .map(|k| MemberParams {
                scaling: zero_scaling.clone(),
                q: q.iter()
                    .map(|qi| combine(qi, qi, (0.5f64).powi(k), 0.0).unwrap())
                    .collect(),
            })
            .collect();
        let p = Exponent::finite(1.0).unwrap();
        let (partials, report) = fractal_series(&family(), &terms, 20, p, 1e-13, 100).unwrap();

        // Halving terms give exactly halving Cauchy steps.
        for r in &report.cauchy_ratios {
            assert!(*r <= 0.51, "ratio {r}");
        }
        // The K -> inf limit is the fixed point with the full q (sum = q),
        // so the final partial sits within 2^-19 of it.
        let full = MemberParams {
            scaling: zero_scaling,
            q: q.clone(),
        };
        let spec = full.spec(&family(), p).unwrap();
        let limit = fixed_point(&spec, &zero_like_fn(n), 1e-13, 100).unwrap();
        let d = member_distance(&partials[19].fstar, &limit.fstar, p).unwrap();
        let d1 = member_distance(&partials[0].fstar, &zero_like_fn(n), p).unwrap();
        assert!(
            d <= (0.5f64).powi(19) * d1 / (1.0 - 0.5) + 1e-12,
            "distance {d}"
        );
    }

    #[test]
    fn series_with_geometric_scalings_stays_contractive() {
        let n = 129;
        let q = base_q(n);
        let s_base = ScalingFamily::constants(dom(), &[0.2, 0.25]).unwrap();
        let terms: Vec<MemberParams> = (1..=10)
            .map(|k| MemberParams {
                scaling: ScalingFamily::new(
                    (0..2)
                        .map(|i| {
                            combine(
                                s_base.function(i),
                                s_base.function(i),
                                (0.5f64).powi(k),
                                0.0,
                            )
                            .unwrap()
                        })
                        .collect(),
                )
                .unwrap(),
                q: q.iter()
                    .map(|qi| combine(qi, qi, (0.5f64).powi(k), 0.0).unwrap())
                    .collect(),
            })
            .collect();
        let p = Exponent::finite(1.0).unwrap();
        let (_, report) = fractal_series(&family(), &terms, 10, p, 1e-11, 200).unwrap();
        for f in &report.partial_factors {
            assert!(*f < 1.0);
        }
        // Partial scaling sums approach (but stay below) the geometric total.
        assert!(report.partial_factors.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn non_contractive_partial_sum_names_the_term() {
        let n = 65;
        let q = base_q(n);
        let big = ScalingFamily::constants(dom(), &[0.6, 0.6]).unwrap();
        let terms: Vec<MemberParams> = (0..3)
            .map(|_| MemberParams {
                scaling: big.clone(),
                q: q.clone(),
            })
            .collect();
        let p = Exponent::finite(1.0).unwrap();
        match fractal_series(&family(), &terms, 3, p, 1e-10, 100) {
            Err(Error::Configuration(msg)) => {
                assert!(msg.contains("partial sum 2"), "{msg}")
            }
            other => panic!("expected configuration error, got {other:?}"),
        }
    }
}
