//! Semi-linear operators on the positive cones, the fractal operator sending
//! a germ function to its self-referential counterpart, and empirical
//! operator-norm estimates with the norm sandwich check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::ContractionFamily;
use crate::rb_core::{fixed_point, FixedPointResult, RbForm, RbSpec, ScalingFamily};
use crate::semi_spaces::{norm_from_zero, Exponent, SampledPositiveFunction};

/// The built-in bounded semi-linear operators `L` on the cone. All three are
/// defined by pointwise formulas valid on both the continuous and the
/// p-integrable cone, so no abstract extension is needed.
#[derive(Debug, Clone, PartialEq)]
pub enum SemiLinearOperator {
    /// `Lf = f`.
    Identity,
    /// The affine function through `(x_0, f(x_0))` and `(x_n, f(x_n))`.
    EndpointAffine,
    /// `Lf = v · f` for a fixed nonnegative multiplier on the same grid.
    Multiplier(SampledPositiveFunction),
}

impl SemiLinearOperator {
    pub fn apply(&self, f: &SampledPositiveFunction) -> Result<SampledPositiveFunction> {
        match self {
            SemiLinearOperator::Identity => Ok(f.clone()),
            SemiLinearOperator::EndpointAffine => {
                let n = f.len();
                let (x0, xn) = f.domain();
                let (f0, fn_) = (f.samples()[0], f.samples()[n - 1]);
                // convex-combination form: exact at the endpoints and
                // nonnegative whenever the endpoint values are
                let samples = (0..n)
                    .map(|k| {
                        let t = (f.grid_x(k) - x0) / (xn - x0);
                        (1.0 - t) * f0 + t * fn_
                    })
                    .collect();
                SampledPositiveFunction::new((x0, xn), samples, f.continuity())
            }
            SemiLinearOperator::Multiplier(v) => {
                if !v.same_grid(f) {
                    return Err(Error::Dimension(format!(
                        "multiplier grid {:?}/{} does not match argument grid {:?}/{}",
                        v.domain(),
                        v.len(),
                        f.domain(),
                        f.len()
                    )));
                }
                let samples = v
                    .samples()
                    .iter()
                    .zip(f.samples())
                    .map(|(a, b)| a * b)
                    .collect();
                SampledPositiveFunction::new(f.domain(), samples, f.continuity())
            }
        }
    }
}

/// Everything but the germ: partition, scalings, operator, and the norm used
/// for estimates (`Infinity` selects the sup norm).
#[derive(Debug, Clone)]
pub struct FractalTemplate {
    pub family: ContractionFamily,
    pub scaling: ScalingFamily,
    pub operator: SemiLinearOperator,
    pub norm: Exponent,
}

impl FractalTemplate {
    pub fn spec_for(&self, germ: &SampledPositiveFunction) -> Result<RbSpec> {
        RbSpec::new(
            self.family.clone(),
            self.scaling.clone(),
            RbForm::C {
                germ: germ.clone(),
                operator: self.operator.clone(),
            },
        )
    }

    /// The fractal operator: map a germ to its self-referential counterpart
    /// by solving the fixed-point equation of the induced RB operator.
    pub fn fractal_map(
        &self,
        germ: &SampledPositiveFunction,
        tol: f64,
        max_iter: usize,
    ) -> Result<FixedPointResult> {
        let spec = self.spec_for(germ)?;
        fixed_point(&spec, germ, tol, max_iter)
    }

    pub fn s_inf(&self) -> f64 {
        self.scaling.sup_norm_max()
    }
}

/// Empirical lower bound of an operator norm: the largest ratio
/// `||T f|| / ||f||` over a finite set of nonzero sample functions.
pub fn operator_norm_estimate<F>(
    apply: F,
    samples: &[(String, SampledPositiveFunction)],
    norm: Exponent,
) -> Result<f64>
where
    F: Fn(&SampledPositiveFunction) -> Result<SampledPositiveFunction>,
{
    if samples.is_empty() {
        return Err(Error::Parameter("sample set is empty".into()));
    }
    let mut best: f64 = 0.0;
    for (name, f) in samples {
        let denom = norm_from_zero(f, norm);
        if denom == 0.0 {
            return Err(Error::Domain(format!(
                "sample '{name}' is the zero function; the norm quotient is undefined"
            )));
        }
        let image = apply(f)?;
        best = best.max(norm_from_zero(&image, norm) / denom);
    }
    Ok(best)
}

/// Norm of the signed difference `a - b` on a shared grid; `(I - L)g` is
/// signed even on positive input, so this works in ordinary absolute-value
/// arithmetic (which agrees with the max–min form wherever both apply).
fn signed_norm(a: &SampledPositiveFunction, b: &SampledPositiveFunction, norm: Exponent) -> f64 {
    let n = a.len();
    match norm {
        Exponent::Infinity => a
            .samples()
            .iter()
            .zip(b.samples())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs())),
        Exponent::Finite(p) => {
            let (x0, xn) = a.domain();
            let h = (xn - x0) / (n - 1) as f64;
            let mut sum = 0.0;
            for k in 0..n {
                let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                sum += w * (a.samples()[k] - b.samples()[k]).abs().powf(p);
            }
            (sum * h).powf(1.0 / p)
        }
    }
}

/// Per-sample displacement bound `||f(S) - f|| <= S_inf/(1-S_inf) ||I-L|| ||f||`.
#[derive(Debug, Clone, Serialize)]
pub struct FunctionBound {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Outcome of the norm sandwich check
/// `1 <= ||F^S|| <= 1 + S_inf/(1-S_inf) ||I-L||`.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    /// Empirical lower bound of the fractal operator norm.
    pub estimate: f64,
    /// Empirical lower bound of `||I - L||` on the same sample set.
    pub i_minus_l_norm: f64,
    pub s_inf: f64,
    pub upper_bound: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub per_function: Vec<FunctionBound>,
    pub pass: bool,
}

/// Run the sandwich and per-function displacement checks on a sample set of
/// admissible germs.
pub fn norm_sandwich_check(
    template: &FractalTemplate,
    samples: &[(String, SampledPositiveFunction)],
    tol: f64,
    max_iter: usize,
) -> Result<SandwichReport> {
    let s_inf = template.s_inf();
    if s_inf.is_nan() || s_inf >= 1.0 {
        return Err(Error::NotContractive { factor: s_inf });
    }
    let norm = template.norm;
    let ratio = s_inf / (1.0 - s_inf);

    let mut i_minus_l_norm: f64 = 0.0;
    for (name, f) in samples {
        let nf = norm_from_zero(f, norm);
        if nf == 0.0 {
            return Err(Error::Domain(format!(
                "sample '{name}' is the zero function; the norm quotient is undefined"
            )));
        }
        let lf = template.operator.apply(f)?;
        i_minus_l_norm = i_minus_l_norm.max(signed_norm(f, &lf, norm) / nf);
    }

    let mut estimate: f64 = 0.0;
    let mut per_function = Vec::with_capacity(samples.len());
    for (name, f) in samples {
        let nf = norm_from_zero(f, norm);
        let fs = template.fractal_map(f, tol, max_iter)?.fstar;
        estimate = estimate.max(norm_from_zero(&fs, norm) / nf);
        let lhs = signed_norm(&fs, f, norm);
        let rhs = ratio * i_minus_l_norm * nf + 10.0 * tol;
        per_function.push(FunctionBound {
            name: name.clone(),
            lhs,
            rhs,
            ok: lhs <= rhs,
        });
    }

    let upper_bound = 1.0 + ratio * i_minus_l_norm;
    let lower_ok = estimate >= 1.0 - 1e-9;
    let upper_ok = estimate <= upper_bound + 1e-6;
    let pass = lower_ok && upper_ok && per_function.iter().all(|b| b.ok);
    Ok(SandwichReport {
        estimate,
        i_minus_l_norm,
        s_inf,
        upper_bound,
        lower_ok,
        upper_ok,
        per_function,
        pass,
    })
}
