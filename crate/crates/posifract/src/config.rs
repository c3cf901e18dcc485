//! JSON wire formats: spec configs, result records, and the conversions to
//! and from the domain types. Configs round-trip (parse → serialize → parse
//! is the identity) and deserialization runs the full domain validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs_attractor::{GraphIfs, MapCoefficients};
use crate::partition::{ContractionFamily, KnotVector};
use crate::rb_core::{FixedPointResult, RbForm, RbSpec, ScalingFamily};
use crate::semi_spaces::{ContinuityClass, Exponent, SampledPositiveFunction};

/// Exponent wire value: a JSON number or the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Number(f64),
    Name(String),
}

impl PValue {
    pub fn to_exponent(&self) -> Result<Exponent> {
        match self {
            PValue::Number(p) => Exponent::finite(*p),
            PValue::Name(s) if s == "inf" => Ok(Exponent::Infinity),
            PValue::Name(s) => Err(Error::Configuration(format!(
                "unknown exponent '{s}'; expected a number >= 1 or \"inf\""
            ))),
        }
    }

    pub fn from_exponent(p: Exponent) -> Self {
        match p {
            Exponent::Finite(p) => PValue::Number(p),
            Exponent::Infinity => PValue::Name("inf".into()),
        }
    }
}

/// Scaling functions: shared constants or per-interval sample rows on the
/// iteration grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingConfig {
    Constants(Vec<f64>),
    Sampled(Vec<Vec<f64>>),
}

/// Semi-linear operator selector: `"identity"`, `"endpoint_affine"`, or
/// `{"multiplier": [...]}` with samples on the iteration grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorConfig {
    Name(String),
    Multiplier { multiplier: Vec<f64> },
}

/// Operator form: explicit q-rows, or a germ with a semi-linear operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormConfig {
    Lp {
        q: Vec<Vec<f64>>,
    },
    C {
        germ: Vec<f64>,
        operator: OperatorConfig,
    },
}

/// Attractor rendering parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractorConfig {
    pub k: usize,
    /// Absolute thinning resolution; omitted means 2^-12 of the working
    /// diameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    200
}

/// A full RB spec as read from a JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecConfig {
    pub knots: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<PValue>,
    pub scaling: ScalingConfig,
    pub form: FormConfig,
    pub grid: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attractor: Option<AttractorConfig>,
}

impl SpecConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Configuration(format!("config does not parse: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Materialize the domain objects; every constraint violation surfaces
    /// here as an error.
    pub fn build(&self) -> Result<RbSpec> {
        let knots = KnotVector::new(self.knots.clone())?;
        let family = ContractionFamily::from_knots(knots);
        let dom = family.domain();
        let n_maps = family.map_count();
        if self.grid < 2 {
            return Err(Error::Configuration(format!(
                "grid must be at least 2, got {}",
                self.grid
            )));
        }

        let continuity = match self.form {
            FormConfig::Lp { .. } => ContinuityClass::Measurable,
            FormConfig::C { .. } => ContinuityClass::Continuous,
        };

        let scaling = match &self.scaling {
            ScalingConfig::Constants(values) => {
                if values.len() != n_maps {
                    return Err(Error::Configuration(format!(
                        "{} scaling constants for {} intervals",
                        values.len(),
                        n_maps
                    )));
                }
                ScalingFamily::constants(dom, values)?
            }
            ScalingConfig::Sampled(rows) => {
                if rows.len() != n_maps {
                    return Err(Error::Configuration(format!(
                        "{} scaling rows for {} intervals",
                        rows.len(),
                        n_maps
                    )));
                }
                // scaling rows are functions on I in their own right and may
                // carry any grid (constants use a two-point one)
                let functions = rows
                    .iter()
                    .map(|row| {
                        SampledPositiveFunction::new(dom, row.clone(), ContinuityClass::Continuous)
                    })
                    .collect::<Result<Vec<_>>>()?;
                ScalingFamily::new(functions)?
            }
        };

        let form = match &self.form {
            FormConfig::Lp { q } => {
                let p = self
                    .p
                    .as_ref()
                    .ok_or_else(|| {
                        Error::Configuration("the lp form requires the 'p' field".into())
                    })?
                    .to_exponent()?;
                if q.len() != n_maps {
                    return Err(Error::Configuration(format!(
                        "{} q rows for {} intervals",
                        q.len(),
                        n_maps
                    )));
                }
                let q = q
                    .iter()
                    .map(|row| {
                        self.check_row_len(row)?;
                        SampledPositiveFunction::new(dom, row.clone(), continuity)
                    })
                    .collect::<Result<Vec<_>>>()?;
                RbForm::Lp { q, p }
            }
            FormConfig::C { germ, operator } => {
                self.check_row_len(germ)?;
                let germ = SampledPositiveFunction::new(dom, germ.clone(), continuity)?;
                let operator = match operator {
                    OperatorConfig::Name(name) => match name.as_str() {
                        "identity" => crate::fractal_operator::SemiLinearOperator::Identity,
                        "endpoint_affine" => {
                            crate::fractal_operator::SemiLinearOperator::EndpointAffine
                        }
                        other => {
                            return Err(Error::Configuration(format!(
                                "unknown operator '{other}'; expected \"identity\", \
                                 \"endpoint_affine\", or {{\"multiplier\": [...]}}"
                            )))
                        }
                    },
                    OperatorConfig::Multiplier { multiplier } => {
                        self.check_row_len(multiplier)?;
                        crate::fractal_operator::SemiLinearOperator::Multiplier(
                            SampledPositiveFunction::new(
                                dom,
                                multiplier.clone(),
                                ContinuityClass::Continuous,
                            )?,
                        )
                    }
                };
                RbForm::C { germ, operator }
            }
        };

        RbSpec::new(family, scaling, form)
    }

    fn check_row_len(&self, row: &[f64]) -> Result<()> {
        if row.len() != self.grid {
            return Err(Error::Configuration(format!(
                "sample row has {} entries, the grid is {}",
                row.len(),
                self.grid
            )));
        }
        Ok(())
    }
}

/// One member of a batch sequence: scaling rows and q rows on the shared
/// header's grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberConfig {
    pub scaling: ScalingConfig,
    pub q: Vec<Vec<f64>>,
}

/// Batch config for sequences of fractal functions: a shared header (knots,
/// grid, p) with member parameter tuples and the declared limit tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceConfig {
    pub knots: Vec<f64>,
    pub p: PValue,
    pub grid: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    pub members: Vec<MemberConfig>,
    pub limit: MemberConfig,
}

impl SequenceConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Configuration(format!("sequence config does not parse: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn build(&self) -> Result<crate::series::ParameterSequence> {
        let knots = KnotVector::new(self.knots.clone())?;
        let family = ContractionFamily::from_knots(knots);
        let dom = family.domain();
        let n_maps = family.map_count();
        let p = self.p.to_exponent()?;
        let build_member = |m: &MemberConfig| -> Result<crate::series::MemberParams> {
            let scaling = match &m.scaling {
                ScalingConfig::Constants(values) => {
                    if values.len() != n_maps {
                        return Err(Error::Configuration(format!(
                            "{} scaling constants for {} intervals",
                            values.len(),
                            n_maps
                        )));
                    }
                    ScalingFamily::constants(dom, values)?
                }
                ScalingConfig::Sampled(rows) => {
                    if rows.len() != n_maps {
                        return Err(Error::Configuration(format!(
                            "{} scaling rows for {} intervals",
                            rows.len(),
                            n_maps
                        )));
                    }
                    ScalingFamily::new(
                        rows.iter()
                            .map(|row| {
                                SampledPositiveFunction::new(
                                    dom,
                                    row.clone(),
                                    ContinuityClass::Continuous,
                                )
                            })
                            .collect::<Result<Vec<_>>>()?,
                    )?
                }
            };
            if m.q.len() != n_maps {
                return Err(Error::Configuration(format!(
                    "{} q rows for {} intervals",
                    m.q.len(),
                    n_maps
                )));
            }
            let q =
                m.q.iter()
                    .map(|row| {
                        if row.len() != self.grid {
                            return Err(Error::Configuration(format!(
                                "q row has {} entries, the grid is {}",
                                row.len(),
                                self.grid
                            )));
                        }
                        SampledPositiveFunction::new(dom, row.clone(), ContinuityClass::Measurable)
                    })
                    .collect::<Result<Vec<_>>>()?;
            Ok(crate::series::MemberParams { scaling, q })
        };
        let members = self
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| {
                build_member(m).map_err(|e| Error::Configuration(format!("member {}: {e}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        let limit =
            build_member(&self.limit).map_err(|e| Error::Configuration(format!("limit: {e}")))?;
        Ok(crate::series::ParameterSequence {
            family,
            members,
            limit,
            p,
        })
    }
}

/// Result record mirroring `FixedPointResult`, JSON-serializable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointRecord {
    pub iterations: usize,
    pub contraction_factor: f64,
    pub residual: f64,
    pub history: Vec<f64>,
    pub fstar: FunctionRecord,
}

/// A sampled function on the wire.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionRecord {
    pub domain: [f64; 2],
    pub samples: Vec<f64>,
    pub continuity: ContinuityClass,
}

impl FunctionRecord {
    pub fn from_function(f: &SampledPositiveFunction) -> Self {
        Self {
            domain: [f.domain().0, f.domain().1],
            samples: f.samples().to_vec(),
            continuity: f.continuity(),
        }
    }

    pub fn to_function(&self) -> Result<SampledPositiveFunction> {
        SampledPositiveFunction::new(
            (self.domain[0], self.domain[1]),
            self.samples.clone(),
            self.continuity,
        )
    }
}

impl FixedPointRecord {
    pub fn from_result(r: &FixedPointResult) -> Self {
        Self {
            iterations: r.iterations,
            contraction_factor: r.contraction_factor,
            residual: r.residual,
            history: r.history.clone(),
            fstar: FunctionRecord::from_function(&r.fstar),
        }
    }
}

/// Reproducibility dump of a graph IFS.
#[derive(Debug, Clone, Serialize)]
pub struct GraphIfsRecord {
    pub theta: f64,
    pub theta_fallback: bool,
    pub lipschitz_x: f64,
    pub y_bound: f64,
    pub maps: Vec<MapCoefficients>,
}

impl GraphIfsRecord {
    pub fn from_ifs(ifs: &GraphIfs) -> Self {
        Self {
            theta: ifs.theta(),
            theta_fallback: ifs.theta_fallback(),
            lipschitz_x: ifs.lipschitz_x(),
            y_bound: ifs.y_bound(),
            maps: ifs.coefficients(),
        }
    }
}
