//! Positivity-preserving fractal interpolation on the cones of nonnegative
//! continuous and p-integrable functions over a compact interval.
//!
//! The pipeline: a knot partition induces affine contractions of the base
//! interval ([`partition`]); a scaling family and either an explicit q-tuple
//! or a germ-plus-operator pair define a Read-Bajraktarević operator on the
//! cone ([`rb_core`]); when the operator contracts, Banach iteration yields
//! the fractal function, whose graph is simultaneously the attractor of an
//! induced plane IFS ([`ifs_attractor`]). Positivity is never clamped in:
//! every element of every space is nonnegative by construction, and an
//! operator output that would leave the cone is a hard error.

pub mod config;
pub mod error;
pub mod fractal_operator;
pub mod ifs_attractor;
pub mod partition;
pub mod rb_core;
pub mod semi_spaces;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use fractal_operator::{FractalTemplate, SemiLinearOperator};
pub use partition::{ContractionFamily, KnotVector};
pub use rb_core::{
    apply_rb, contraction_factor, fixed_point, interpolation_check, selfref_residual,
    validate_spec, FixedPointResult, RbForm, RbSpec, ScalingFamily, ValidationReport,
};
pub use semi_spaces::{
    combine, euclidean_inner, euclidean_metric, euclidean_norm, lp_metric, lp_metric_unrooted,
    lp_sequence_metric, norm_from_zero, sup_metric, ContinuityClass, Exponent, PositiveSequence,
    PositiveVector, SampledPositiveFunction,
};
