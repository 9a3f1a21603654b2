//! Verification toolkit for a long exact sequence of Floer cohomology groups
//! at desk scale: graded GF(2) homological algebra, the cotangent-bundle local
//! model of a Dehn twist, a torus curve model and scenario orchestration.

// `!(x > 0)` is used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod scalar;

pub mod gf2;
pub mod graded;
pub mod local_model;
pub mod scenario;
pub mod torus;

pub use scalar::{Grade, GradeParseError, Scalar};

/// Grades as doubles.
pub type GradedSpace64 = graded::GradedSpace<f64>;
pub type OrderMap64 = graded::OrderMap<f64>;
pub type DifferentialSpace64 = graded::DifferentialSpace<f64>;
pub type ExactTriple64 = graded::ExactTriple<f64>;
/// Exact rational grades.
pub type GradedSpaceQ = graded::GradedSpace<num_rational::Rational64>;
pub type ExactTripleQ = graded::ExactTriple<num_rational::Rational64>;

pub type TwistProfile64 = local_model::TwistProfile<f64>;
pub type CotangentPoint64 = local_model::CotangentPoint<f64>;
pub type TwistProfile32 = local_model::TwistProfile<f32>;
pub type CotangentPoint32 = local_model::CotangentPoint<f32>;
