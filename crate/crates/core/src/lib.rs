//! Spin squeezing of two coupled spin-1 subsystems.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`)
//! through [`Real`]. The aliases at the crate root fix it to `f64`, which is
//! what the command-line tool and the tests use.

// Index loops mirror the tensor-index formulas; NaN-aware negated comparisons are deliberate.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod scalar;
pub mod spin;
pub mod squeezing;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision coupled two-qutrit state.
pub type CoupledState = states::CoupledState<f64>;
pub type Spin1State = states::Spin1State<f64>;
pub type Spinor = states::Spinor<f64>;
pub type Direction = spin::Direction<f64>;
pub type Frame = spin::Frame<f64>;
pub type ComplexMatrix = linalg::ComplexMatrix<f64>;
pub type StateVector = linalg::StateVector<f64>;
pub type FramePolicy = squeezing::FramePolicy<f64>;
pub type SqueezingReport = squeezing::SqueezingReport<f64>;
pub type Generator = dynamics::Generator<f64>;
pub type Complex = num_complex::Complex<f64>;
