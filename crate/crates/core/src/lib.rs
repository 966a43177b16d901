//! Numerical differentiation by step-size averaging.
//!
//! Three classical first-derivative estimators ([`diffcore`]) are evaluated
//! at many step sizes drawn from `[0.5h, 1.5h]` and averaged ([`averaging`]),
//! which suppresses floating-point rounding noise roughly as `1/sqrt(N)`.
//! The [`bench`] module sweeps a fixed panel of test cases ([`functions`])
//! over a grid of step sizes and produces absolute-error tables.

pub mod averaging;
pub mod bench;
pub mod cli;
pub mod diffcore;
pub mod error;
pub mod functions;
pub mod summation;

pub use error::{DiffError, Result};
pub use functions::{FunctionCase, FunctionId, RealFunction};
