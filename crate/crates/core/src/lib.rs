//! Generalized simplex and centred simplex gradients, their calculus rules,
//! error bounds, and a small convergence harness.

pub mod bounds;
pub mod calculus;
pub mod cli;
pub mod error;
pub mod harness;
pub mod matcore;
pub mod oracle;
pub mod sampleset;
pub mod simplexgrad;
pub mod verify;

pub use error::{Error, Result};
pub use matcore::{Matrix, Vector};
pub use sampleset::{Classification, EvaluationTable, SampleSet};
pub use simplexgrad::{GradientEstimate, Method, Rule};
