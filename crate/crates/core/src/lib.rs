//! Characters of the classical groups evaluated at numerical matrices, as
//! ratios of alternating forms applied to matrix powers.
//!
//! The [`engine`] module holds the evaluators; [`oracle`] holds independent
//! reference computations from eigenvalues, power sums and explicit
//! symmetric powers.

pub mod cli;
pub mod domain;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod oracle;

pub use domain::{DominantWeight, Family, GroupDescriptor};
pub use engine::{evaluate, CharacterResult, EvalOptions, Evaluation, Variant};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;

/// `|a − b| / max(|a|, |b|, 1)`.
pub fn relative_discrepancy(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}
