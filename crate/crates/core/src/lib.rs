//! Dense-matrix toolkit for the SDD / SDD1 / S-SDD1 / B1 hierarchy:
//! class tests, Schur complements with certified dominance bounds, and
//! upper bounds on `||A^{-1}||_inf`, LCP error constants and determinants,
//! each checked against a brute-force oracle.
//!
//! Indices are 0-based inside the crate and 1-based in every report,
//! error message and `Display` output.

pub mod certificate;
pub mod classify;
pub mod det_bounds;
pub mod error;
pub mod generate;
pub mod io;
pub mod lcp;
pub mod matrix;
pub mod norm_bounds;
pub mod oracle;
pub mod schur;

#[cfg(test)]
mod testdata;

pub use certificate::{BoundCertificate, FormulaId, Param};
pub use classify::{classify, B1Split, ClassReport};
pub use det_bounds::{D1Ordering, DetBracket};
pub use error::{Error, Result};
pub use lcp::{ExperimentConfig, LcpExperiment};
pub use matrix::{DenseMatrix, IndexPartition, IndexSet};
pub use schur::{Regime, RowBounds, SchurResult, Tolerances};
