//! Symbolic and numeric toolkit for evolution equations that describe
//! pseudospherical surfaces.
//!
//! - [`symcore`]: exact jet-space algebra (parsing, canonical forms, total
//!   derivatives, on-shell reduction, eta-Laurent expansion).
//! - [`structure`]: structure-equation residuals, representation changes,
//!   and closedness checks for the one-form data.
//! - [`claws`]: the conservation-law hierarchy generated from the Riccati
//!   series, with exact verification and an Euler-operator triviality test.
//! - [`riccati`]: numeric integration of the angle, Riccati and linear
//!   flows along paths on exact solutions, with equivalence checks.
//! - [`pdebench`]: exact solutions, spectral evolvers and conserved-integral
//!   drift measurement.

pub mod claws;
pub mod pdebench;
pub mod riccati;
pub mod structure;
pub mod symcore;

pub use symcore::{EvolutionModel, Expr, Generator, NormalForm, SymError};
