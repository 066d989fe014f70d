//! Switchable dipole-dipole phase gates between polar molecules.
//!
//! - [`units`]: Gaussian-CGS constants and laboratory-unit conversions.
//! - [`geometry`]: interaction phase versus position and orientation, error budgets.
//! - [`dynamics`]: blockade pulse sequences and gate extraction.
//! - [`molecules`]: presets, hyperfine structure, dressed states.
//! - [`feasibility`]: closed-form estimates and reports.
//! - [`sweep`], [`reproduce`]: parameter grids and the reference-number suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod feasibility;
pub mod geometry;
pub mod molecules;
pub mod reproduce;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use units::{Dimension, Quantity, Unit};
