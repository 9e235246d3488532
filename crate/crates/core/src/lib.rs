//! Zeros of iterated derivatives of real-rooted polynomials on [-1, 1].
//!
//! Start from `n` zeros distributed like the arcsine law and differentiate
//! `k ≈ t·n` times. The zero-counting measure of the result, scaled by `1/n`,
//! approaches the measure `μ_t` with density
//! `(1/π)·√(1 − t² − x²)/(1 − x²)` on `[−s, s]`, `s = √(1 − t²)`. That
//! measure is the equilibrium measure of total mass `1 − t` on [-1, 1] in
//! the external field `φ_t(x) = (t/2)·ln(1/|x² − 1|)`.
//!
//! Modules:
//! - [`polyflow`]: generators and the derivative flow on zeros;
//! - [`measures`]: empirical measures, `μ_t`, and distances between them;
//! - [`potential`]: logarithmic potentials, the external field, and the
//!   equilibrium conditions;
//! - [`bounds`]: the contour lower bound on potentials of flowed zeros;
//! - [`regression`]: frozen finite-n thresholds.

// `!(x < y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod measures;
pub mod numerics;
pub mod polyflow;
pub mod potential;
pub mod regression;

pub use bounds::{BoundReport, EllipseContour};
pub use error::{Error, Result};
pub use measures::{EmpiricalMeasure, LimitMeasure};
pub use polyflow::{FlowRecord, Generator, Root, RootMultiset};
pub use potential::{ExternalField, PotentialReport};
