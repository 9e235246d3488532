//! Numerical building blocks shared by the flow, measure, potential and bound modules.

pub mod compensated;
pub mod golden;
pub mod quadrature;
pub mod tridiag;

pub use compensated::CompensatedSum;

/// `x * ln(x)` extended by continuity to `x = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}
