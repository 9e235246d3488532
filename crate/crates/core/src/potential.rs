//! Logarithmic potentials, the two-point external field, and the equilibrium
//! conditions satisfied by `μ_t`.
//!
//! `U^μ(z) = ∫ ln(1/|z − y|) dμ(y)`. For `μ_t` the integral is taken in the
//! angle variable `y = s·sinθ`. The log kernel is singular where `y` meets
//! `Re z`, so the angle interval is split there and each half is integrated
//! on a mesh graded geometrically toward the split point.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{EmpiricalMeasure, LimitMeasure};
use crate::numerics::quadrature::{integrate_adaptive, integrate_graded, rule};
use crate::numerics::{xlogx, CompensatedSum};

/// Distance kept from ±1 on evaluation grids, where the field diverges.
pub const ENDPOINT_MARGIN: f64 = 1e-6;
/// Grid points closer than this to an atom are pushed off it.
pub const ATOM_PERTURBATION: f64 = 1e-9;
/// Successive refinements of `potential_mu_t` must agree to this.
pub const POTENTIAL_TOL: f64 = 1e-9;
/// Graded panels on each side of the singular angle.
const GRADED_LEVELS: u32 = 16;
/// Initial per-panel order is `2^4`, so 2 × 16 × 16 = 512 nodes.
const BASE_LOG2_ORDER: u32 = 4;
const MAX_DOUBLINGS: u32 = 4;
/// Closed form and quadrature of `u_φ(∞)` must agree to this.
pub const U_PHI_AGREEMENT: f64 = 1e-8;

/// `U^e(z)` for a discrete measure; `+∞` at an atom.
pub fn potential_discrete(e: &EmpiricalMeasure, z: Complex64) -> f64 {
    let mut acc = CompensatedSum::new();
    for &(x, w) in e.atoms() {
        let d = (z - x).norm();
        if d == 0.0 {
            return f64::INFINITY;
        }
        acc.add(-w * d.ln());
    }
    acc.value()
}

/// `U^{μ_t}(z)`.
///
/// Doubles the per-panel Gauss–Legendre order from 16 until two successive
/// values agree within [`POTENTIAL_TOL`]; after four doublings without
/// agreement the last two values are returned in the error.
pub fn potential_mu_t(m: &LimitMeasure, z: Complex64) -> Result<f64> {
    let s = m.s();
    let theta0 = m.angle_of(z.re);
    let offset = z.re - s * theta0.sin();
    let im2 = z.im * z.im;
    // Integrate in u = θ − θ0 so that graded nodes near the singularity stay
    // distinct from it in floating point.
    let kernel = |u: f64| {
        // z.re - s·sin(θ0 + u), written to keep full relative accuracy near u = 0
        let dx = offset - 2.0 * s * (theta0 + 0.5 * u).cos() * (0.5 * u).sin();
        -0.5 * (dx * dx + im2).ln() * m.angular_density(theta0 + u)
    };
    let eval = |log2_order: u32| {
        let r = rule(log2_order);
        integrate_graded(kernel, 0.0, FRAC_PI_2 - theta0, r, GRADED_LEVELS)
            - integrate_graded(kernel, 0.0, -FRAC_PI_2 - theta0, r, GRADED_LEVELS)
    };
    let mut previous = eval(BASE_LOG2_ORDER);
    for d in 1..=MAX_DOUBLINGS {
        let current = eval(BASE_LOG2_ORDER + d);
        if (current - previous).abs() < POTENTIAL_TOL {
            return Ok(current);
        }
        if d == MAX_DOUBLINGS {
            return Err(Error::NoConvergence {
                what: "potential of the limit measure",
                previous,
                last: current,
            });
        }
        previous = current;
    }
    unreachable!("the last doubling returns")
}

/// The field `φ_t(x) = (t/2)·ln(1/|x² − 1|)` of two charges `t/2` at ±1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExternalField {
    t: f64,
}

impl ExternalField {
    pub fn new(t: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::domain(format!("t = {t} outside [0, 1)")));
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// `φ_t(x)` for `|x| < 1`.
pub fn external_field(f: &ExternalField, x: f64) -> Result<f64> {
    if !(x.abs() < 1.0) {
        return Err(Error::domain(format!(
            "external field is infinite at |x| >= 1 (x = {x})"
        )));
    }
    if f.t == 0.0 {
        return Ok(0.0);
    }
    Ok(-0.5 * f.t * ((1.0 - x) * (1.0 + x)).ln())
}

/// `Φ(z) = z + (z² − 1)^{1/2}`, branch with positive root for `z > 1`.
///
/// Maps the complement of [-1, 1] onto the exterior of the unit disk. On the
/// cut it returns the boundary value from the upper half-plane.
pub fn zhukovski_inverse(z: Complex64) -> Complex64 {
    // A signed zero imaginary part would select the lower-half-plane limit.
    let z = if z.im == 0.0 {
        Complex64::new(z.re, 0.0)
    } else {
        z
    };
    z + (z - 1.0).sqrt() * (z + 1.0).sqrt()
}

/// `U^{μ_0}(z) = ln 2 − ln|Φ(z)|` for the arcsine law.
pub fn arcsine_potential(z: Complex64) -> f64 {
    LN_2 - zhukovski_inverse(z).norm().ln()
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::domain(format!("t = {t} outside [0, 1)")));
    }
    Ok(())
}

/// Equilibrium constant `m = ln 2 − ((1+t)/2)·ln(1+t) − ((1−t)/2)·ln(1−t)`.
pub fn equilibrium_constant(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(LN_2 - 0.5 * xlogx(1.0 + t) - 0.5 * xlogx(1.0 - t))
}

/// `u_φ(∞)`, the value at infinity of the Dirichlet solution off `[−s, s]`
/// with boundary data `φ_t`.
///
/// Evaluated twice: as `t·(ln(2/s) − ln|Φ(1/s)|)` and as the quadrature
/// `(1/π)∫ φ_t(s·sinθ) dθ` over `[−π/2, π/2]`. Returns the closed form;
/// fails if the two disagree beyond [`U_PHI_AGREEMENT`].
pub fn u_phi_infinity(t: f64) -> Result<f64> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let s = (1.0 - t * t).sqrt();
    let closed = t * ((2.0 / s).ln() - zhukovski_inverse(Complex64::new(1.0 / s, 0.0)).norm().ln());
    let quad = integrate_adaptive(
        |th| {
            let c = s * th.cos();
            // 1 - s²sin²θ = t² + s²cos²θ
            -0.5 * t * (t * t + c * c).ln()
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        1e-13,
    )? / PI;
    if (closed - quad).abs() > U_PHI_AGREEMENT {
        return Err(Error::Disagreement {
            what: "u_phi at infinity",
            closed_form: closed,
            quadrature: quad,
        });
    }
    Ok(closed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub x: f64,
    /// `U^{μ_t}(x) + φ_t(x)`.
    pub value: f64,
    /// `value − m`.
    pub deviation: f64,
    pub in_support: bool,
}

/// Outcome of checking the equilibrium conditions of `μ_t` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialReport {
    pub t: f64,
    pub grid: Vec<PotentialSample>,
    pub m_reference: f64,
    pub max_abs_deviation_on_support: f64,
    /// `None` when every grid point lies in the support.
    pub min_slack_off_support: Option<f64>,
    pub tol_support: f64,
    pub tol_exterior: f64,
    pub passed: bool,
}

/// Uniform grid of `size` points on `[−1 + δ, 1 − δ]`.
pub fn interior_grid(size: usize) -> Vec<f64> {
    let lo = -1.0 + ENDPOINT_MARGIN;
    let h = 2.0 * (1.0 - ENDPOINT_MARGIN) / (size - 1) as f64;
    (0..size)
        .map(|i| {
            if i + 1 == size {
                -lo
            } else {
                lo + h * i as f64
            }
        })
        .collect()
}

/// Checks `U^{μ_t} + φ_t = m` on the support and `≥ m` off it.
pub fn verify_equilibrium(
    t: f64,
    grid_size: usize,
    tol_support: f64,
    tol_exterior: f64,
) -> Result<PotentialReport> {
    check_t(t)?;
    if grid_size < 16 {
        return Err(Error::domain(format!("grid_size = {grid_size} below 16")));
    }
    let m = LimitMeasure::new(t)?;
    let field = ExternalField::new(t)?;
    let m_reference = equilibrium_constant(t)?;
    let grid = interior_grid(grid_size)
        .into_par_iter()
        .map(|x| {
            let value = potential_mu_t(&m, Complex64::new(x, 0.0))? + external_field(&field, x)?;
            Ok(PotentialSample {
                x,
                value,
                deviation: value - m_reference,
                in_support: x.abs() <= m.s(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_abs_deviation_on_support = grid
        .iter()
        .filter(|p| p.in_support)
        .map(|p| p.deviation.abs())
        .fold(0.0, f64::max);
    let min_slack_off_support = grid
        .iter()
        .filter(|p| !p.in_support)
        .map(|p| p.deviation)
        .reduce(f64::min);
    let passed = max_abs_deviation_on_support <= tol_support
        && min_slack_off_support.is_none_or(|v| v >= -tol_exterior);
    Ok(PotentialReport {
        t,
        grid,
        m_reference,
        max_abs_deviation_on_support,
        min_slack_off_support,
        tol_support,
        tol_exterior,
        passed,
    })
}

/// Moves `x` at least [`ATOM_PERTURBATION`] away from the nearest atom.
pub fn avoid_atoms(e: &EmpiricalMeasure, x: f64) -> f64 {
    let atoms = e.atoms();
    let idx = atoms.partition_point(|a| a.0 < x);
    let nearest = [idx.checked_sub(1), Some(idx)]
        .into_iter()
        .flatten()
        .filter_map(|i| atoms.get(i))
        .map(|a| a.0)
        .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()));
    match nearest {
        Some(a) if (x - a).abs() < ATOM_PERTURBATION => {
            if x >= a {
                a + ATOM_PERTURBATION
            } else {
                a - ATOM_PERTURBATION
            }
        }
        _ => x,
    }
}

/// Grid proxy for the essential infimum of `U^e + φ_t` over [-1, 1].
pub fn essential_min_check(t: f64, e: &EmpiricalMeasure, grid_size: usize) -> Result<f64> {
    let field = ExternalField::new(t)?;
    if grid_size < 2 {
        return Err(Error::domain("grid needs at least two points"));
    }
    let values = interior_grid(grid_size)
        .into_par_iter()
        .map(|x| {
            let x = avoid_atoms(e, x);
            Ok(potential_discrete(e, Complex64::new(x, 0.0)) + external_field(&field, x)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(f64::INFINITY, f64::min))
}
