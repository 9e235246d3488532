//! Contour lower bounds for potentials of flowed zero measures.
//!
//! Cauchy's formula for the k-th derivative over a contour `Γ` enclosing
//! [-1, 1] gives, for the monic `Q_{n,k}`,
//!
//! ```text
//! U^{σ_{n,k}}(ζ) ≥ (1/n)·ln C(n,k) + (1/n)·ln(2π/|Γ|)
//!                  + min_{z∈Γ} ( U^{σ_{n,0}}(z) + ((k+1)/n)·ln|z − ζ| ).
//! ```
//!
//! With `Γ = Γ_A`, the ellipse `x²/A² + y²/(A² − 1) = 1` on which the arcsine
//! potential is constant, the limiting right-hand side becomes explicit, and
//! at `A = 1/√(1 − t²)` it equals the equilibrium constant minus `φ_t(ζ)`.

use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::EmpiricalMeasure;
use crate::numerics::quadrature::integrate_adaptive;
use crate::numerics::{golden, xlogx};
use crate::polyflow::FlowRecord;
use crate::potential::{avoid_atoms, potential_discrete, zhukovski_inverse};

/// Sample count of the uniform angle grid on `Γ_A` before golden refinement.
pub const CONTOUR_SAMPLES: usize = 4096;
/// Angle tolerance of the golden-section refinement.
pub const ANGLE_TOL: f64 = 1e-12;

/// The ellipse `Γ_A`: semi-axes `A` and `√(A² − 1)`, foci at ±1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseContour {
    a: f64,
}

impl EllipseContour {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 1.0) || !a.is_finite() {
            return Err(Error::domain(format!(
                "ellipse parameter A = {a} must exceed 1"
            )));
        }
        Ok(Self { a })
    }

    pub fn semi_major(&self) -> f64 {
        self.a
    }

    pub fn semi_minor(&self) -> f64 {
        ((self.a - 1.0) * (self.a + 1.0)).sqrt()
    }

    pub fn point(&self, theta: f64) -> Complex64 {
        Complex64::new(self.a * theta.cos(), self.semi_minor() * theta.sin())
    }

    /// `|Φ|` on the contour, `A + √(A² − 1)`.
    pub fn level(&self) -> f64 {
        self.a + self.semi_minor()
    }

    pub fn perimeter(&self) -> Result<f64> {
        let (a, b) = (self.a, self.semi_minor());
        integrate_adaptive(|th| (a * th.sin()).hypot(b * th.cos()), 0.0, TAU, 1e-13)
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..1.0).contains(&v) {
        return Err(Error::domain(format!("{name} = {v} outside [0, 1)")));
    }
    Ok(())
}

fn check_zeta(zeta: f64) -> Result<()> {
    if !(zeta.abs() <= 1.0) {
        return Err(Error::domain(format!("zeta = {zeta} outside [-1, 1]")));
    }
    Ok(())
}

/// `c_t = t·ln t + (1 − t)·ln(1 − t)`, with `c_0 = 0`.
pub fn stirling_constant(t: f64) -> Result<f64> {
    check_unit("t", t)?;
    Ok(xlogx(t) + xlogx(1.0 - t))
}

/// `(1/n)·ln C(n, k)` through log-gamma.
pub fn binomial_rate(n: u64, k: u64) -> Result<f64> {
    if n == 0 || k > n {
        return Err(Error::domain(format!(
            "binomial_rate needs 0 <= k <= n, n >= 1 (n = {n}, k = {k})"
        )));
    }
    let lg = |m: u64| libm::lgamma(m as f64 + 1.0);
    Ok((lg(n) - lg(k) - lg(n - k)) / n as f64)
}

/// `min_{z∈Γ_A} ln|z − ζ|` from the critical points of the constrained problem.
///
/// With `ξ = |ζ|`, the squared distance restricted to the ellipse is the
/// convex function `x²/A² − 2ξx + ξ² + A² − 1` of the abscissa `x ∈ [−A, A]`.
/// Its candidates are the vertex `(A, 0)` and, when `ξA² ≤ A`, the interior
/// point `(ξA², ±√((A² − 1)(1 − ξ²A²)))`. Both squared distances are taken
/// from coordinates.
pub fn ellipse_min_log_distance(a: f64, zeta: f64) -> Result<f64> {
    let contour = EllipseContour::new(a)?;
    check_zeta(zeta)?;
    let xi = zeta.abs();
    let vertex = (a - xi).powi(2);
    let mut best = vertex;
    if xi * a <= 1.0 {
        let x = xi * a * a;
        let y2 = contour.semi_minor().powi(2) * (1.0 - (xi * a).powi(2)).max(0.0);
        best = best.min((x - xi).powi(2) + y2);
    }
    Ok(0.5 * best.ln())
}

/// Sampled minimum of `ln|z − ζ|` over `Γ_A`, refined by golden-section search.
pub fn ellipse_min_brute(a: f64, zeta: f64, samples: usize) -> Result<f64> {
    let contour = EllipseContour::new(a)?;
    check_zeta(zeta)?;
    if samples < 1000 {
        return Err(Error::domain(format!("samples = {samples} below 1000")));
    }
    let b = contour.semi_minor();
    let f = |th: f64| 0.5 * ((a * th.cos() - zeta).powi(2) + (b * th.sin()).powi(2)).ln();
    Ok(golden::minimize_periodic(f, 0.0, TAU, samples, ANGLE_TOL).1)
}

/// `(A − ζ)² − (A² − 1)(1 − ζ²) − (ζA − 1)²`, identically zero.
pub fn lower_bound_inequality_check(a: f64, zeta: f64) -> f64 {
    (a - zeta).powi(2) - (a * a - 1.0) * (1.0 - zeta * zeta) - (zeta * a - 1.0).powi(2)
}

/// `−c_t + ln 2 − ln|Φ(A)| + (t/2)·ln(A² − 1) + (t/2)·ln(1 − ζ²)`.
pub fn contour_lower_bound(t: f64, zeta: f64, a: f64) -> Result<f64> {
    check_unit("t", t)?;
    let contour = EllipseContour::new(a)?;
    if !(zeta.abs() < 1.0) {
        return Err(Error::domain(format!(
            "zeta = {zeta} must satisfy |zeta| < 1"
        )));
    }
    let phi = zhukovski_inverse(Complex64::new(a, 0.0)).norm();
    Ok(-stirling_constant(t)? + LN_2 - phi.ln()
        + t * contour.semi_minor().ln()
        + 0.5 * t * ((1.0 - zeta) * (1.0 + zeta)).ln())
}

/// `A = 1/√(1 − t²)`.
pub fn optimal_contour_parameter(t: f64) -> Result<f64> {
    check_unit("t", t)?;
    if t == 0.0 {
        return Err(Error::domain("at t = 0 the bound increases toward A = 1"));
    }
    Ok(1.0 / (1.0 - t * t).sqrt())
}

/// Maximiser of [`contour_lower_bound`] over `A > 1`, found numerically.
///
/// The search runs in `u` with `A = cosh u`, where the `A`-dependent part of
/// the bound is `−u + t·ln sinh u`.
pub fn optimal_contour_parameter_search(t: f64) -> Result<f64> {
    check_unit("t", t)?;
    if t == 0.0 {
        return Err(Error::domain("at t = 0 the bound increases toward A = 1"));
    }
    let (u, _) = golden::maximize(|u| -u + t * u.sinh().ln(), 1e-12, 10.0, 1e-13);
    Ok(u.cosh())
}

/// One row of a finite-n bound check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub zeta: f64,
    /// `U^{σ_{n,k}}(ζ)`.
    pub lhs: f64,
    /// `−c_{k/n} + min_{Γ_A}(U^{σ_{n,0}} + ((k+1)/n)·ln|z − ζ|)`.
    pub rhs: f64,
    pub slack: f64,
    /// The same bound with the exact finite-n constant
    /// `(1/n)·(ln C(n,k) + ln(2π/|Γ_A|))` in place of `−c_{k/n}`.
    pub exact_rhs: f64,
    pub n: usize,
    pub k: usize,
    pub t: f64,
    pub contour_a: f64,
}

/// Compares `U^{σ_{n,k}}(ζ)` with the contour bound on `Γ_A` at each `ζ`.
pub fn verify_flow_bound(
    record: &FlowRecord,
    a: f64,
    zeta_grid: &[f64],
) -> Result<Vec<BoundReport>> {
    let contour = EllipseContour::new(a)?;
    let (n, k) = (record.n, record.k);
    let t = record.t_effective;
    let initial = EmpiricalMeasure::initial_of(record);
    let current = EmpiricalMeasure::from_record(record);
    let c_t = stirling_constant(t)?;
    let exact_constant =
        binomial_rate(n as u64, k as u64)? + (TAU / contour.perimeter()?).ln() / n as f64;
    let exponent = (k + 1) as f64 / n as f64;
    zeta_grid
        .par_iter()
        .map(|&zeta| {
            check_zeta(zeta)?;
            let zeta = avoid_atoms(&current, zeta);
            let lhs = potential_discrete(&current, Complex64::new(zeta, 0.0));
            let contour_term = |th: f64| {
                let z = contour.point(th);
                potential_discrete(&initial, z) + exponent * (z - zeta).norm().ln()
            };
            let (_, min) =
                golden::minimize_periodic(contour_term, 0.0, TAU, CONTOUR_SAMPLES, ANGLE_TOL);
            let rhs = -c_t + min;
            Ok(BoundReport {
                zeta,
                lhs,
                rhs,
                slack: lhs - rhs,
                exact_rhs: exact_constant + min,
                n,
                k,
                t,
                contour_a: a,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyflow::Generator;
    use crate::potential::{equilibrium_constant, external_field, ExternalField};
    use std::f64::consts::PI;

    #[test]
    fn stirling_values() {
        assert_eq!(stirling_constant(0.0).unwrap(), 0.0);
        assert!((stirling_constant(0.5).unwrap() + LN_2).abs() < 1e-16);
        let c9 = 0.9 * 0.9f64.ln() + 0.1 * 0.1f64.ln();
        assert!((stirling_constant(0.9).unwrap() - c9).abs() < 1e-16);
        assert!(stirling_constant(1.0 - 1e-6).unwrap().abs() < 2e-5);
        for i in 1..100 {
            let t = f64::from(i) / 100.0;
            let c = stirling_constant(t).unwrap();
            assert!((-LN_2 - 1e-16..0.0).contains(&c));
        }
        assert!(stirling_constant(1.0).is_err());
    }

    #[test]
    fn binomial_rate_values() {
        assert!((binomial_rate(4, 2).unwrap() - 6f64.ln() / 4.0).abs() < 1e-15);
        assert!(binomial_rate(10, 0).unwrap().abs() < 1e-15);
        assert!((binomial_rate(10_000, 5_000).unwrap() - LN_2).abs() < 1e-3);
        assert!(binomial_rate(3, 4).is_err());
        assert!(binomial_rate(0, 0).is_err());
    }

    #[test]
    fn ellipse_minimum_cases() {
        let half_log3 = 0.5 * 3f64.ln();
        assert!((ellipse_min_log_distance(2.0, 0.0).unwrap() - half_log3).abs() < 1e-15);
        assert!((ellipse_min_log_distance(2.0, 0.5).unwrap() - 1.5f64.ln()).abs() < 1e-15);
        assert!((ellipse_min_brute(2.0, 0.0, 1000).unwrap() - half_log3).abs() < 1e-12);
        // interior critical point is the minimiser when ζA < 1
        let (a, z) = (1.5, 0.4);
        let closed = ellipse_min_log_distance(a, z).unwrap();
        assert!(closed < (a - z).ln());
        assert!((closed - ellipse_min_brute(a, z, 4000).unwrap()).abs() < 1e-9);
        assert_eq!(
            ellipse_min_log_distance(a, -z).unwrap(),
            ellipse_min_log_distance(a, z).unwrap()
        );
        assert!(ellipse_min_log_distance(1.0, 0.0).is_err());
        assert!(ellipse_min_log_distance(2.0, 1.1).is_err());
        assert!(ellipse_min_brute(2.0, 0.0, 10).is_err());
    }

    #[test]
    fn brute_refinement_is_monotone() {
        for &(a, z) in &[(1.3, 0.2), (2.5, -0.9), (4.0, 0.05)] {
            let coarse = ellipse_min_brute(a, z, 1000).unwrap();
            let fine = ellipse_min_brute(a, z, 2000).unwrap();
            assert!(fine <= coarse + 1e-12);
        }
    }

    #[test]
    fn identity_and_consequence() {
        assert!(lower_bound_inequality_check(2.0, 0.3).abs() < 1e-14);
        for i in 0..20 {
            let a = 1.05 + 0.2 * f64::from(i);
            for j in -10..=10 {
                let z = f64::from(j) / 10.0;
                assert!(lower_bound_inequality_check(a, z).abs() < 1e-13);
                let lower = 0.5 * (a * a - 1.0).ln() + 0.5 * (1.0 - z * z).ln();
                assert!(ellipse_min_log_distance(a, z).unwrap() >= lower - 1e-12);
            }
        }
    }

    #[test]
    fn contour_bound_at_t_zero_approaches_log2() {
        let near_one = contour_lower_bound(0.0, 0.3, 1.0 + 1e-12).unwrap();
        assert!((near_one - LN_2).abs() < 1e-5);
        let far = contour_lower_bound(0.0, 0.3, 3.0).unwrap();
        assert!(far < near_one);
        assert!(contour_lower_bound(0.5, 1.0, 2.0).is_err());
    }

    #[test]
    fn optimal_parameter_recovers_equilibrium_constant() {
        for i in 1..10 {
            let t = f64::from(i) / 10.0;
            let a = optimal_contour_parameter(t).unwrap();
            assert!((optimal_contour_parameter_search(t).unwrap() - a).abs() < 1e-6);
            let field = ExternalField::new(t).unwrap();
            for zeta in [-0.7, 0.0, 0.4] {
                let chained = contour_lower_bound(t, zeta, a).unwrap()
                    + external_field(&field, zeta).unwrap();
                assert!((chained - equilibrium_constant(t).unwrap()).abs() < 1e-10);
            }
        }
        assert!(optimal_contour_parameter(0.0).is_err());
    }

    #[test]
    fn perimeter_of_circle_limit() {
        // A large: the ellipse approaches a circle of radius A
        let e = EllipseContour::new(1e4).unwrap();
        assert!((e.perimeter().unwrap() / (TAU * 1e4) - 1.0).abs() < 1e-8);
        let e = EllipseContour::new(5.0 / 4.0).unwrap();
        assert!((e.level() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn flow_bound_without_differentiation() {
        let rec = Generator::Chebyshev.flow(60, 0).unwrap();
        let a = optimal_contour_parameter(0.5).unwrap();
        let reports = verify_flow_bound(&rec, a, &[-0.5, 0.0, 0.5]).unwrap();
        for r in &reports {
            assert!(r.rhs <= r.lhs, "{r:?}");
            assert!(r.exact_rhs <= r.lhs + 1e-12, "{r:?}");
        }
    }

    #[test]
    fn exact_finite_n_bound_holds_after_flow() {
        let rec = Generator::ArcsineRandom { seed: 5 }.flow(80, 30).unwrap();
        let a = optimal_contour_parameter(0.375).unwrap();
        let zetas: Vec<f64> = (-9..=9).map(|i| f64::from(i) / 10.0).collect();
        for r in verify_flow_bound(&rec, a, &zetas).unwrap() {
            assert!(r.exact_rhs <= r.lhs + 1e-10, "{r:?}");
        }
    }

    #[test]
    fn optimal_contour_is_shorter_than_unit_circle() {
        // Γ_A with A = 2/√3 is shorter than the unit circle
        let e = EllipseContour::new(2.0 / 3f64.sqrt()).unwrap();
        assert!(e.perimeter().unwrap() < 2.0 * PI);
    }
}
