//! Zero-counting measures of flowed polynomials and the limit law `μ_t`.
//!
//! `μ_t` is handled in the angle variable `x = s·sinθ`, where its density
//! becomes `h(θ) = (1/π)·s²cos²θ/(t² + s²cos²θ)`, analytic on
//! `[−π/2, π/2]`. Every integral against `μ_t` in this module is a
//! Gauss–Legendre rule applied in that variable.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate_adaptive;
use crate::numerics::CompensatedSum;
use crate::polyflow::{FlowRecord, RootMultiset};

/// Absolute tolerance handed to the adaptive rule for CDF evaluations.
const CDF_QUAD_TOL: f64 = 1e-13;

/// Atoms `(location, multiplicity/n)`; total mass `(n − k)/n` after `k` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    atoms: Vec<(f64, f64)>,
    total_mass: f64,
    n: usize,
}

impl EmpiricalMeasure {
    /// `(1/n)·Σ mᵢ δ_{rᵢ}` for the zeros `r`.
    pub fn from_roots(r: &RootMultiset, n: usize) -> Result<Self> {
        if n < r.degree() {
            return Err(Error::domain(format!(
                "normalisation n = {n} below the number of zeros {}",
                r.degree()
            )));
        }
        let scale = 1.0 / n as f64;
        let atoms = r
            .roots()
            .iter()
            .map(|root| (root.location, f64::from(root.multiplicity) * scale))
            .collect();
        Ok(Self {
            atoms,
            total_mass: r.degree() as f64 * scale,
            n,
        })
    }

    /// `σ_{n,k}` for a flow record.
    pub fn from_record(rec: &FlowRecord) -> Self {
        Self::from_roots(&rec.state, rec.n).expect("flow state degree is n - k")
    }

    /// `σ_{n,0}` for a flow record.
    pub fn initial_of(rec: &FlowRecord) -> Self {
        Self::from_roots(&rec.initial, rec.n).expect("initial degree is n")
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// The normalising degree `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Image under `x ↦ −x`.
    pub fn reflected(&self) -> Self {
        Self {
            atoms: self.atoms.iter().rev().map(|&(x, w)| (-x, w)).collect(),
            total_mass: self.total_mass,
            n: self.n,
        }
    }

    /// Mass of `(−∞, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.0 <= x)
            .map(|a| a.1)
            .sum::<CompensatedSum>()
            .value()
    }
}

/// The limit law `μ_t`, of mass `1 − t`, supported on `[−s, s]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitMeasure {
    t: f64,
    s: f64,
}

impl LimitMeasure {
    pub fn new(t: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::domain(format!("t = {t} outside [0, 1)")));
        }
        Ok(Self {
            t,
            s: (1.0 - t * t).sqrt(),
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Right end of the support, `√(1 − t²)`.
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn total_mass(&self) -> f64 {
        1.0 - self.t
    }

    /// Density in the angle variable, `dμ_t = h(θ) dθ` with `x = s·sinθ`.
    pub fn angular_density(&self, theta: f64) -> f64 {
        if self.t == 0.0 {
            return 1.0 / PI;
        }
        let c = self.s * theta.cos();
        let c2 = c * c;
        c2 / (PI * (self.t * self.t + c2))
    }

    /// Angle of `x` in the support parametrisation, clamped to `[−π/2, π/2]`.
    pub fn angle_of(&self, x: f64) -> f64 {
        (x / self.s).clamp(-1.0, 1.0).asin()
    }

    /// `(1/π)·√(1 − t² − x²)/(1 − x²)` on the support, zero outside.
    ///
    /// At `x = ±1` with `t = 0` the density is unbounded and `+∞` is returned.
    pub fn density(&self, x: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::domain(format!("density needs |x| <= 1, got {x}")));
        }
        let ax = x.abs();
        if ax == 1.0 && self.t == 0.0 {
            return Ok(f64::INFINITY);
        }
        if ax >= self.s {
            return Ok(0.0);
        }
        let root = ((self.s - ax) * (self.s + ax)).sqrt();
        Ok(root / (PI * (1.0 - ax) * (1.0 + ax)))
    }

    /// `μ_t([−s, x])`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::domain(format!("cdf needs |x| <= 1, got {x}")));
        }
        if x <= -self.s {
            return Ok(0.0);
        }
        if x >= self.s {
            return Ok(self.total_mass());
        }
        self.mass_between_angles(-FRAC_PI_2, self.angle_of(x))
    }

    /// `μ_t` mass of the angle interval `[a, b]`.
    pub fn mass_between_angles(&self, a: f64, b: f64) -> Result<f64> {
        if self.t == 0.0 {
            return Ok((b - a) / PI);
        }
        integrate_adaptive(|th| self.angular_density(th), a, b, CDF_QUAD_TOL)
    }

    /// Angle `θ ≥ from` with `μ_t([from, θ]) = mass`, or `π/2` if the
    /// remaining mass is smaller.
    fn advance_angle(&self, from: f64, mass: f64) -> Result<f64> {
        let rest = self.mass_between_angles(from, FRAC_PI_2)?;
        if mass >= rest {
            return Ok(FRAC_PI_2);
        }
        let (mut lo, mut hi) = (from, FRAC_PI_2);
        let mut th = from + (mass / rest) * (FRAC_PI_2 - from);
        for _ in 0..200 {
            let g = self.mass_between_angles(from, th)? - mass;
            if g.abs() <= 1e-15 {
                break;
            }
            if g > 0.0 {
                hi = th;
            } else {
                lo = th;
            }
            let slope = self.angular_density(th);
            let newton = th - g / slope;
            th = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 1e-15 {
                break;
            }
        }
        Ok(th)
    }
}

fn check_regime(e: &EmpiricalMeasure, m: &LimitMeasure) -> Result<()> {
    if e.is_empty() {
        return Err(Error::domain("empirical measure has no atoms"));
    }
    let allowed = 2.0 / e.n() as f64;
    if (e.total_mass() - m.total_mass()).abs() > allowed + 1e-12 {
        return Err(Error::MassMismatch {
            empirical: e.total_mass(),
            limit: m.total_mass(),
            allowed,
        });
    }
    Ok(())
}

/// Kolmogorov–Smirnov distance between `e` and `m`, both scaled to
/// probability measures.
pub fn ks_distance(e: &EmpiricalMeasure, m: &LimitMeasure) -> Result<f64> {
    check_regime(e, m)?;
    let e_norm = e.total_mass();
    let m_norm = m.total_mass();
    let mut cum = Vec::with_capacity(e.atoms().len() + 1);
    let mut acc = CompensatedSum::new();
    cum.push(0.0);
    for &(_, w) in e.atoms() {
        acc.add(w);
        cum.push(acc.value() / e_norm);
    }
    let per_atom = e
        .atoms()
        .par_iter()
        .enumerate()
        .map(|(i, &(x, _))| {
            let g = m.cdf(x)? / m_norm;
            Ok((g - cum[i]).abs().max((g - cum[i + 1]).abs()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut d = per_atom.into_iter().fold(0.0, f64::max);
    // support endpoints
    d = d.max(e.cdf(-m.s()) / e_norm);
    d = d.max((1.0 - e.cdf(m.s()) / e_norm).abs());
    Ok(d)
}

/// Wasserstein-1 distance between `e` and `m`, both scaled to probability
/// measures, through the monotone (quantile) coupling: atom `i` is
/// transported from the slice of `μ_t` between the consecutive quantiles
/// matching its cumulative mass.
pub fn wasserstein1(e: &EmpiricalMeasure, m: &LimitMeasure) -> Result<f64> {
    check_regime(e, m)?;
    let e_norm = e.total_mass();
    let m_norm = m.total_mass();
    let s = m.s();
    let last = e.atoms().len() - 1;
    let mut total = CompensatedSum::new();
    let mut lower = -FRAC_PI_2;
    for (i, &(x, w)) in e.atoms().iter().enumerate() {
        let upper = if i == last {
            FRAC_PI_2
        } else {
            m.advance_angle(lower, w / e_norm * m_norm)?
        };
        let cost = |th: f64| (x - s * th.sin()).abs() * m.angular_density(th);
        let split = m.angle_of(x).clamp(lower, upper);
        total.add(integrate_adaptive(cost, lower, split, 1e-14)?);
        total.add(integrate_adaptive(cost, split, upper, 1e-14)?);
        lower = upper;
    }
    Ok(total.value() / m_norm)
}
