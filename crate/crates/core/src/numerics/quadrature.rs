//! Gauss–Legendre quadrature: fixed rules, adaptive bisection, and
//! geometrically graded composite rules for endpoint log singularities.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre three-term recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule to `f` on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = super::CompensatedSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

const CACHED_ORDERS: usize = 11;
static RULES: [OnceLock<GaussLegendre>; CACHED_ORDERS] = [const { OnceLock::new() }; CACHED_ORDERS];

/// Shared rule of order `2^log2_order` (orders 1 through 1024).
pub fn rule(log2_order: u32) -> &'static GaussLegendre {
    let idx = log2_order as usize;
    assert!(
        idx < CACHED_ORDERS,
        "rule order 2^{log2_order} is not cached"
    );
    RULES[idx].get_or_init(|| GaussLegendre::new(1 << idx))
}

/// Adaptive bisection with a 20-point rule compared against its two halves.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    static BASE: OnceLock<GaussLegendre> = OnceLock::new();
    let base = BASE.get_or_init(|| GaussLegendre::new(20));
    if a == b {
        return Ok(0.0);
    }
    let whole = base.integrate(&f, a, b);
    adaptive_step(&f, base, a, b, whole, tol, 0)
}

fn adaptive_step<F: Fn(f64) -> f64>(
    f: &F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(f, a, mid);
    let right = rule.integrate(f, mid, b);
    let refined = left + right;
    if (refined - whole).abs() <= tol || mid <= a || mid >= b {
        return Ok(refined);
    }
    if depth >= 48 {
        return Err(Error::NoConvergence {
            what: "adaptive Gauss-Legendre quadrature",
            previous: whole,
            last: refined,
        });
    }
    let l = adaptive_step(f, rule, a, mid, left, 0.5 * tol, depth + 1)?;
    let r = adaptive_step(f, rule, mid, b, right, 0.5 * tol, depth + 1)?;
    Ok(l + r)
}

/// Ratio between consecutive panel lengths of the graded mesh.
pub const GRADING_RATIO: f64 = 0.15;

/// Composite rule on a mesh graded geometrically toward `singular`.
///
/// The panels are `[singular + σ^{j+1}·L, singular + σ^j·L]` for
/// `j = 0..levels-1` plus the innermost `[singular, singular + σ^levels·L]`
/// (with `L = other - singular`, `σ` = [`GRADING_RATIO`]), each integrated
/// with `rule`. For integrands with an integrable log singularity at
/// `singular`, the error decays exponentially in the rule order.
pub fn integrate_graded<F: FnMut(f64) -> f64>(
    mut f: F,
    singular: f64,
    other: f64,
    rule: &GaussLegendre,
    levels: u32,
) -> f64 {
    let len = other - singular;
    if len == 0.0 {
        return 0.0;
    }
    let mut acc = super::CompensatedSum::new();
    let mut outer = 1.0;
    for _ in 0..levels {
        let inner = outer * GRADING_RATIO;
        let (a, b) = (singular + inner * len, singular + outer * len);
        acc.add(rule.integrate(&mut f, a, b));
        outer = inner;
    }
    acc.add(rule.integrate(&mut f, singular, singular + outer * len));
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let r = GaussLegendre::new(5);
        // degree 9 is the highest exact degree for five nodes
        let v = r.integrate(|x| x.powi(9) + x.powi(8), -1.0, 1.0);
        assert!((v - 2.0 / 9.0).abs() < 1e-15);
        let w: f64 = r.weights().iter().sum();
        assert!((w - 2.0).abs() < 1e-15);
    }

    #[test]
    fn large_cached_rule_is_accurate() {
        let r = rule(10);
        assert_eq!(r.len(), 1024);
        let v = r.integrate(f64::exp, 0.0, 1.0);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-14);
        assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn adaptive_handles_sharp_peak() {
        let eps: f64 = 1e-3;
        let v = integrate_adaptive(|x| eps / (x * x + eps * eps), -1.0, 1.0, 1e-12).unwrap();
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn graded_rule_resolves_log_singularity() {
        // ∫_0^1 ln x dx = -1
        let v = integrate_graded(f64::ln, 0.0, 1.0, rule(4), 16);
        assert!((v + 1.0).abs() < 1e-10, "{v}");
        // reversed orientation: ∫_1^0 ln(1-x) dx = 1
        let w = integrate_graded(|x| (1.0 - x).ln(), 1.0, 0.0, rule(4), 16);
        assert!((w - 1.0).abs() < 1e-10, "{w}");
    }
}
