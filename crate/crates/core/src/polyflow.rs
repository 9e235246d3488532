//! Real-rooted polynomials on [-1, 1] and their zeros under repeated
//! differentiation.
//!
//! A polynomial is represented only by its zeros. The zeros of the derivative
//! are found gap by gap: between two adjacent distinct zeros the logarithmic
//! derivative `S(x) = Σ mᵢ/(x − rᵢ)` decreases strictly from +∞ to −∞, so it
//! has exactly one root there. A zero of multiplicity `m ≥ 2` survives with
//! multiplicity `m − 1`. No coefficients are ever formed.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{tridiag, CompensatedSum};

/// Relative distance below which two locations are the same zero.
pub const MERGE_THRESHOLD: f64 = 1e-12;
/// Absolute width at which gap bisection stops.
pub const BISECTION_TOL: f64 = 1e-13;
pub const BISECTION_MAX_ITER: usize = 60;
pub const NEWTON_POLISH_STEPS: usize = 3;
/// Name of the seeded generator used by [`sample_arcsine_roots`].
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub location: f64,
    pub multiplicity: u32,
}

/// Sorted real zeros in [-1, 1] with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Root>", into = "Vec<Root>")]
pub struct RootMultiset {
    roots: Vec<Root>,
    degree: usize,
}

fn same_location(a: f64, b: f64) -> bool {
    (a - b).abs() < MERGE_THRESHOLD * a.abs().max(b.abs()).max(1.0)
}

impl RootMultiset {
    /// Builds a multiset from `(location, multiplicity)` pairs in any order.
    ///
    /// Locations closer than the merge threshold are fused (multiplicity-weighted
    /// mean location, multiplicities added).
    pub fn new<I: IntoIterator<Item = (f64, u32)>>(pairs: I) -> Result<Self> {
        let mut pairs: Vec<(f64, u32)> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(Error::InvalidRoots("no zeros given".into()));
        }
        for &(x, m) in &pairs {
            if !x.is_finite() || !(-1.0..=1.0).contains(&x) {
                return Err(Error::InvalidRoots(format!("location {x} outside [-1, 1]")));
            }
            if m == 0 {
                return Err(Error::InvalidRoots(format!("zero multiplicity at {x}")));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut roots: Vec<Root> = Vec::with_capacity(pairs.len());
        for (x, m) in pairs {
            match roots.last_mut() {
                Some(last) if same_location(last.location, x) => {
                    let total = last.multiplicity + m;
                    last.location = (last.location * f64::from(last.multiplicity)
                        + x * f64::from(m))
                        / f64::from(total);
                    last.multiplicity = total;
                }
                _ => roots.push(Root {
                    location: x,
                    multiplicity: m,
                }),
            }
        }
        let degree = roots.iter().map(|r| r.multiplicity as usize).sum();
        Ok(Self { roots, degree })
    }

    /// Multiset of simple zeros (duplicates are merged).
    pub fn from_locations<I: IntoIterator<Item = f64>>(locations: I) -> Result<Self> {
        Self::new(locations.into_iter().map(|x| (x, 1)))
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of distinct locations.
    pub fn distinct(&self) -> usize {
        self.roots.len()
    }

    pub fn locations(&self) -> impl DoubleEndedIterator<Item = f64> + ExactSizeIterator + '_ {
        self.roots.iter().map(|r| r.location)
    }

    /// Locations repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.location, r.multiplicity as usize))
            .collect()
    }

    pub fn min_location(&self) -> f64 {
        self.roots[0].location
    }

    pub fn max_location(&self) -> f64 {
        self.roots[self.roots.len() - 1].location
    }

    /// True if `x ↦ −x` maps the multiset onto itself within `tol`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.roots.len();
        (0..n).all(|i| {
            let (a, b) = (self.roots[i], self.roots[n - 1 - i]);
            a.multiplicity == b.multiplicity && (a.location + b.location).abs() <= tol
        })
    }

    /// The logarithmic derivative `p'/p` of the monic polynomial at `x`.
    pub fn log_derivative(&self, x: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for r in &self.roots {
            acc.add(f64::from(r.multiplicity) / (x - r.location));
        }
        acc.value()
    }

    /// `S(x)` together with `S'(x) = −Σ mᵢ/(x − rᵢ)²`.
    pub fn log_derivative_with_slope(&self, x: f64) -> (f64, f64) {
        let mut s = CompensatedSum::new();
        let mut ds = CompensatedSum::new();
        for r in &self.roots {
            let inv = 1.0 / (x - r.location);
            let m = f64::from(r.multiplicity);
            s.add(m * inv);
            ds.add(-m * inv * inv);
        }
        (s.value(), ds.value())
    }
}

impl TryFrom<Vec<Root>> for RootMultiset {
    type Error = Error;

    fn try_from(roots: Vec<Root>) -> Result<Self> {
        Self::new(roots.into_iter().map(|r| (r.location, r.multiplicity)))
    }
}

impl From<RootMultiset> for Vec<Root> {
    fn from(r: RootMultiset) -> Self {
        r.roots
    }
}

/// Zeros of the degree-n Chebyshev polynomial of the first kind,
/// `cos((2j − 1)π/(2n))`, ascending.
pub fn chebyshev_roots(n: usize) -> Result<RootMultiset> {
    if n == 0 {
        return Err(Error::domain("chebyshev_roots needs n >= 1"));
    }
    let nf = n as f64;
    // sin form: exact zero at the centre and exact ± pairs
    let xs = (1..=n).map(|j| ((nf - 2.0 * j as f64 + 1.0) * PI / (2.0 * nf)).sin());
    RootMultiset::from_locations(xs)
}

/// `n` independent draws `cos(πu)`, `u` uniform on (0, 1), from a ChaCha8
/// stream seeded with `seed`.
pub fn sample_arcsine_roots(n: usize, seed: u64) -> Result<RootMultiset> {
    if n == 0 {
        return Err(Error::domain("sample_arcsine_roots needs n >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..n)
        .map(|_| loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break (PI * u).cos();
            }
        })
        .collect();
    RootMultiset::from_locations(xs)
}

/// Recurrence coefficients `(a_k, b_k)` of the monic Jacobi polynomials,
/// `p_{k+1} = (x − a_k) p_k − b_k p_{k−1}`: `a_0..a_{n−1}` and `b_1..b_{n−1}`.
fn jacobi_recurrence(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let diag = (0..n)
        .map(|k| {
            let kf = k as f64;
            if k == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
            }
        })
        .collect();
    let off = (1..n)
        .map(|k| {
            let kf = k as f64;
            if k == 1 {
                // the general formula is 0/0 when alpha + beta = -1
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let c = 2.0 * kf + ab;
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (c * c * (c + 1.0) * (c - 1.0))
            }
        })
        .collect();
    (diag, off)
}

/// Zeros of the degree-n Jacobi polynomial `P_n^{(α, β)}`, as the eigenvalues
/// of its Jacobi matrix located by Sturm-count bisection.
pub fn jacobi_roots(n: usize, alpha: f64, beta: f64) -> Result<RootMultiset> {
    if n == 0 {
        return Err(Error::domain("jacobi_roots needs n >= 1"));
    }
    if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::domain(format!(
            "Jacobi parameters must exceed -1 (alpha = {alpha}, beta = {beta})"
        )));
    }
    let (diag, off) = jacobi_recurrence(n, alpha, beta);
    let ev = tridiag::eigenvalues_bisection(&diag, &off, -1.0, 1.0, BISECTION_TOL);
    RootMultiset::from_locations(ev)
}

/// Root of `S` on the open gap `(lo, hi)` between adjacent distinct zeros.
fn gap_root(r: &RootMultiset, lo: f64, hi: f64) -> Result<f64> {
    let width = hi - lo;
    // Any root of S in the gap lies at least width/(degree + 1) from both ends.
    let inset = width / (4.0 * (r.degree() as f64 + 1.0));
    let (mut a, mut b) = (lo + inset, hi - inset);
    if !(a < b) || !(r.log_derivative(a) > 0.0) || !(r.log_derivative(b) < 0.0) {
        return Err(Error::NoBracket { lo, hi });
    }
    for _ in 0..BISECTION_MAX_ITER {
        if b - a <= BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if r.log_derivative(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let mut x = 0.5 * (a + b);
    let (mut s, mut ds) = r.log_derivative_with_slope(x);
    for _ in 0..NEWTON_POLISH_STEPS {
        if s == 0.0 || ds == 0.0 {
            break;
        }
        let next = x - s / ds;
        if !(next > lo && next < hi) {
            break;
        }
        let (s_next, ds_next) = r.log_derivative_with_slope(next);
        if !(s_next.abs() < s.abs()) {
            break;
        }
        x = next;
        s = s_next;
        ds = ds_next;
    }
    Ok(x)
}

/// Zeros of `p'` for the monic `p` with zeros `r`.
pub fn derivative_roots(r: &RootMultiset) -> Result<RootMultiset> {
    if r.degree() < 2 {
        return Err(Error::domain(format!(
            "derivative_roots needs degree >= 2, got {}",
            r.degree()
        )));
    }
    let roots = r.roots();
    let new: Vec<f64> = roots
        .par_windows(2)
        .with_min_len(64)
        .map(|w| gap_root(r, w[0].location, w[1].location))
        .collect::<Result<_>>()?;
    let kept = roots
        .iter()
        .filter(|root| root.multiplicity >= 2)
        .map(|root| (root.location, root.multiplicity - 1));
    RootMultiset::new(kept.chain(new.into_iter().map(|x| (x, 1))))
}

/// Iterator over successive derivatives, starting with the input itself.
#[derive(Debug, Clone)]
pub struct DerivativeFlow {
    next: Option<RootMultiset>,
}

impl DerivativeFlow {
    pub fn new(start: RootMultiset) -> Self {
        Self { next: Some(start) }
    }
}

impl Iterator for DerivativeFlow {
    type Item = Result<RootMultiset>;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        if current.degree() >= 2 {
            match derivative_roots(&current) {
                Ok(d) => self.next = Some(d),
                Err(e) => return Some(Err(e)),
            }
        }
        Some(Ok(current))
    }
}

/// How an initial configuration of zeros was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Generator {
    Chebyshev,
    Jacobi {
        alpha: f64,
        beta: f64,
    },
    ArcsineRandom {
        seed: u64,
    },
    /// Zeros supplied directly by the caller.
    Custom,
}

impl Generator {
    pub fn generate(&self, n: usize) -> Result<RootMultiset> {
        match *self {
            Generator::Chebyshev => chebyshev_roots(n),
            Generator::Jacobi { alpha, beta } => jacobi_roots(n, alpha, beta),
            Generator::ArcsineRandom { seed } => sample_arcsine_roots(n, seed),
            Generator::Custom => Err(Error::domain("custom zeros cannot be regenerated")),
        }
    }

    /// Name of the pseudo-random generator, if this generator uses one.
    pub fn rng_algorithm(&self) -> Option<&'static str> {
        matches!(self, Generator::ArcsineRandom { .. }).then_some(RNG_ALGORITHM)
    }

    pub fn seed(&self) -> Option<u64> {
        match *self {
            Generator::ArcsineRandom { seed } => Some(seed),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Generator::Chebyshev => "chebyshev",
            Generator::Jacobi { .. } => "jacobi",
            Generator::ArcsineRandom { .. } => "arcsine-random",
            Generator::Custom => "custom",
        }
    }

    /// Generates `n` zeros and differentiates `k` times.
    pub fn flow(&self, n: usize, k: usize) -> Result<FlowRecord> {
        let mut rec = flow(&self.generate(n)?, k)?;
        rec.generator = self.clone();
        Ok(rec)
    }
}

/// The zeros of `Q_{n,k}` together with the configuration they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub n: usize,
    pub k: usize,
    pub t_effective: f64,
    pub initial: RootMultiset,
    pub state: RootMultiset,
    pub generator: Generator,
}

/// Differentiates `k` times; the initial degree is `r.degree()`.
pub fn flow(r: &RootMultiset, k: usize) -> Result<FlowRecord> {
    let n = r.degree();
    if k >= n {
        return Err(Error::domain(format!(
            "derivative order k = {k} must be below the degree {n}"
        )));
    }
    let state = DerivativeFlow::new(r.clone())
        .nth(k)
        .expect("flow yields degree-many states")?;
    Ok(FlowRecord {
        n,
        k,
        t_effective: k as f64 / n as f64,
        initial: r.clone(),
        state,
        generator: Generator::Custom,
    })
}

/// `Σ mᵢ ln|z − rᵢ|`, the log-modulus of the monic polynomial with zeros `r`.
///
/// Returns negative infinity when `z` coincides with a zero.
pub fn log_abs_value(r: &RootMultiset, z: Complex64) -> f64 {
    let mut acc = CompensatedSum::new();
    for root in r.roots() {
        let d = (z - root.location).norm();
        if d == 0.0 {
            return f64::NEG_INFINITY;
        }
        acc.add(f64::from(root.multiplicity) * d.ln());
    }
    acc.value()
}
