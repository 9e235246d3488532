//! Golden-section search for unimodal functions of one variable.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimizes `f` on `[a, b]` until the bracket is narrower than `tol`.
///
/// Returns the abscissa and value of the best point evaluated. `f` is assumed
/// unimodal on the bracket; otherwise a local minimum is returned.
pub fn minimize<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // 200 iterations shrink any finite bracket below f64 resolution.
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes `f` on `[a, b]`; see [`minimize`].
pub fn maximize<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, v) = minimize(|x| -f(x), a, b, tol);
    (x, -v)
}

/// Samples `f` at `samples` uniformly spaced points of `[a, b)` (periodic
/// grid) and refines the best sample by golden-section search on the
/// bracket formed by its neighbours.
pub fn minimize_periodic<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    samples: usize,
    tol: f64,
) -> (f64, f64) {
    let h = (b - a) / samples as f64;
    let (mut best_x, mut best_v) = (a, f(a));
    for i in 1..samples {
        let x = a + h * i as f64;
        let v = f(x);
        if v < best_v {
            best_x = x;
            best_v = v;
        }
    }
    let (x, v) = minimize(&mut f, best_x - h, best_x + h, tol);
    if v < best_v {
        (x, v)
    } else {
        (best_x, best_v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        let (x, v) = minimize(|x| (x - 0.3).powi(2) + 1.0, -2.0, 5.0, 1e-12);
        // a flat minimum is resolved only to about sqrt(eps)
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maximizes_concave_function() {
        let (x, v) = maximize(|x| x.ln() - x, 0.01, 10.0, 1e-12);
        assert!((x - 1.0).abs() < 1e-6);
        assert!((v + 1.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_search_wraps_past_the_end_of_the_grid() {
        let tau = std::f64::consts::TAU;
        let (x, v) = minimize_periodic(|x| -x.cos(), 0.0, tau, 7, 1e-12);
        assert!(x.rem_euclid(tau) < 1e-6 || (tau - x.rem_euclid(tau)) < 1e-6);
        assert!((v + 1.0).abs() < 1e-12);
    }
}
