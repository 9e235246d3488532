//! Eigenvalues of symmetric tridiagonal matrices by Sturm-count bisection.

/// Pivots smaller than this are replaced to keep the LDLᵀ recurrence finite.
const PIVOT_GUARD: f64 = 1e-300;

/// Number of eigenvalues strictly below `x`.
///
/// `diag` has length n and `offdiag_sq` holds the n−1 squared off-diagonal
/// entries. The count is the number of negative pivots of `T − xI = LDLᵀ`.
pub fn sturm_count(diag: &[f64], offdiag_sq: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (i, &a) in diag.iter().enumerate() {
        let coupling = if i == 0 { 0.0 } else { offdiag_sq[i - 1] / d };
        d = a - x - coupling;
        if d.abs() < PIVOT_GUARD {
            d = -PIVOT_GUARD;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues in ascending order, each located by bisection on
/// `[lower, upper]` to absolute width `tol`.
///
/// The caller guarantees every eigenvalue lies in `[lower, upper]`.
pub fn eigenvalues_bisection(
    diag: &[f64],
    offdiag_sq: &[f64],
    lower: f64,
    upper: f64,
    tol: f64,
) -> Vec<f64> {
    let n = diag.len();
    debug_assert_eq!(offdiag_sq.len() + 1, n.max(1));
    (0..n)
        .map(|j| {
            // j-th eigenvalue: smallest x with count(x) > j
            let (mut lo, mut hi) = (lower, upper);
            for _ in 0..200 {
                if hi - lo <= tol {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if sturm_count(diag, offdiag_sq, mid) > j {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}
