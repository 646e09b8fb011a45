//! Deterministic summation.

/// Sums `term(0) + ... + term(n - 1)` by a fixed pairwise tree over indices.
///
/// The reduction order depends only on `n`, so results are reproducible
/// bit-for-bit regardless of how the terms are produced.
pub(crate) fn pairwise<F>(n: usize, term: F) -> f64
where
    F: Fn(usize) -> f64,
{
    fn go<F: Fn(usize) -> f64>(lo: usize, hi: usize, term: &F) -> f64 {
        if hi - lo <= 8 {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += term(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, term) + go(mid, hi, term)
        }
    }
    go(0, n, &term)
}
