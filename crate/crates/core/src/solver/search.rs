//! One-dimensional search on the negative half-line: geometric bracketing
//! and golden-section maximisation of unimodal functions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Bracket {
    /// left < mid < right < 0 with f(mid) ≥ f(left) and f(mid) ≥ f(right).
    Interior { left: f64, mid: f64, right: f64 },
    /// f kept increasing as x → -∞ for the whole expansion budget; carries
    /// the last two samples (x, f(x)), most negative last.
    Unbounded { prev: (f64, f64), last: (f64, f64) },
}

/// Brackets the maximiser of a unimodal `f` on (-∞, 0) by sampling at
/// -2^j, moving left or right from -1 with expansion factor 2.
pub(crate) fn bracket_negative_max<F>(mut f: F, max_expand: usize) -> Result<Bracket>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut mid = -1.0;
    let mut fm = f(mid)?;
    let mut left = -2.0;
    let mut fl = f(left)?;
    if fl > fm {
        let mut right;
        for _ in 0..max_expand {
            right = mid;
            mid = left;
            fm = fl;
            left *= 2.0;
            fl = f(left)?;
            if fl <= fm {
                return Ok(Bracket::Interior { left, mid, right });
            }
        }
        return Ok(Bracket::Unbounded {
            prev: (mid, fm),
            last: (left, fl),
        });
    }
    let mut right = -0.5;
    let mut fr = f(right)?;
    for _ in 0..max_expand {
        if fr <= fm {
            return Ok(Bracket::Interior { left, mid, right });
        }
        left = mid;
        mid = right;
        fm = fr;
        right *= 0.5;
        fr = f(right)?;
    }
    Err(Error::Convergence(format!(
        "maximiser not bracketed away from 0 after {max_expand} halvings"
    )))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximisation of a unimodal `f` on [a, b], stopping when
/// the interval is below `rel_tol` relative to the current abscissa.
/// Returns the best sample seen.
pub(crate) fn golden_max<F>(mut f: F, mut a: f64, mut b: f64, rel_tol: f64, max_iter: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..max_iter {
        let scale = x1.abs().max(x2.abs()).max(f64::MIN_POSITIVE);
        if (b - a) <= rel_tol * scale {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Bisection for an increasing predicate boundary: `lo` satisfies
/// `below(lo)`, `hi` does not. Returns the final (lo, hi).
pub(crate) fn bisect<F>(mut below: F, mut lo: f64, mut hi: f64, rel_tol: f64, max_iter: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<bool>,
{
    for _ in 0..max_iter {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if (hi - lo).abs() <= rel_tol * mid.abs() {
            break;
        }
        if below(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets_to_the_left() {
        let f = |x: f64| Ok(-(x + 37.0).powi(2));
        match bracket_negative_max(f, 100).unwrap() {
            Bracket::Interior { left, mid, right } => {
                assert!(left < -37.0 && -37.0 < right && left < mid && mid < right);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn brackets_to_the_right() {
        let f = |x: f64| Ok(-(x + 0.003).powi(2));
        match bracket_negative_max(f, 100).unwrap() {
            Bracket::Interior { left, right, .. } => assert!(left < -0.003 && -0.003 < right),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn monotone_function_is_unbounded() {
        let f = |x: f64| Ok((-x).ln());
        assert!(matches!(
            bracket_negative_max(f, 30).unwrap(),
            Bracket::Unbounded { .. }
        ));
    }

    #[test]
    fn golden_finds_quadratic_peak() {
        let (x, fx) = golden_max(|x| Ok(-(x + 4.5).powi(2) + 1.0), -8.0, -1.0, 1e-12, 300).unwrap();
        // A quadratic peak pins x only to about sqrt(machine epsilon).
        assert!((x + 4.5).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bisect_square_root() {
        let (lo, hi) = bisect(|x| Ok(x * x < 2.0), 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((lo - 2f64.sqrt()).abs() < 1e-14 && (hi - 2f64.sqrt()).abs() < 1e-14);
    }
}
