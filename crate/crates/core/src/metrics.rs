//! Agreement metrics for continuous prediction tracks.
//!
//! The primary score is the concordance correlation coefficient, which
//! penalizes both decorrelation and scale/location bias. All moments are
//! population moments (divide by n, not n-1).

use crate::error::{Error, Result};
use crate::scalar::Real;

struct Moments<T> {
    mean_a: T,
    mean_b: T,
    var_a: T,
    var_b: T,
    cov: T,
}

fn check_pair<T: Real>(a: &[T], b: &[T], min_len: usize) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < min_len {
        return Err(Error::TooShort {
            min: min_len,
            got: a.len(),
        });
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("score series".into()));
    }
    Ok(())
}

fn moments<T: Real>(a: &[T], b: &[T]) -> Moments<T> {
    let n = T::cast_usize(a.len());
    let mean_a = a.iter().copied().sum::<T>() / n;
    let mean_b = b.iter().copied().sum::<T>() / n;
    let mut var_a = T::zero();
    let mut var_b = T::zero();
    let mut cov = T::zero();
    for (&x, &y) in a.iter().zip(b.iter()) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        var_a += dx * dx;
        var_b += dy * dy;
        cov += dx * dy;
    }
    Moments {
        mean_a,
        mean_b,
        var_a: var_a / n,
        var_b: var_b / n,
        cov: cov / n,
    }
}

/// Concordance correlation: `2*cov / (var_a + var_b + (mean_a - mean_b)^2)`.
///
/// Returns 1 when the denominator vanishes (both series constant with equal
/// means: perfect agreement), and 0 when exactly one series is constant
/// (the covariance is zero while the denominator is not).
pub fn ccc<T: Real>(gold: &[T], pred: &[T]) -> Result<T> {
    check_pair(gold, pred, 2)?;
    let m = moments(gold, pred);
    let gap = m.mean_a - m.mean_b;
    let denom = m.var_a + m.var_b + gap * gap;
    if denom == T::zero() {
        return Ok(T::one());
    }
    Ok((T::one() + T::one()) * m.cov / denom)
}

/// Pearson correlation. Errors when either series has zero variance.
pub fn pearson<T: Real>(gold: &[T], pred: &[T]) -> Result<T> {
    check_pair(gold, pred, 2)?;
    let m = moments(gold, pred);
    if m.var_a == T::zero() || m.var_b == T::zero() {
        return Err(Error::ZeroVariance("pearson input".into()));
    }
    Ok(m.cov / (m.var_a.sqrt() * m.var_b.sqrt()))
}

/// Elementwise squared errors `(gold[i] - pred[i])^2`.
pub fn squared_errors<T: Real>(gold: &[T], pred: &[T]) -> Result<Vec<T>> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch {
            left: gold.len(),
            right: pred.len(),
        });
    }
    Ok(gold
        .iter()
        .zip(pred.iter())
        .map(|(&g, &p)| {
            let d = g - p;
            d * d
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn ccc_identity_is_one() {
        let y = [1.0, 2.0, 3.0];
        assert_eq!(ccc(&y, &y).unwrap(), 1.0);
    }

    #[test]
    fn ccc_reversed_is_minus_one() {
        let y = [1.0, 2.0, 3.0];
        let p = [3.0, 2.0, 1.0];
        assert_abs_diff_eq!(ccc(&y, &p).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn ccc_constant_shift() {
        // var = 2/3 each, cov = 2/3, gap = 1: 2*(2/3) / (4/3 + 1) = 4/7.
        let y = [1.0, 2.0, 3.0];
        let p = [2.0, 3.0, 4.0];
        assert_abs_diff_eq!(ccc(&y, &p).unwrap(), 4.0 / 7.0, epsilon = 1e-12);
    }

    #[test]
    fn ccc_one_constant_series_is_zero() {
        let y = [1.0, 2.0, 3.0];
        let p = [2.0, 2.0, 2.0];
        assert_eq!(ccc(&y, &p).unwrap(), 0.0);
    }

    #[test]
    fn ccc_both_constant_equal_is_one() {
        let y = [2.0, 2.0];
        assert_eq!(ccc(&y, &y).unwrap(), 1.0);
    }

    #[test]
    fn ccc_both_constant_different_means_is_zero() {
        let y = [2.0, 2.0];
        let p = [5.0, 5.0];
        assert_eq!(ccc(&y, &p).unwrap(), 0.0);
    }

    #[test]
    fn ccc_length_mismatch() {
        let e = ccc(&[1.0, 2.0], &[1.0]).unwrap_err();
        assert!(matches!(e, Error::LengthMismatch { left: 2, right: 1 }));
    }

    #[test]
    fn ccc_too_short() {
        let e = ccc(&[1.0], &[1.0]).unwrap_err();
        assert!(matches!(e, Error::TooShort { min: 2, got: 1 }));
    }

    #[test]
    fn ccc_rejects_non_finite() {
        let e = ccc(&[1.0, f64::NAN], &[1.0, 2.0]).unwrap_err();
        assert!(matches!(e, Error::NonFinite(_)));
    }

    #[test]
    fn pearson_perfect_line() {
        let y = [1.0, 2.0, 3.0];
        let p = [2.0, 4.0, 6.0];
        assert_abs_diff_eq!(pearson(&y, &p).unwrap(), 1.0, epsilon = 1e-12);
        // Same correlation, but CCC sees the scale mismatch.
        assert!(ccc(&y, &p).unwrap() < 1.0);
    }

    #[test]
    fn pearson_constant_errors() {
        let e = pearson(&[1.0, 2.0], &[3.0, 3.0]).unwrap_err();
        assert!(matches!(e, Error::ZeroVariance(_)));
    }

    #[test]
    fn squared_errors_basic() {
        let out = squared_errors(&[1.0, 2.0], &[3.0, 2.0]).unwrap();
        assert_eq!(out, vec![4.0, 0.0]);
        let e = squared_errors(&[1.0], &[1.0, 2.0]).unwrap_err();
        assert!(matches!(e, Error::LengthMismatch { .. }));
    }

    #[test]
    fn ccc_f32_matches_f64() {
        let y32 = [0.1f32, 0.4, -0.3, 0.9];
        let p32 = [0.2f32, 0.3, -0.1, 0.7];
        let y64: Vec<f64> = y32.iter().map(|&v| v as f64).collect();
        let p64: Vec<f64> = p32.iter().map(|&v| v as f64).collect();
        let c32 = ccc(&y32, &p32).unwrap() as f64;
        let c64 = ccc(&y64, &p64).unwrap();
        assert_abs_diff_eq!(c32, c64, epsilon = 1e-6);
    }

    fn series() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..40).prop_flat_map(|n| {
            (
                prop::collection::vec(-100.0f64..100.0, n),
                prop::collection::vec(-100.0f64..100.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn ccc_is_symmetric((a, b) in series()) {
            let x = ccc(&a, &b).unwrap();
            let y = ccc(&b, &a).unwrap();
            prop_assert!((x - y).abs() < 1e-12);
        }

        #[test]
        fn ccc_bounded_by_pearson((a, b) in series()) {
            let c = ccc(&a, &b).unwrap();
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&c));
            if let Ok(r) = pearson(&a, &b) {
                prop_assert!(c.abs() <= r.abs() + 1e-12);
            }
        }

        #[test]
        fn ccc_affine_invariant((a, b) in series(), scale in 0.1f64..10.0, shift in -50.0f64..50.0) {
            let base = ccc(&a, &b).unwrap();
            let a2: Vec<f64> = a.iter().map(|v| scale * v + shift).collect();
            let b2: Vec<f64> = b.iter().map(|v| scale * v + shift).collect();
            let moved = ccc(&a2, &b2).unwrap();
            prop_assert!((base - moved).abs() < 1e-9, "{base} vs {moved}");
        }
    }
}
