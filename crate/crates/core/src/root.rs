//! Derivative-free bracketed root finding: secant steps safeguarded by bisection.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct RootOptions<T> {
    /// Relative abscissa tolerance on the final bracket; the default runs
    /// down to adjacent floating point numbers.
    pub rel_tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for RootOptions<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::epsilon() * T::lit(2.0),
            max_iter: 200,
        }
    }
}

/// Finds a root of `f` in `[a, b]` given `f(a)` and `f(b)` of opposite sign.
///
/// Returns the bracket endpoint with the smaller residual once the bracket is
/// narrower than `rel_tol·max(|a|,|b|)` or an exact zero is hit.
pub fn bracketed_root<T, F>(mut f: F, a: T, b: T, fa: T, fb: T, opts: RootOptions<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NonBracketing {
            a: a.to_f64_lossy(),
            b: b.to_f64_lossy(),
        });
    }
    let (mut lo, mut hi, mut flo, mut fhi) = if fa < T::zero() { (a, b, fa, fb) } else { (b, a, fb, fa) };
    let half = T::lit(0.5);
    let mut last_width = (hi - lo).abs();
    let mut slow_steps = 0;
    for _ in 0..opts.max_iter {
        let width = (hi - lo).abs();
        let scale = lo.abs().max(hi.abs()).max(T::min_positive_value());
        if width <= opts.rel_tol * scale {
            break;
        }
        let mid = lo + (hi - lo) * half;
        let mut x = if slow_steps >= 2 || !flo.is_finite() || !fhi.is_finite() {
            slow_steps = 0;
            mid
        } else {
            lo - flo * (hi - lo) / (fhi - flo)
        };
        let (left, right) = if lo < hi { (lo, hi) } else { (hi, lo) };
        if !(x > left && x < right) || x.is_nan() {
            x = mid;
        }
        if x == lo || x == hi {
            break;
        }
        let fx = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if fx.is_nan() {
            return Err(Error::NonBracketing {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
            });
        }
        if fx < T::zero() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        let new_width = (hi - lo).abs();
        if new_width > half * last_width {
            slow_steps += 1;
        } else {
            slow_steps = 0;
        }
        last_width = new_width;
    }
    Ok(if flo.abs() <= fhi.abs() { lo } else { hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let f = |x: f64| x * x - 2.0;
        let r = bracketed_root(f, 0.0, 2.0, f(0.0), f(2.0), RootOptions::default()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn handles_steep_tangent_branch() {
        // tan x + tan 2x on (pi/4, pi/2) has its root at pi/3
        let f = |x: f64| x.tan() + (2.0 * x).tan();
        let pi = std::f64::consts::PI;
        let a = pi / 4.0 + 1e-9;
        let b = pi / 2.0 - 1e-9;
        let r = bracketed_root(f, a, b, f(a), f(b), RootOptions::default()).unwrap();
        assert!((r - pi / 3.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn reports_missing_sign_change() {
        let f = |x: f64| x * x + 1.0;
        assert!(matches!(
            bracketed_root(f, -1.0, 1.0, 2.0, 2.0, RootOptions::default()),
            Err(Error::NonBracketing { .. })
        ));
    }
}
