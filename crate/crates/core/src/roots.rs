//! Bracketing root finder shared by the fixed-point and threshold solvers.

use crate::error::{Error, Result};

/// Stopping rule for [`bisect`]: the bracket is accepted once its width is at
/// most `abs + rel * |x|`, or once it cannot be split any further in `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_iterations: usize,
}

impl Tolerance {
    pub fn absolute(abs: f64, max_iterations: usize) -> Self {
        Self {
            abs,
            rel: 0.0,
            max_iterations,
        }
    }

    /// Run until the bracket collapses to neighbouring floats.
    pub fn full_precision(max_iterations: usize) -> Self {
        Self {
            abs: 0.0,
            rel: 4.0 * f64::EPSILON,
            max_iterations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// Final bracket.
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

/// Bisection on `[lo, hi]`. `f(lo)` and `f(hi)` must differ in sign (a zero
/// at either end is returned immediately). Works for increasing and
/// decreasing functions alike.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: Tolerance) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(Root {
            x: lo,
            lo,
            hi: lo,
            iterations: 0,
        });
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return Ok(Root {
            x: hi,
            lo: hi,
            hi,
            iterations: 0,
        });
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let lo_negative = f_lo < 0.0;
    for it in 1..=tol.max_iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(Root {
                x: mid,
                lo,
                hi,
                iterations: it,
            });
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(Root {
                x: mid,
                lo: mid,
                hi: mid,
                iterations: it,
            });
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
        let x = 0.5 * (lo + hi);
        if hi - lo <= tol.abs + tol.rel * x.abs() {
            return Ok(Root {
                x,
                lo,
                hi,
                iterations: it,
            });
        }
    }
    Err(Error::Convergence {
        iterations: tol.max_iterations,
        residual: hi - lo,
    })
}
