//! Bracketed scalar root finding and maximization used by the measurement
//! and optimizer layers.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]`, requiring a sign change of `f` across the
/// bracket. Iterates until the bracket width falls below `xtol`.
pub(crate) fn bisect<F>(mut lo: f64, mut hi: f64, f: F, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 || hi - lo < xtol {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on `[lo, hi]`, to bracket width `xtol`.
pub(crate) fn golden_max<F>(mut lo: f64, mut hi: f64, f: F, xtol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if hi - lo <= xtol {
        return 0.5 * (lo + hi);
    }
    let mut b = hi - INV_GOLDEN * (hi - lo);
    let mut c = lo + INV_GOLDEN * (hi - lo);
    let mut fb = f(b);
    let mut fc = f(c);
    while hi - lo > xtol {
        if fb > fc {
            hi = c;
            c = b;
            fc = fb;
            b = hi - INV_GOLDEN * (hi - lo);
            fb = f(b);
        } else {
            lo = b;
            b = c;
            fb = fc;
            c = lo + INV_GOLDEN * (hi - lo);
            fc = f(c);
        }
    }
    0.5 * (lo + hi)
}
