//! Scalar bracketing shared by every module that solves a one-dimensional
//! equation.

/// Bisection on a bracket where `f(lo)` and `f(hi)` do not share a strict sign.
/// Returns the midpoint of the final bracket, of width at most `tol`, or an
/// exact zero of `f` if one is hit.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..400 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root of a strictly monotone function with a sign change somewhere on the
/// real line. The bracket starts at `[-64, 64]` and doubles until it holds a
/// sign change.
pub(crate) fn monotone_root<F: Fn(f64) -> f64>(f: F, tol: f64) -> f64 {
    let mut half = 64.0_f64;
    loop {
        let (a, b) = (f(-half), f(half));
        if a == 0.0 {
            return -half;
        }
        if b == 0.0 {
            return half;
        }
        if (a < 0.0) != (b < 0.0) || half > 1e12 {
            return bisect(&f, -half, half, tol);
        }
        half *= 2.0;
    }
}
