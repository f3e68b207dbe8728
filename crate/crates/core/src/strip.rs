//! Computable bounds on the real parts of zeros.
//!
//! `x_{n,0}` and `x_{n,1}` are where the smallest term (`1`) and the largest
//! term (`n^sigma`) balance the sum of the others. No zero of `G_n` can lie
//! outside `[x_{n,0}, x_{n,1}]`, and inside it the term moduli satisfy every
//! polygon inequality. For prime `n` the right bound coincides with the
//! supremum of real parts of zeros, and the analogous bound for `G_n'` lies
//! strictly to its left, which gives a strip of simple zeros.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expoly::{is_prime, PartialSum};
use crate::roots::monotone_root;

/// Relative slack allowed in the polygon inequalities, so that abscissas
/// returned by bisection at the ends of `[x0, x1]` are accepted.
pub const POLYGON_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalBounds {
    pub n: usize,
    pub x0: f64,
    pub x1: f64,
    pub tol: f64,
    /// Asymptotic estimate of the infimum of real parts, with the `o(1)` term
    /// dropped. `None` for `n = 2`.
    pub a_est: Option<f64>,
    /// Asymptotic estimate of the supremum of real parts, with the `o(1)` term
    /// dropped. `None` for `n = 2`.
    pub b_est: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeStripReport {
    pub n: usize,
    /// Rightmost root of `1 + 2^x + ... + (n-1)^x = n^x`.
    pub b_n1: f64,
    /// Rightmost root of `sum_{m=2}^{n-1} (ln m / ln n) m^x = n^x`.
    pub b_n1_prime: f64,
    pub gap: f64,
}

/// `sum_{m=2}^n m^sigma - 1`, strictly increasing.
pub(crate) fn left_balance(spec: &PartialSum, sigma: f64) -> f64 {
    spec.logs()[1..]
        .iter()
        .map(|&l| (sigma * l).exp())
        .sum::<f64>()
        - 1.0
}

/// `sum_{m=1}^{n-1} (m/n)^sigma - 1`, strictly decreasing.
pub(crate) fn right_balance(spec: &PartialSum, sigma: f64) -> f64 {
    let ln_n = spec.logs()[spec.n() - 1];
    spec.logs()[..spec.n() - 1]
        .iter()
        .map(|&l| (sigma * (l - ln_n)).exp())
        .sum::<f64>()
        - 1.0
}

/// `sum_{m=2}^{n-1} (ln m / ln n) (m/n)^x - 1`, strictly decreasing.
fn derivative_right_balance(spec: &PartialSum, x: f64) -> f64 {
    let ln_n = spec.logs()[spec.n() - 1];
    spec.logs()[1..spec.n() - 1]
        .iter()
        .map(|&l| l / ln_n * (x * (l - ln_n)).exp())
        .sum::<f64>()
        - 1.0
}

pub fn x_bounds(spec: &PartialSum, tol: f64) -> Result<CriticalBounds> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tol must be positive, got {tol}")));
    }
    let x0 = monotone_root(|s| left_balance(spec, s), tol);
    let x1 = monotone_root(|s| right_balance(spec, s), tol);
    let (a_est, b_est) = match asymptotic_bounds(spec.n()) {
        Ok((a, b)) => (Some(a), Some(b)),
        Err(_) => (None, None),
    };
    Ok(CriticalBounds {
        n: spec.n(),
        x0,
        x1,
        tol,
        a_est,
        b_est,
    })
}

/// True iff every term modulus `j^sigma` is at most the sum of the others,
/// i.e. the moduli can close up into an `n`-sided polygon. A relative slack of
/// [`POLYGON_SLACK`] is applied.
pub fn polygon_check(spec: &PartialSum, sigma: f64) -> bool {
    let sides: Vec<f64> = spec.logs().iter().map(|&l| (sigma * l).exp()).collect();
    let total: f64 = sides.iter().sum();
    sides
        .iter()
        .all(|&side| side <= (total - side) * (1.0 + POLYGON_SLACK))
}

pub fn prime_strip(spec: &PartialSum, tol: f64) -> Result<PrimeStripReport> {
    let n = spec.n();
    if n <= 2 || !is_prime(n as u64) {
        return Err(Error::invalid(format!(
            "prime strip needs an odd prime n, got {n}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tol must be positive, got {tol}")));
    }
    let b_n1 = monotone_root(|x| right_balance(spec, x), tol);
    let b_n1_prime = monotone_root(|x| derivative_right_balance(spec, x), tol);
    let gap = b_n1 - b_n1_prime;
    if !(gap > 0.0) {
        return Err(Error::Construction(format!(
            "derivative bound {b_n1_prime} is not left of {b_n1}"
        )));
    }
    Ok(PrimeStripReport {
        n,
        b_n1,
        b_n1_prime,
        gap,
    })
}

/// Leading-order asymptotics of the infimum and supremum of real parts of
/// zeros, `-1 - (4/pi - 1) ln ln n / ln n` and `n ln 2`. The `o(1)` corrections
/// are unknown, so these are estimates only.
pub fn asymptotic_bounds(n: usize) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::invalid(format!(
            "asymptotic bounds need n >= 3, got {n}"
        )));
    }
    let ln_n = (n as f64).ln();
    let a = -1.0 - (4.0 / std::f64::consts::PI - 1.0) * ln_n.ln() / ln_n;
    let b = n as f64 * std::f64::consts::LN_2;
    Ok((a, b))
}
