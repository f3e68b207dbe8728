//! Membership certificates on the torus.
//!
//! `sigma` lies in `R_n` exactly when `F_n(sigma, x) = 0` for some phase
//! vector `x`. A [`TorusCertificate`] records such an `x` up to a residual.
//! Certificates come from four sources:
//!
//! * a multi-start local search on `|F_n(sigma, .)|^2` ([`certify`]),
//! * an explicit construction for `n = 4` on `[-0.55, 1]` ([`g4_certificate`]),
//! * lifting a certificate for `G_n` to `G_{n+1}` when `n + 1` is prime
//!   ([`lift_certificate`]),
//! * reading off `x = t * p` from a zero `sigma + it` ([`pullback_from_zero`]).
//!
//! Failing to find a certificate proves nothing about `sigma`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expoly::{is_prime, PartialSum, Target, TorusPoint};
use crate::roots::bisect;
use crate::zerofinder::ZeroRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertMethod {
    Optimizer,
    G4Construction,
    Lift,
    LinePullback,
}

impl CertMethod {
    pub fn name(self) -> &'static str {
        match self {
            CertMethod::Optimizer => "optimizer",
            CertMethod::G4Construction => "g4_construction",
            CertMethod::Lift => "lift",
            CertMethod::LinePullback => "line_pullback",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            CertMethod::Optimizer,
            CertMethod::G4Construction,
            CertMethod::Lift,
            CertMethod::LinePullback,
        ]
        .into_iter()
        .find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusCertificate {
    pub n: usize,
    pub sigma: f64,
    pub x: TorusPoint,
    /// `|F_n(sigma, x)|` evaluated at the stored `x`.
    pub residual: f64,
    pub method: CertMethod,
    pub seed: Option<u64>,
}

impl TorusCertificate {
    /// Re-evaluates `|F_n(sigma, x)|` without any search.
    pub fn recompute_residual(&self, spec: &PartialSum) -> Result<f64> {
        if spec.n() != self.n {
            return Err(Error::invalid(format!(
                "certificate is for n = {}, spec has n = {}",
                self.n,
                spec.n()
            )));
        }
        Ok(spec.f(self.sigma, &self.x)?.norm())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certification {
    Found(TorusCertificate),
    /// Inconclusive: the search did not reach the tolerance.
    NotFound {
        best_residual: f64,
    },
}

impl Certification {
    pub fn certificate(&self) -> Option<&TorusCertificate> {
        match self {
            Certification::Found(c) => Some(c),
            Certification::NotFound { .. } => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Certification::Found(_))
    }

    pub fn residual(&self) -> f64 {
        match self {
            Certification::Found(c) => c.residual,
            Certification::NotFound { best_residual } => *best_residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityScan {
    pub n: usize,
    pub grid: Vec<f64>,
    pub results: Vec<Certification>,
}

const MAX_DESCENT_STEPS: usize = 500;
const MIN_STEP: f64 = 1e-14;

/// SplitMix64 finaliser, used to derive independent seeds from a base seed.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        ^ stream
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Starting points from the additive recurrence `u + i * alpha (mod 1)` with
/// `alpha_j = phi^-j`, `phi` the positive root of `x^(k+1) = x + 1`, and a
/// random shift `u` drawn from `seed`.
fn starting_points(k: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut phi = 2.0_f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (k as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=k).map(|j| phi.powi(-(j as i32))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
    (0..count)
        .map(|i| {
            shift
                .iter()
                .zip(&alpha)
                .map(|(&u, &a)| (u + (i as f64 + 1.0) * a).fract() * 2.0 * PI)
                .collect()
        })
        .collect()
}

/// Local descent on `|F_n(sigma, x)|^2` from `start`.
///
/// The search direction is the damped Gauss-Newton step for the two real
/// equations `Re F = Im F = 0`, which is a descent direction for `|F|^2`;
/// steepest descent is used whenever that step fails to decrease the
/// objective. Each step is chosen by Armijo backtracking. Stops when the step
/// falls below `1e-14` or the residual is `100` times below `tol`.
fn local_descent(spec: &PartialSum, sigma: f64, start: &[f64], tol: f64) -> (Vec<f64>, f64) {
    let k = spec.k();
    let mut x = start.to_vec();
    let (mut value, mut jac) = spec.f_with_jacobian(sigma, &x);
    let mut obj = value.norm_sqr();
    for _ in 0..MAX_DESCENT_STEPS {
        if obj.sqrt() <= 0.01 * tol {
            break;
        }
        // rows of the 2 x k real Jacobian
        let re_row: Vec<f64> = jac.iter().map(|d| d.re).collect();
        let im_row: Vec<f64> = jac.iter().map(|d| d.im).collect();
        let grad: Vec<f64> = jac.iter().map(|d| 2.0 * (value.conj() * d).re).collect();

        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        let (a11, a12, a22) = (
            dot(&re_row, &re_row),
            dot(&re_row, &im_row),
            dot(&im_row, &im_row),
        );
        let damping = 1e-12 * (a11 + a22) + 1e-300;
        let (m11, m22) = (a11 + damping, a22 + damping);
        let det = m11 * m22 - a12 * a12;

        let mut directions = Vec::with_capacity(2);
        if det > 0.0 && det.is_finite() {
            // w = (J J^T + lambda)^-1 (-F), direction = J^T w
            let (b1, b2) = (-value.re, -value.im);
            let w1 = (m22 * b1 - a12 * b2) / det;
            let w2 = (m11 * b2 - a12 * b1) / det;
            directions.push(
                (0..k)
                    .map(|l| re_row[l] * w1 + im_row[l] * w2)
                    .collect::<Vec<f64>>(),
            );
        }
        directions.push(grad.iter().map(|g| -g).collect());

        let mut moved = false;
        for dir in directions {
            let slope = dot(&grad, &dir);
            let norm = dot(&dir, &dir).sqrt();
            if !(slope < 0.0) || norm == 0.0 {
                continue;
            }
            // cap steps at half a turn
            let mut t = (PI / norm).min(1.0);
            while t * norm >= MIN_STEP {
                let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, d)| xi + t * d).collect();
                let (v, j) = spec.f_with_jacobian(sigma, &trial);
                if v.norm_sqr() <= obj + 1e-4 * t * slope {
                    x = trial;
                    value = v;
                    jac = j;
                    obj = v.norm_sqr();
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if moved {
                break;
            }
        }
        if !moved {
            break;
        }
    }
    (x, obj.sqrt())
}

fn check_args(sigma: f64, tol: f64) -> Result<()> {
    if !sigma.is_finite() {
        return Err(Error::invalid(format!("sigma must be finite, got {sigma}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tol must be positive, got {tol}")));
    }
    Ok(())
}

fn finish(
    spec: &PartialSum,
    sigma: f64,
    x: Vec<f64>,
    tol: f64,
    method: CertMethod,
    seed: Option<u64>,
) -> Certification {
    let x = TorusPoint::new(x);
    let residual = spec.f_raw(sigma, x.phases()).norm();
    if residual <= tol {
        Certification::Found(TorusCertificate {
            n: spec.n(),
            sigma,
            x,
            residual,
            method,
            seed,
        })
    } else {
        Certification::NotFound {
            best_residual: residual,
        }
    }
}

/// Multi-start search for a zero of `F_n(sigma, .)` with `budget` starts.
///
/// The result depends only on the arguments: starts run in parallel, but the
/// certificate reported is the one from the lowest-indexed successful start.
pub fn certify(
    spec: &PartialSum,
    sigma: f64,
    tol: f64,
    budget: usize,
    seed: u64,
) -> Result<Certification> {
    check_args(sigma, tol)?;
    if budget == 0 {
        return Err(Error::invalid("budget must be at least 1"));
    }
    let starts = starting_points(spec.k(), budget, seed);
    let runs: Vec<(Vec<f64>, f64)> = starts
        .par_iter()
        .map(|x0| local_descent(spec, sigma, x0, tol))
        .collect();
    let pick = runs.iter().position(|(_, r)| *r <= tol).unwrap_or_else(|| {
        runs.iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .map(|(i, _)| i)
            .expect("budget >= 1")
    });
    let (x, _) = runs[pick].clone();
    Ok(finish(
        spec,
        sigma,
        x,
        tol,
        CertMethod::Optimizer,
        Some(seed),
    ))
}

/// A single local descent from a given phase vector.
pub fn certify_from(
    spec: &PartialSum,
    sigma: f64,
    start: &TorusPoint,
    tol: f64,
) -> Result<Certification> {
    check_args(sigma, tol)?;
    if start.len() != spec.k() {
        return Err(Error::invalid(format!(
            "start has {} components, expected {}",
            start.len(),
            spec.k()
        )));
    }
    let (x, _) = local_descent(spec, sigma, start.phases(), tol);
    Ok(finish(spec, sigma, x, tol, CertMethod::Optimizer, None))
}

/// Range of abscissas covered by [`g4_certificate`].
pub const G4_RANGE: (f64, f64) = (-0.55, 1.0);

/// Explicit certificate for `n = 4`.
///
/// With `f_4(x_1) = 1 + 2^sigma e^{i x_1} + 4^sigma e^{2 i x_1}`, the equation
/// `|f_4(x_1)| = 3^sigma` is solved by bisection between the point where the
/// circle `|w| = 2^sigma` meets the line `Re w = -1/2` (there
/// `|f_4| = |1 - 4^sigma| <= 3^sigma`) and `x_1 = 0` (there
/// `|f_4| = 1 + 2^sigma + 4^sigma >= 3^sigma`). Then `x_2 = arg f_4 + pi`
/// makes `3^sigma e^{i x_2}` cancel `f_4`.
pub fn g4_certificate(sigma: f64, tol: f64) -> Result<TorusCertificate> {
    check_args(sigma, tol)?;
    if !(G4_RANGE.0..=G4_RANGE.1).contains(&sigma) {
        return Err(Error::invalid(format!(
            "g4 construction needs sigma in [-0.55, 1], got {sigma}"
        )));
    }
    let spec = PartialSum::new(4)?;
    let (r2, r3, r4) = (2f64.powf(sigma), 3f64.powf(sigma), 4f64.powf(sigma));
    let f4 = |x1: f64| {
        Complex64::new(1.0, 0.0)
            + Complex64::from_polar(r2, x1)
            + Complex64::from_polar(r4, 2.0 * x1)
    };
    let gap = |x1: f64| f4(x1).norm() - r3;
    let x_p = (-0.5 / r2).acos();
    let x1 = if gap(x_p) >= 0.0 {
        x_p
    } else {
        bisect(gap, x_p, 0.0, 0.0)
    };
    let x2 = f4(x1).arg() + PI;
    match finish(
        &spec,
        sigma,
        vec![x1, x2],
        tol,
        CertMethod::G4Construction,
        None,
    ) {
        Certification::Found(c) => Ok(c),
        Certification::NotFound { best_residual } => Err(Error::Construction(format!(
            "g4 construction reached residual {best_residual:e} > {tol:e}"
        ))),
    }
}

/// Largest abscissa accepted by [`lift_certificate`] for base `n`:
/// `ln 2 / ln(1 + 1/n)`, where `(n+1)^sigma <= 2 n^sigma`.
pub fn lift_threshold(n: usize) -> f64 {
    LN_2 / (1.0 + 1.0 / n as f64).ln()
}

/// Lifts a certificate for `G_n` to one for `G_{n+1}`, `n + 1` prime.
///
/// Along the segment from `cert.x` to the origin, `|F_n(sigma, .)|` rises from
/// about zero to `G_n(sigma) >= (n+1)^sigma`, so bisection finds `a` with
/// `|F_n(sigma, a)| = (n+1)^sigma`. The new prime's phase is then chosen
/// opposite to `F_n(sigma, a)`.
pub fn lift_certificate(
    spec_n: &PartialSum,
    cert: &TorusCertificate,
    tol: f64,
) -> Result<TorusCertificate> {
    check_args(cert.sigma, tol)?;
    let n = spec_n.n();
    if !is_prime(n as u64 + 1) {
        return Err(Error::invalid(format!("n + 1 = {} is not prime", n + 1)));
    }
    let residual = cert.recompute_residual(spec_n)?;
    if residual > tol {
        return Err(Error::invalid(format!(
            "base certificate residual {residual:e} exceeds tol {tol:e}"
        )));
    }
    let sigma = cert.sigma;
    if sigma > lift_threshold(n) {
        return Err(Error::invalid(format!(
            "sigma = {sigma} exceeds ln 2 / ln(1 + 1/{n}) = {}",
            lift_threshold(n)
        )));
    }
    let level = ((n + 1) as f64).powf(sigma);
    let along = |lambda: f64| -> Vec<f64> {
        cert.x
            .phases()
            .iter()
            .map(|&v| (1.0 - lambda) * v)
            .collect()
    };
    let gap = |lambda: f64| spec_n.f_raw(sigma, &along(lambda)).norm() - level;
    if gap(0.0) > 0.0 || gap(1.0) < 0.0 {
        return Err(Error::Construction(format!(
            "no level crossing on the segment at sigma = {sigma}"
        )));
    }
    let lambda = bisect(gap, 0.0, 1.0, 0.0);
    let mut y = along(lambda);
    y.push(spec_n.f_raw(sigma, &y).arg() + PI);
    let spec_next = PartialSum::new(n + 1)?;
    match finish(&spec_next, sigma, y, tol, CertMethod::Lift, cert.seed) {
        Certification::Found(c) => Ok(c),
        Certification::NotFound { best_residual } => Err(Error::Construction(format!(
            "lifted residual {best_residual:e} > {tol:e}"
        ))),
    }
}

/// The phase vector `t * p` of a zero `sigma + it` of `G_n`.
pub fn pullback_from_zero(spec: &PartialSum, zero: &ZeroRecord) -> Result<TorusCertificate> {
    if zero.function != Target::G {
        return Err(Error::invalid(format!(
            "pullback needs a zero of G, got {}",
            zero.function
        )));
    }
    let s = zero.location;
    let g = spec.g(s).norm();
    if g > 1e-6 {
        return Err(Error::invalid(format!(
            "|G_{}({s})| = {g:e} is not a zero",
            spec.n()
        )));
    }
    let x = TorusPoint::from_height(spec, s.im);
    let residual = spec.f(s.re, &x)?.norm();
    Ok(TorusCertificate {
        n: spec.n(),
        sigma: s.re,
        x,
        residual,
        method: CertMethod::LinePullback,
        seed: None,
    })
}

/// Grid of abscissas `lo + i * step <= hi`.
pub fn sigma_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| lo + i as f64 * step).collect()
}

/// Runs [`certify`] at every grid point, with the seed for point `i` derived
/// from `(seed, i)`.
pub fn scan(
    spec: &PartialSum,
    lo: f64,
    hi: f64,
    step: f64,
    tol: f64,
    budget: usize,
    seed: u64,
) -> Result<DensityScan> {
    if !(lo <= hi) || !(step > 0.0) {
        return Err(Error::invalid(format!(
            "bad scan range [{lo}, {hi}] with step {step}"
        )));
    }
    let grid = sigma_grid(lo, hi, step);
    let results = grid
        .par_iter()
        .enumerate()
        .map(|(i, &sigma)| certify(spec, sigma, tol, budget, mix_seed(seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityScan {
        n: spec.n(),
        grid,
        results,
    })
}
