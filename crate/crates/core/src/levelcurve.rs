//! Level curves `|G*_n(z)| = k` and the sign of `A_n(x, y) = |G*_n(x+iy)| - p^x`.
//!
//! `sigma` belongs to `R_n` exactly when `A_n(sigma, .)` vanishes somewhere,
//! i.e. when the level curve of order `p^sigma` meets the line `Re z = sigma`.
//! Since `A_n(x, 0) >= 0` across the strip, a point with `A_n(x, y) < 0` forces
//! a zero of `A_n(x, .)` between `0` and `y`, which is how a zero of `G*_n`
//! yields a whole interval inside `R_n`.

use std::f64::consts::TAU;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expoly::{PartialSum, Target};
use crate::roots::bisect;
use crate::strip::x_bounds;

/// An entire function together with its derivative.
pub trait AnalyticFn {
    fn value(&self, z: Complex64) -> Complex64;
    fn derivative(&self, z: Complex64) -> Complex64;
}

/// One of the partial-sum functions of a fixed `n`.
#[derive(Debug, Clone, Copy)]
pub struct TargetFn<'a> {
    spec: &'a PartialSum,
    target: Target,
}

impl<'a> TargetFn<'a> {
    pub fn new(spec: &'a PartialSum, target: Target) -> Result<Self> {
        target.validate(spec)?;
        Ok(Self { spec, target })
    }
}

impl AnalyticFn for TargetFn<'_> {
    fn value(&self, z: Complex64) -> Complex64 {
        self.target.value(self.spec, z)
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        self.target.derivative(self.spec, z)
    }
}

fn require_star(spec: &PartialSum) -> Result<()> {
    Target::GStar.validate(spec)
}

/// Ordinates `y` in `[0, y_max]` with `A_n(sigma, y) = 0`.
///
/// Sign changes on the grid of spacing `step` are refined by bisection to
/// `1e-10`. Local minima of `|A_n|` on the grid are refined by golden-section
/// search and kept when the minimum is below `1e-6`, which catches tangential
/// contacts that do not change sign.
pub fn level_line_intersect(
    spec: &PartialSum,
    sigma: f64,
    y_max: f64,
    step: f64,
) -> Result<Vec<f64>> {
    require_star(spec)?;
    if !(y_max > 0.0) || !(step > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!(
            "need finite sigma, y_max > 0 and step > 0 (got {sigma}, {y_max}, {step})"
        )));
    }
    let a = |y: f64| spec.a_unchecked(sigma, y);
    let count = (y_max / step).ceil() as usize;
    let ys: Vec<f64> = (0..=count).map(|i| (i as f64 * step).min(y_max)).collect();
    let vals: Vec<f64> = ys.iter().map(|&y| a(y)).collect();

    let mut roots = Vec::new();
    for i in 0..ys.len() {
        if vals[i] == 0.0 {
            roots.push(ys[i]);
            continue;
        }
        if i + 1 < ys.len() && vals[i + 1] != 0.0 && (vals[i] < 0.0) != (vals[i + 1] < 0.0) {
            roots.push(bisect(a, ys[i], ys[i + 1], 1e-10));
            continue;
        }
        let left = if i == 0 {
            f64::INFINITY
        } else {
            vals[i - 1].abs()
        };
        let right = vals.get(i + 1).map_or(f64::INFINITY, |v| v.abs());
        let here = vals[i].abs();
        let same_sign = |j: usize| vals.get(j).is_none_or(|v| (*v < 0.0) == (vals[i] < 0.0));
        if here <= left && here <= right && same_sign(i + 1) && (i == 0 || same_sign(i - 1)) {
            let lo = if i == 0 { 0.0 } else { ys[i - 1] };
            let hi = ys.get(i + 1).copied().unwrap_or(y_max);
            let (y, m) = golden_min(|y| a(y).abs(), lo, hi, 1e-12);
            if m < 1e-6 {
                roots.push(y);
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|p, q| (*p - *q).abs() < 1e-8);
    Ok(roots)
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    [(lo, f(lo)), (c, fc), (d, fd), (hi, f(hi))]
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("non-empty")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub delta: f64,
    pub y: f64,
    /// `A_n(sigma + delta, y)`.
    pub a: f64,
}

/// A certified interval `[sigma, sigma + r]` inside `R_n`, with one zero of
/// `A_n(sigma + delta, .)` per grid point `delta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalCertificate {
    pub n: usize,
    pub sigma: f64,
    /// Ordinate of the zero of `G*_n` the interval grows from.
    pub t: f64,
    pub r: f64,
    pub witnesses: Vec<Witness>,
}

const WITNESS_WINDOW: f64 = 1.0;
const WITNESS_SCAN: f64 = 1e-3;
const INTERVAL_GRID: usize = 10;
const INTERVAL_ITERATIONS: usize = 20;

/// Zero of `A_n(x, .)` within `WITNESS_WINDOW` of `t`, provided
/// `A_n(x, t) < 0`; found by scanning outward from `t` for a non-negative
/// value and bisecting.
fn witness_near(spec: &PartialSum, x: f64, t: f64, tol: f64) -> Option<f64> {
    let a = |y: f64| spec.a_unchecked(x, y);
    if a(t) >= 0.0 {
        return None;
    }
    let steps = (WITNESS_WINDOW / WITNESS_SCAN).round() as usize;
    for j in 1..=steps {
        for dir in [1.0, -1.0] {
            let y = t + dir * j as f64 * WITNESS_SCAN;
            if a(y) >= 0.0 {
                let inner = y - dir * WITNESS_SCAN;
                let root = bisect(a, inner, y, 0.0);
                return (a(root).abs() <= tol).then_some(root);
            }
        }
    }
    None
}

fn witnesses_for(spec: &PartialSum, sigma: f64, t: f64, r: f64, tol: f64) -> Option<Vec<Witness>> {
    (0..=INTERVAL_GRID)
        .map(|j| {
            let delta = r * j as f64 / INTERVAL_GRID as f64;
            witness_near(spec, sigma + delta, t, tol).map(|y| Witness {
                delta,
                y,
                a: spec.a_unchecked(sigma + delta, y),
            })
        })
        .collect()
}

/// Grows an interval `[sigma, sigma + r]` inside `R_n` from a zero
/// `sigma + it` of `G*_n`.
///
/// `r` is the largest value found by bisection on `(0, r_max]` (20 steps) for
/// which every point of the 11-point grid on `[0, r]` has a witness `y` with
/// `|y - t| <= 1` and `|A_n(sigma + delta, y)| <= tol`.
pub fn interval_certificate(
    spec: &PartialSum,
    gstar_zero: Complex64,
    r_max: f64,
    tol: f64,
) -> Result<IntervalCertificate> {
    require_star(spec)?;
    if !(r_max > 0.0) || !(tol > 0.0) {
        return Err(Error::invalid("r_max and tol must be positive"));
    }
    let residual = Target::GStar.value(spec, gstar_zero).norm();
    if residual > 1e-6 {
        return Err(Error::invalid(format!(
            "{gstar_zero} is not a zero of G* (|G*| = {residual:e})"
        )));
    }
    let (sigma, t) = (gstar_zero.re, gstar_zero.im);
    let bounds = x_bounds(spec, 1e-13)?;
    if !(bounds.x0 <= sigma && sigma < bounds.x1) {
        return Err(Error::invalid(format!(
            "Re = {sigma} outside [{}, {})",
            bounds.x0, bounds.x1
        )));
    }

    let make = |r: f64, witnesses: Vec<Witness>| IntervalCertificate {
        n: spec.n(),
        sigma,
        t,
        r,
        witnesses,
    };
    if let Some(w) = witnesses_for(spec, sigma, t, r_max, tol) {
        return Ok(make(r_max, w));
    }
    let (mut lo, mut hi) = (0.0, r_max);
    let mut best = None;
    for _ in 0..INTERVAL_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        match witnesses_for(spec, sigma, t, mid, tol) {
            Some(w) => {
                lo = mid;
                best = Some(w);
            }
            None => hi = mid,
        }
    }
    match best {
        Some(w) => Ok(make(lo, w)),
        None => Err(Error::Construction(format!(
            "no certified interval of length >= {:e}",
            r_max / (1u64 << INTERVAL_ITERATIONS) as f64
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ClosedLoop,
    HitBoundary,
    CriticalPoint,
    StepLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Complex64>,
    pub level: f64,
    pub closed: bool,
    pub termination: Termination,
}

impl Polyline {
    /// Writes `x,y,level` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,level")?;
        for p in &self.points {
            writeln!(out, "{:.17e},{:.17e},{:.17e}", p.re, p.im, self.level)?;
        }
        Ok(())
    }
}

/// Region a traced curve may not leave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceBounds {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_cap: f64,
}

impl TraceBounds {
    fn contains(&self, z: Complex64) -> bool {
        self.x_lo <= z.re && z.re <= self.x_hi && z.im.abs() <= self.y_cap
    }
}

/// Default cap on `|Im z|` for [`trace`].
pub const DEFAULT_Y_CAP: f64 = 1e4;
const MIN_TRACE_STEP: f64 = 1e-8;
const GRADIENT_FLOOR: f64 = 1e-10;

/// Gradient of `|f|^2` as a complex number `(d/dx, d/dy)`.
fn level_gradient<F: AnalyticFn>(f: &F, z: Complex64) -> (Complex64, Complex64) {
    let v = f.value(z);
    (v, 2.0 * v * f.derivative(z).conj())
}

/// Newton projection of `z` back onto `|f|^2 = k^2` along the gradient.
fn correct<F: AnalyticFn>(f: &F, k: f64, mut z: Complex64) -> Option<Complex64> {
    let target = 1e-13 * (1.0 + k * k);
    for _ in 0..30 {
        let (v, g) = level_gradient(f, z);
        let phi = v.norm_sqr() - k * k;
        if phi.abs() <= target {
            return Some(z);
        }
        let gn = g.norm_sqr();
        if gn < GRADIENT_FLOOR * GRADIENT_FLOOR {
            return None;
        }
        z -= g * (phi / gn);
    }
    None
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * s)).norm()
}

/// Predictor-corrector continuation of `|f(z)| = k` from `start`, heading
/// initially towards increasing `Im z`.
pub fn trace_level_curve<F: AnalyticFn>(
    f: &F,
    k: f64,
    start: Complex64,
    step: f64,
    max_points: usize,
    bounds: TraceBounds,
) -> Result<Polyline> {
    if !(k > 0.0) || !(step > 0.0) || max_points < 2 {
        return Err(Error::invalid("need k > 0, step > 0 and max_points >= 2"));
    }
    let off = (f.value(start).norm() - k).abs();
    if off > 1e-8 {
        return Err(Error::invalid(format!(
            "start is off the level curve by {off:e}"
        )));
    }
    let (_, g0) = level_gradient(f, start);
    if g0.norm() <= GRADIENT_FLOOR {
        return Err(Error::invalid("start is a critical point of |f|^2"));
    }
    let unit_tangent = |g: Complex64| Complex64::i() * g / g.norm();
    let mut heading = unit_tangent(g0);
    if heading.im < 0.0 || (heading.im == 0.0 && heading.re < 0.0) {
        heading = -heading;
    }

    let mut points = vec![start];
    let mut h = step;
    let finish = |points: Vec<Complex64>, termination| Polyline {
        points,
        level: k,
        closed: termination == Termination::ClosedLoop,
        termination,
    };
    while points.len() < max_points {
        let z = *points.last().expect("non-empty");
        let (_, g) = level_gradient(f, z);
        if g.norm() <= GRADIENT_FLOOR {
            return Ok(finish(points, Termination::CriticalPoint));
        }
        let mut tangent = unit_tangent(g);
        if (tangent * heading.conj()).re < 0.0 {
            tangent = -tangent;
        }
        let next = correct(f, k, z + tangent * h).filter(|w| {
            let d = *w - z;
            d.norm() <= 2.0 * step && (d * tangent.conj()).re > 0.0
        });
        let Some(w) = next else {
            h *= 0.5;
            if h < MIN_TRACE_STEP {
                return Ok(finish(points, Termination::CriticalPoint));
            }
            continue;
        };
        if !bounds.contains(w) {
            return Ok(finish(points, Termination::HitBoundary));
        }
        points.push(w);
        heading = tangent;
        if points.len() > 10 && segment_distance(start, z, w) < 0.5 * step {
            return Ok(finish(points, Termination::ClosedLoop));
        }
        h = (2.0 * h).min(step);
    }
    Ok(finish(points, Termination::StepLimit))
}

/// Traces `|G*_n(z)| = k` inside `[x_{n,0} - 1, x_{n,1} + 1] x [-y_cap, y_cap]`.
pub fn trace(
    spec: &PartialSum,
    k: f64,
    start: Complex64,
    step: f64,
    max_points: usize,
    y_cap: f64,
) -> Result<Polyline> {
    let f = TargetFn::new(spec, Target::GStar)?;
    let b = x_bounds(spec, 1e-12)?;
    let bounds = TraceBounds {
        x_lo: b.x0 - 1.0,
        x_hi: b.x1 + 1.0,
        y_cap,
    };
    trace_level_curve(&f, k, start, step, max_points, bounds)
}

/// Number of sign alternations of `|G*_n| - level` around the circle of the
/// given radius about `z0`. For a small radius this counts the branches of
/// the level curve through `z0`.
pub fn branch_count(
    spec: &PartialSum,
    z0: Complex64,
    level: f64,
    radius: f64,
    samples: usize,
) -> Result<usize> {
    require_star(spec)?;
    if !(radius > 0.0) || samples < 3 || !(level > 0.0) {
        return Err(Error::invalid(
            "need level > 0, radius > 0 and samples >= 3",
        ));
    }
    let mut offset = 0.0;
    for _ in 0..16 {
        let diffs: Vec<f64> = (0..samples)
            .map(|j| {
                let theta = offset + TAU * j as f64 / samples as f64;
                let z = z0 + Complex64::from_polar(radius, theta);
                Target::GStar.value(spec, z).norm() - level
            })
            .collect();
        if diffs.iter().any(|d| d.abs() < 1e-12) {
            offset += 0.371 * TAU / samples as f64;
            continue;
        }
        let changes = (0..samples)
            .filter(|&j| (diffs[j] < 0.0) != (diffs[(j + 1) % samples] < 0.0))
            .count();
        return Ok(changes);
    }
    Err(Error::Construction(
        "every rotation of the sample circle touches the level set".into(),
    ))
}

/// `|d arg G*/dx + (1/|G*|) d|G*|/dy|` by central differences with step `h`.
/// The exact value is zero wherever `G*_n` does not vanish.
pub fn cauchy_riemann_residual(spec: &PartialSum, z: Complex64, h: f64) -> Result<f64> {
    require_star(spec)?;
    if !(h > 0.0) {
        return Err(Error::invalid("h must be positive"));
    }
    let f = |w: Complex64| Target::GStar.value(spec, w);
    let center = f(z).norm();
    if center <= 1e-6 {
        return Err(Error::invalid(format!(
            "|G*| = {center:e} at {z} is too close to a zero"
        )));
    }
    let dh = Complex64::new(h, 0.0);
    let dv = Complex64::new(0.0, h);
    let d_arg_dx = (f(z + dh) / f(z - dh)).arg() / (2.0 * h);
    let d_mod_dy = (f(z + dv).norm() - f(z - dv).norm()) / (2.0 * h);
    Ok((d_arg_dx + d_mod_dy / center).abs())
}
