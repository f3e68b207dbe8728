//! Zero counting and isolation on rectangles by the argument principle.
//!
//! The continuous argument of `f` is tracked along the boundary with adaptive
//! subdivision: a boundary segment is split until the phase of `f` changes by
//! less than `pi/2` between its endpoints. Rectangles are quadrisected until
//! every cell holds at most one zero (or a cluster that no longer separates)
//! and is small enough for Newton's method to start from its center.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expoly::{PartialSum, Target};

/// Half-width of the square used to read off the multiplicity of a refined
/// zero.
pub const MULTIPLICITY_RADIUS: f64 = 1e-4;
/// Cells are subdivided at least until their diameter is below this.
pub const LEAF_DIAMETER: f64 = 1e-3;
/// A cell whose count stays above one at this diameter is treated as a
/// single multiple zero.
pub const CLUSTER_DIAMETER: f64 = 1e-7;
/// Refined zeros closer than this are the same zero.
pub const DEDUP_DISTANCE: f64 = 1e-7;
/// Relative size of `|f|` below which a boundary sample counts as a zero.
pub const BOUNDARY_FLOOR: f64 = 1e-12;

const MAX_PERTURBATIONS: usize = 3;
const PERTURBATION: f64 = 1e-6;
const NEWTON_STEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Rectangle {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        let finite = [x_lo, x_hi, y_lo, y_hi].iter().all(|v| v.is_finite());
        if !finite || !(x_lo < x_hi) || !(y_lo < y_hi) {
            return Err(Error::invalid(format!(
                "degenerate rectangle [{x_lo}, {x_hi}] x [{y_lo}, {y_hi}]"
            )));
        }
        Ok(Self {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        })
    }

    /// Axis-aligned square of half-width `half` centred at `c`.
    pub fn square(c: Complex64, half: f64) -> Self {
        Self {
            x_lo: c.re - half,
            x_hi: c.re + half,
            y_lo: c.im - half,
            y_hi: c.im + half,
        }
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x_lo + self.x_hi), 0.5 * (self.y_lo + self.y_hi))
    }

    pub fn diameter(&self) -> f64 {
        (self.x_hi - self.x_lo).hypot(self.y_hi - self.y_lo)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.x_lo <= z.re && z.re <= self.x_hi && self.y_lo <= z.im && z.im <= self.y_hi
    }

    pub fn expanded(&self, d: f64) -> Self {
        Self {
            x_lo: self.x_lo - d,
            x_hi: self.x_hi + d,
            y_lo: self.y_lo - d,
            y_hi: self.y_hi + d,
        }
    }

    /// Splits at the given fractions of the width and height, returning the
    /// children in row-major order (bottom row first, left to right).
    fn quadrisect(&self, fx: f64, fy: f64) -> [Rectangle; 4] {
        let xm = self.x_lo + fx * (self.x_hi - self.x_lo);
        let ym = self.y_lo + fy * (self.y_hi - self.y_lo);
        [
            Rectangle {
                x_hi: xm,
                y_hi: ym,
                ..*self
            },
            Rectangle {
                x_lo: xm,
                y_hi: ym,
                ..*self
            },
            Rectangle {
                x_hi: xm,
                y_lo: ym,
                ..*self
            },
            Rectangle {
                x_lo: xm,
                y_lo: ym,
                ..*self
            },
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroRecord {
    pub location: Complex64,
    pub multiplicity: u32,
    /// `|f|` at `location`.
    pub residual: f64,
    pub simple: bool,
    pub function: Target,
}

/// Floor below which `|f|` on a contour is treated as a zero of `f`.
fn boundary_floor(spec: &PartialSum, target: Target, rect: &Rectangle) -> f64 {
    BOUNDARY_FLOOR * target.scale(spec, rect.x_hi).max(1.0)
}

/// Winding number of `f` around the boundary of `rect`, with no perturbation.
fn contour_winding(spec: &PartialSum, target: Target, rect: &Rectangle) -> Result<i64> {
    let floor = boundary_floor(spec, target, rect);
    let f = |z: Complex64| target.value(spec, z);
    // base spacing below the period of the fastest term
    let h0 = 0.25 / (spec.n() as f64).ln().max(0.25);
    let corners = [
        Complex64::new(rect.x_lo, rect.y_lo),
        Complex64::new(rect.x_hi, rect.y_lo),
        Complex64::new(rect.x_hi, rect.y_hi),
        Complex64::new(rect.x_lo, rect.y_hi),
    ];
    let mut total = 0.0;
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        let pieces = ((b - a).norm() / h0).ceil().max(1.0) as usize;
        let mut prev = a;
        let mut f_prev = f(a);
        check_floor(prev, f_prev, floor)?;
        for j in 1..=pieces {
            let next = if j == pieces {
                b
            } else {
                a + (b - a) * (j as f64 / pieces as f64)
            };
            let f_next = f(next);
            check_floor(next, f_next, floor)?;
            total += segment_phase(&f, prev, f_prev, next, f_next, floor)?;
            prev = next;
            f_prev = f_next;
        }
    }
    Ok((total / TAU).round() as i64)
}

fn check_floor(z: Complex64, fz: Complex64, floor: f64) -> Result<()> {
    let modulus = fz.norm();
    if modulus <= floor || !modulus.is_finite() {
        return Err(Error::BoundaryFailure {
            re: z.re,
            im: z.im,
            modulus,
        });
    }
    Ok(())
}

/// Continuous change of `arg f` from `a` to `b`, splitting the segment until
/// each piece turns by less than `pi/2`.
fn segment_phase<F: Fn(Complex64) -> Complex64>(
    f: &F,
    a: Complex64,
    fa: Complex64,
    b: Complex64,
    fb: Complex64,
    floor: f64,
) -> Result<f64> {
    let mut total = 0.0;
    let mut stack = vec![(a, fa, b, fb)];
    while let Some((p, fp, q, fq)) = stack.pop() {
        let step = (fq / fp).arg();
        if step.abs() < FRAC_PI_2 {
            total += step;
            continue;
        }
        let mid = 0.5 * (p + q);
        if (q - p).norm() <= 1e-13 * (1.0 + mid.norm()) {
            return Err(Error::BoundaryFailure {
                re: mid.re,
                im: mid.im,
                modulus: f(mid).norm(),
            });
        }
        let fm = f(mid);
        check_floor(mid, fm, floor)?;
        // second half pushed first so the first half is summed first
        stack.push((mid, fm, q, fq));
        stack.push((p, fp, mid, fm));
    }
    Ok(total)
}

/// Counts zeros of `target` inside `rect` with multiplicity, perturbing the
/// contour outward when it runs through a zero.
pub fn winding_count(spec: &PartialSum, target: Target, rect: &Rectangle) -> Result<i64> {
    winding_with_rect(spec, target, rect).map(|(count, _)| count)
}

/// Winding number together with the (possibly perturbed) rectangle it was
/// taken on.
fn winding_with_rect(
    spec: &PartialSum,
    target: Target,
    rect: &Rectangle,
) -> Result<(i64, Rectangle)> {
    target.validate(spec)?;
    let mut last = None;
    for attempt in 0..=MAX_PERTURBATIONS {
        let r = rect.expanded(PERTURBATION * attempt as f64 / MAX_PERTURBATIONS as f64);
        match contour_winding(spec, target, &r) {
            Ok(count) => return Ok((count, r)),
            Err(e @ Error::BoundaryFailure { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Split fractions tried in turn when a split line runs through a zero.
const SPLIT_FRACTIONS: [f64; 7] = [0.5, 0.5137, 0.4871, 0.5411, 0.4629, 0.5873, 0.4197];

fn isolate(
    spec: &PartialSum,
    target: Target,
    rect: Rectangle,
    count: i64,
) -> Result<Vec<(Rectangle, i64)>> {
    if count <= 0 {
        return Ok(Vec::new());
    }
    let d = rect.diameter();
    if d <= LEAF_DIAMETER && (count == 1 || d <= CLUSTER_DIAMETER) {
        return Ok(vec![(rect, count)]);
    }
    let mut last = None;
    for (i, &fx) in SPLIT_FRACTIONS.iter().enumerate() {
        let fy = SPLIT_FRACTIONS[(i * 3) % SPLIT_FRACTIONS.len()];
        let children = rect.quadrisect(fx, fy);
        let counts: Result<Vec<i64>> = children
            .iter()
            .map(|c| contour_winding(spec, target, c))
            .collect();
        match counts {
            Ok(counts) if counts.iter().sum::<i64>() == count => {
                let parts: Result<Vec<Vec<(Rectangle, i64)>>> = children
                    .par_iter()
                    .zip(counts.par_iter())
                    .map(|(c, &k)| isolate(spec, target, *c, k))
                    .collect();
                return Ok(parts?.into_iter().flatten().collect());
            }
            Ok(counts) => {
                last = Some(Error::CountMismatch {
                    expected: count,
                    found: counts.iter().sum(),
                })
            }
            Err(e @ Error::BoundaryFailure { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("split attempted"))
}

/// Newton's method `z <- z - m f(z) / f'(z)` for a zero of multiplicity `m`.
/// Stops once `|f| <= tol * (1 + scale)` and a few polishing steps no longer
/// reduce the residual. Returns `None` if it does not converge within
/// `max_steps`.
pub fn newton(
    spec: &PartialSum,
    target: Target,
    start: Complex64,
    multiplicity: u32,
    tol: f64,
    max_steps: usize,
) -> Option<Complex64> {
    let mut z = start;
    let mut fz = target.value(spec, z);
    let mut converged_at = None;
    for step in 0..max_steps {
        let scale = 1.0 + target.scale(spec, z.re);
        if fz.norm() <= tol * scale && converged_at.is_none() {
            converged_at = Some(step);
        }
        if let Some(at) = converged_at {
            if step >= at + 3 {
                break;
            }
        }
        let d = target.derivative(spec, z);
        if d.norm() == 0.0 || !d.norm().is_finite() {
            break;
        }
        let next = z - fz / d * multiplicity as f64;
        if !next.re.is_finite() || !next.im.is_finite() {
            return None;
        }
        let f_next = target.value(spec, next);
        if converged_at.is_some() && f_next.norm() >= fz.norm() {
            break;
        }
        z = next;
        fz = f_next;
    }
    let scale = 1.0 + target.scale(spec, z.re);
    (fz.norm() <= tol * scale).then_some(z)
}

/// Shrinks a cell known to hold zeros by quadrisection down to a diameter of
/// `1e-12`, for when Newton's method fails.
fn shrink_cell(spec: &PartialSum, target: Target, mut rect: Rectangle) -> Complex64 {
    while rect.diameter() > 1e-12 {
        let mut next = None;
        for c in rect.quadrisect(0.5, 0.5) {
            if let Ok(k) = contour_winding(spec, target, &c) {
                if k > 0 {
                    next = Some(c);
                    break;
                }
            }
        }
        match next {
            Some(c) => rect = c,
            None => break,
        }
    }
    rect.center()
}

/// Newton iterates from `start`, returning the one with the smallest
/// residual. Used when the requested tolerance is below what rounding allows,
/// as happens at large heights.
fn newton_best(
    spec: &PartialSum,
    target: Target,
    start: Complex64,
    multiplicity: u32,
    max_steps: usize,
) -> Complex64 {
    let mut z = start;
    let mut best = (target.value(spec, z).norm(), z);
    for _ in 0..max_steps {
        let d = target.derivative(spec, z);
        if d.norm() == 0.0 || !d.norm().is_finite() {
            break;
        }
        z -= target.value(spec, z) / d * multiplicity as f64;
        if !z.re.is_finite() || !z.im.is_finite() {
            break;
        }
        let r = target.value(spec, z).norm();
        if r < best.0 {
            best = (r, z);
        }
    }
    best.1
}

/// Multiplicity of a refined zero: the winding number on the small square
/// around it.
pub fn local_multiplicity(spec: &PartialSum, target: Target, z: Complex64) -> Result<i64> {
    winding_count(spec, target, &Rectangle::square(z, MULTIPLICITY_RADIUS))
}

fn record(spec: &PartialSum, target: Target, location: Complex64, multiplicity: u32) -> ZeroRecord {
    ZeroRecord {
        location,
        multiplicity,
        residual: target.value(spec, location).norm(),
        simple: multiplicity == 1,
        function: target,
    }
}

/// Refines an approximate zero by Newton's method and reads off its
/// multiplicity.
pub fn refine_zero(
    spec: &PartialSum,
    target: Target,
    start: Complex64,
    tol: f64,
) -> Result<ZeroRecord> {
    target.validate(spec)?;
    let z = newton(spec, target, start, 1, tol, NEWTON_STEPS)
        .ok_or_else(|| Error::NoZeroLocated(format!("Newton did not converge from {start}")))?;
    let m = local_multiplicity(spec, target, z)?;
    if m < 1 {
        return Err(Error::NoZeroLocated(format!(
            "converged point {z} winds {m} times"
        )));
    }
    Ok(record(spec, target, z, m as u32))
}

/// Isolates and refines every zero of `target` in `rect`.
///
/// `tol` is relative: Newton stops once `|f| <= tol * (1 + sum |m^z|)`. The
/// result is sorted by `(Im, Re)` and its multiplicities add up to the
/// winding number of the (possibly perturbed) rectangle.
pub fn find_zeros(
    spec: &PartialSum,
    target: Target,
    rect: &Rectangle,
    tol: f64,
) -> Result<Vec<ZeroRecord>> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tol must be positive, got {tol}")));
    }
    let (count, rect) = winding_with_rect(spec, target, rect)?;
    let leaves = isolate(spec, target, rect, count)?;

    let refined: Vec<Result<ZeroRecord>> = leaves
        .par_iter()
        .map(|&(cell, k)| {
            let near = cell.expanded(cell.diameter());
            let guess = newton(spec, target, cell.center(), k as u32, tol, NEWTON_STEPS)
                .filter(|z| near.contains(*z))
                .unwrap_or_else(|| {
                    let shrunk = shrink_cell(spec, target, cell);
                    let polished = newton_best(spec, target, shrunk, k as u32, NEWTON_STEPS);
                    let residual = |z: Complex64| target.value(spec, z).norm();
                    if near.contains(polished) && residual(polished) < residual(shrunk) {
                        polished
                    } else {
                        shrunk
                    }
                });
            let m = local_multiplicity(spec, target, guess)?;
            Ok(record(spec, target, guess, m.max(1) as u32))
        })
        .collect();

    let mut zeros: Vec<ZeroRecord> = Vec::with_capacity(refined.len());
    for z in refined {
        let z = z?;
        if !zeros
            .iter()
            .any(|q| (q.location - z.location).norm() < DEDUP_DISTANCE)
        {
            zeros.push(z);
        }
    }
    let found: i64 = zeros.iter().map(|z| z.multiplicity as i64).sum();
    if found != count {
        return Err(Error::CountMismatch {
            expected: count,
            found,
        });
    }
    zeros.sort_by(|a, b| {
        a.location
            .im
            .total_cmp(&b.location.im)
            .then(a.location.re.total_cmp(&b.location.re))
    });
    Ok(zeros)
}

/// Whether a refined zero of `G_n` is simple: it winds once on the small
/// square and `|G_n'| > 1e-8` there.
pub fn classify_simple(spec: &PartialSum, z: Complex64) -> Result<bool> {
    let residual = spec.g(z).norm();
    if residual > 1e-6 {
        return Err(Error::invalid(format!(
            "{z} is not a zero of G_{} (|G| = {residual:e})",
            spec.n()
        )));
    }
    let winding = local_multiplicity(spec, Target::G, z)?;
    Ok(winding == 1 && spec.g_derivative(z).norm() > 1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn spec(n: usize) -> PartialSum {
        PartialSum::new(n).unwrap()
    }

    fn rect(a: f64, b: f64, c: f64, d: f64) -> Rectangle {
        Rectangle::new(a, b, c, d).unwrap()
    }

    #[test]
    fn rectangle_validation() {
        assert!(Rectangle::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Rectangle::new(0.0, 1.0, 2.0, 1.0).is_err());
        assert!(Rectangle::new(0.0, f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn g2_single_zero_below_ten() {
        assert_eq!(
            winding_count(&spec(2), Target::G, &rect(-1.0, 1.0, 0.0, 10.0)).unwrap(),
            1
        );
    }

    #[test]
    fn no_zeros_right_of_strip() {
        let s = spec(5);
        let b = crate::strip::x_bounds(&s, 1e-12).unwrap();
        let r = rect(b.x1 + 0.01, b.x1 + 3.0, -40.0, 40.0);
        assert_eq!(winding_count(&s, Target::G, &r).unwrap(), 0);
    }

    #[test]
    fn g2_lattice() {
        let zeros = find_zeros(&spec(2), Target::G, &rect(-1.0, 1.0, 0.0, 40.0), 1e-10).unwrap();
        assert_eq!(zeros.len(), 4);
        for (k, z) in zeros.iter().enumerate() {
            let want = Complex64::new(0.0, PI * (2 * k + 1) as f64 / LN_2);
            assert!((z.location - want).norm() < 1e-9, "{:?}", z.location);
            assert!(z.simple && z.multiplicity == 1);
            assert_eq!(z.function, Target::G);
        }
    }

    #[test]
    fn zero_on_the_edge_is_perturbed_into_the_count() {
        // the first zero of G_2 sits exactly on the line y = pi / ln 2
        let y = PI / LN_2;
        let r = rect(-1.0, 1.0, y, y + 1.0);
        let count = winding_count(&spec(2), Target::G, &r).unwrap();
        assert_eq!(count, 1);
    }

    #[test]
    fn small_square_around_zero() {
        let s = spec(4);
        let zeros = find_zeros(&s, Target::G, &rect(-2.0, 2.0, 0.0, 12.0), 1e-12).unwrap();
        assert!(!zeros.is_empty());
        for z in &zeros {
            let sq = Rectangle::square(z.location, 1e-3);
            assert_eq!(winding_count(&s, Target::G, &sq).unwrap(), 1);
            assert!(classify_simple(&s, z.location).unwrap());
        }
    }

    #[test]
    fn g_star_4_zeros_are_imaginary() {
        let zeros =
            find_zeros(&spec(4), Target::GStar, &rect(-1.0, 1.0, 0.0, 20.0), 1e-12).unwrap();
        // 1 + w + w^2 = 0 at w = 2^s = exp(+-2 pi i / 3)
        assert_eq!(zeros.len(), 4);
        for z in &zeros {
            assert!(z.location.re.abs() < 1e-10);
            let k = z.location.im * LN_2 / (2.0 * PI / 3.0);
            assert!((k - k.round()).abs() < 1e-9 && k.round() as i64 % 3 != 0);
        }
    }

    #[test]
    fn derivative_zeros() {
        let s = spec(5);
        let r = rect(-3.0, 3.0, 0.5, 20.0);
        let zeros = find_zeros(&s, Target::GDerivative, &r, 1e-12).unwrap();
        let count = winding_count(&s, Target::GDerivative, &r).unwrap();
        assert_eq!(
            zeros.iter().map(|z| z.multiplicity as i64).sum::<i64>(),
            count
        );
        for z in &zeros {
            assert!(s.g_derivative(z.location).norm() < 1e-9);
        }
    }

    #[test]
    fn g_star_rejected_for_n2() {
        let err = winding_count(&spec(2), Target::GStar, &rect(-1.0, 1.0, 0.0, 1.0));
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn classify_rejects_non_zero() {
        assert!(matches!(
            classify_simple(&spec(3), Complex64::new(0.0, 1.0)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn zeros_of_g2_are_simple() {
        let s = spec(2);
        for k in [0, 1, 5] {
            let z = Complex64::new(0.0, PI * (2 * k + 1) as f64 / LN_2);
            assert!(classify_simple(&s, z).unwrap());
        }
    }

    #[test]
    fn refine_zero_from_nearby_guess() {
        let s = spec(3);
        let z = refine_zero(&s, Target::G, Complex64::new(0.3, 4.5), 1e-13).unwrap();
        assert_eq!(z.multiplicity, 1);
        assert!(z.residual < 1e-12);
    }
}
