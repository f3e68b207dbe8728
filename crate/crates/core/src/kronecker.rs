//! Heights `T` at which the phases `T ln p` sit close to a prescribed torus
//! point, and zeros of `G_n` found from such heights.
//!
//! The logarithms of the primes are linearly independent over the rationals,
//! so the line `t -> t (ln p_1, ..., ln p_k)` is dense in the torus and every
//! torus point is approached. Here the approach is found directly: each
//! window of `T` where the phase of `2` is within `epsilon` of its target is
//! intersected with the matching windows of the other primes.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expoly::{PartialSum, Target, TorusPoint};
use crate::torus::TorusCertificate;
use crate::zerofinder::{local_multiplicity, newton, ZeroRecord};

/// Default upper end of the height search.
pub const DEFAULT_T_RANGE: f64 = 1e7;
/// Windows of the first prime examined per parallel chunk.
const CHUNK: i64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationResult {
    pub t: f64,
    /// Distance of `T ln p_l - x_l` from `2 pi Z`, per prime.
    pub phase_errors: Vec<f64>,
    /// The integers `N_l` with `T ln p_l - x_l` closest to `2 pi N_l`.
    pub integers: Vec<i64>,
    pub g_value: Complex64,
}

impl TranslationResult {
    pub fn max_phase_error(&self) -> f64 {
        self.phase_errors.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationSearch {
    pub hits: Vec<TranslationResult>,
    /// Set when fewer than the requested number of heights were found.
    pub diagnostic: Option<String>,
}

/// `max_l |T ln p_l - a_l|` minimized over `T` in `[lo, hi]`.
///
/// The objective is the upper envelope of the lines `+-(T ln p_l - a_l)`, so
/// its minimum is at an end point, a zero of one line, or a crossing of two.
fn minimax(logs: &[f64], anchors: &[f64], lo: f64, hi: f64) -> f64 {
    let worst = |t: f64| {
        logs.iter()
            .zip(anchors)
            .map(|(l, a)| (t * l - a).abs())
            .fold(0.0, f64::max)
    };
    let mut candidates = vec![lo, hi];
    for (i, (li, ai)) in logs.iter().zip(anchors).enumerate() {
        candidates.push(ai / li);
        for (lj, aj) in logs.iter().zip(anchors).skip(i + 1) {
            // t li - ai = t lj - aj  and  t li - ai = -(t lj - aj)
            if li != lj {
                candidates.push((ai - aj) / (li - lj));
            }
            candidates.push((ai + aj) / (li + lj));
        }
    }
    candidates
        .into_iter()
        .filter(|t| (lo..=hi).contains(t))
        .map(|t| (t, worst(t)))
        .min_by(|p, q| p.1.total_cmp(&q.1).then(p.0.total_cmp(&q.0)))
        .map_or(lo, |(t, _)| t)
}

/// Heights in the window of `2 pi n1` for the first prime that satisfy all
/// phase conditions. Each joint window contributes its minimax point.
fn hits_in_window(
    logs: &[f64],
    targets: &[f64],
    epsilon: f64,
    n1: i64,
    t_min: f64,
    t_max: f64,
) -> Vec<f64> {
    let a0 = targets[0] + TAU * n1 as f64;
    let lo = ((a0 - epsilon) / logs[0]).max(t_min);
    let hi = ((a0 + epsilon) / logs[0]).min(t_max);
    if lo > hi {
        return Vec::new();
    }
    // cartesian product of the admissible integers of the remaining primes
    let mut partial: Vec<(f64, f64, Vec<f64>)> = vec![(lo, hi, vec![a0])];
    for (l, x) in logs.iter().zip(targets).skip(1) {
        let mut next = Vec::new();
        for (lo, hi, anchors) in &partial {
            let first = ((lo * l - x - epsilon) / TAU).ceil() as i64;
            let last = ((hi * l - x + epsilon) / TAU).floor() as i64;
            for n in first..=last {
                let a = x + TAU * n as f64;
                let w_lo = lo.max((a - epsilon) / l);
                let w_hi = hi.min((a + epsilon) / l);
                if w_lo <= w_hi {
                    let mut anchors = anchors.clone();
                    anchors.push(a);
                    next.push((w_lo, w_hi, anchors));
                }
            }
        }
        partial = next;
        if partial.is_empty() {
            break;
        }
    }
    partial
        .into_iter()
        .map(|(lo, hi, anchors)| minimax(logs, &anchors, lo, hi))
        .collect()
}

fn describe(
    spec: &PartialSum,
    sigma: f64,
    targets: &[f64],
    logs: &[f64],
    t: f64,
) -> TranslationResult {
    let (phase_errors, integers) = logs
        .iter()
        .zip(targets)
        .map(|(l, x)| {
            let d = t * l - x;
            let n = (d / TAU).round();
            ((d - TAU * n).abs(), n as i64)
        })
        .unzip();
    TranslationResult {
        t,
        phase_errors,
        integers,
        g_value: spec.g(Complex64::new(sigma, t)),
    }
}

/// Up to `count` strictly increasing heights `T` in `(1, t_range]` with every
/// `T ln p_l` within `epsilon` of `x_l` modulo `2 pi`.
pub fn find_translations(
    spec: &PartialSum,
    sigma: f64,
    x: &TorusPoint,
    epsilon: f64,
    t_range: f64,
    count: usize,
) -> Result<TranslationSearch> {
    if !(epsilon > 0.0) || count == 0 {
        return Err(Error::invalid("need epsilon > 0 and count >= 1"));
    }
    if x.len() != spec.k() {
        return Err(Error::invalid(format!(
            "torus point has {} phases, expected {}",
            x.len(),
            spec.k()
        )));
    }
    let logs = spec.prime_logs();
    let targets = x.phases();
    let t_min = 1.0f64.next_up();
    let mut hits: Vec<TranslationResult> = Vec::new();
    if t_range > 1.0 {
        let first = ((t_min * logs[0] - targets[0] - epsilon) / TAU).floor() as i64;
        let last = ((t_range * logs[0] - targets[0] + epsilon) / TAU).ceil() as i64;
        let batch = CHUNK * 4 * rayon::current_num_threads().max(1) as i64;
        let mut start = first;
        while start <= last && hits.len() < count {
            let end = (start + batch - 1).min(last);
            let chunks: Vec<i64> = (start..=end).step_by(CHUNK as usize).collect();
            let found: Vec<Vec<f64>> = chunks
                .par_iter()
                .map(|&c| {
                    (c..=(c + CHUNK - 1).min(end))
                        .flat_map(|n1| hits_in_window(&logs, targets, epsilon, n1, t_min, t_range))
                        .collect()
                })
                .collect();
            let mut ts: Vec<f64> = found.into_iter().flatten().collect();
            ts.sort_by(f64::total_cmp);
            for t in ts {
                let r = describe(spec, sigma, targets, &logs, t);
                let fresh = hits.last().is_none_or(|h| h.t < t);
                if fresh && r.max_phase_error() < epsilon {
                    hits.push(r);
                }
            }
            start = end + 1;
        }
    }
    hits.truncate(count);
    let diagnostic = (hits.len() < count).then(|| {
        format!(
            "found {} of {count} heights with phase error < {epsilon:e} in (1, {t_range:e}]",
            hits.len()
        )
    });
    Ok(TranslationSearch { hits, diagnostic })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearLineZero {
    pub zero: ZeroRecord,
    /// `|Re(zero) - sigma|`.
    pub deviation: f64,
    /// Height the Newton iteration started from.
    pub t: f64,
}

const NEAR_LINE_CANDIDATES: usize = 8;
const NEAR_LINE_TOL: f64 = 1e-10;
const ZERO_RESIDUAL: f64 = 1e-9;

/// A zero of `G_n` near `Re s = sigma`, reached by Newton's method from
/// `sigma + iT` for a height `T` whose phases match the certificate.
pub fn zero_near_line(
    spec: &PartialSum,
    cert: &TorusCertificate,
    epsilon: f64,
) -> Result<NearLineZero> {
    if cert.n != spec.n() {
        return Err(Error::invalid(format!(
            "certificate is for n = {}, not {}",
            cert.n,
            spec.n()
        )));
    }
    let residual = cert.recompute_residual(spec)?;
    if residual > 1e-8 {
        return Err(Error::invalid(format!(
            "certificate residual {residual:e} exceeds 1e-8"
        )));
    }
    let search = find_translations(
        spec,
        cert.sigma,
        &cert.x,
        epsilon,
        DEFAULT_T_RANGE,
        NEAR_LINE_CANDIDATES,
    )?;
    for hit in &search.hits {
        let start = Complex64::new(cert.sigma, hit.t);
        let Some(z) = newton(spec, Target::G, start, 1, NEAR_LINE_TOL, 100) else {
            continue;
        };
        let value = spec.g(z).norm();
        if value > ZERO_RESIDUAL {
            continue;
        }
        let m = local_multiplicity(spec, Target::G, z)?;
        if m < 1 {
            continue;
        }
        return Ok(NearLineZero {
            zero: ZeroRecord {
                location: z,
                multiplicity: m as u32,
                residual: value,
                simple: m == 1,
                function: Target::G,
            },
            deviation: (z.re - cert.sigma).abs(),
            t: hit.t,
        });
    }
    Err(Error::NoZeroLocated(format!(
        "Newton failed from all {} heights{}",
        search.hits.len(),
        search
            .diagnostic
            .map(|d| format!(" ({d})"))
            .unwrap_or_default()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{certify, g4_certificate, CertMethod};
    use std::f64::consts::{LN_2, PI};

    fn spec(n: usize) -> PartialSum {
        PartialSum::new(n).unwrap()
    }

    #[test]
    fn n2_half_turn() {
        let s = spec(2);
        let r = find_translations(&s, 0.3, &TorusPoint::new(vec![PI]), 1e-6, 100.0, 5).unwrap();
        assert_eq!(r.hits.len(), 5);
        assert!(r.diagnostic.is_none());
        for (k, h) in r.hits.iter().enumerate() {
            let exact = PI * (2 * k + 1) as f64 / LN_2;
            assert!((h.t - exact).abs() < 1e-12, "{} vs {exact}", h.t);
            assert_eq!(h.integers, vec![k as i64]);
        }
    }

    #[test]
    fn point_on_the_line() {
        let s = spec(6);
        let t = 37.25;
        let x = TorusPoint::from_height(&s, t);
        let r = find_translations(&s, 0.0, &x, 1e-6, 40.0, 1).unwrap();
        assert!((r.hits[0].t - t).abs() < 1e-10);
        assert!(r.hits[0].max_phase_error() < 1e-12);
    }

    #[test]
    fn strictly_increasing_in_range() {
        let s = spec(6);
        let x = TorusPoint::new(vec![1.0, 2.0, 3.0]);
        let r = find_translations(&s, 0.0, &x, 0.05, 1e5, 20).unwrap();
        assert!(!r.hits.is_empty());
        for w in r.hits.windows(2) {
            assert!(w[0].t < w[1].t);
        }
        for h in &r.hits {
            assert!(h.t > 1.0 && h.t <= 1e5);
            assert!(h.max_phase_error() < 0.05);
        }
    }

    #[test]
    fn short_list_has_diagnostic() {
        let s = spec(10);
        let x = TorusPoint::new(vec![1.0, 2.0, 3.0, 4.0]);
        let r = find_translations(&s, 0.0, &x, 1e-4, 1e3, 3).unwrap();
        assert!(r.hits.len() < 3);
        assert!(r.diagnostic.is_some());
        assert!(find_translations(&s, 0.0, &x, 0.0, 1e3, 3).is_err());
        assert!(find_translations(&s, 0.0, &x, 1e-3, 1e3, 0).is_err());
    }

    #[test]
    fn minimax_agrees_with_brute_force() {
        let logs = [2f64.ln(), 3f64.ln()];
        let anchors = [1.0, 1.7];
        let (lo, hi) = (0.5, 1.5);
        let t = minimax(&logs, &anchors, lo, hi);
        let worst = |t: f64| {
            logs.iter()
                .zip(&anchors)
                .map(|(l, a)| (t * l - a).abs())
                .fold(0.0, f64::max)
        };
        let brute = (0..=100_000)
            .map(|i| lo + (hi - lo) * i as f64 / 100_000.0)
            .map(worst)
            .fold(f64::INFINITY, f64::min);
        assert!(worst(t) <= brute + 1e-12);
    }

    #[test]
    fn g4_chain() {
        let s = spec(4);
        let cert = g4_certificate(0.5, 1e-12).unwrap();
        assert!(cert.residual <= 1e-10);
        let r = find_translations(&s, 0.5, &cert.x, 1e-3, DEFAULT_T_RANGE, 1).unwrap();
        let hit = &r.hits[0];
        assert!(hit.g_value.norm() <= 0.02, "{}", hit.g_value.norm());
        let near = zero_near_line(&s, &cert, 1e-3).unwrap();
        assert!(near.zero.residual <= 1e-9);
        assert!(near.deviation <= 0.01);
    }

    #[test]
    fn n2_on_the_axis() {
        let s = spec(2);
        let cert = certify(&s, 0.0, 1e-12, 64, 7).unwrap();
        let cert = cert.certificate().unwrap();
        let near = zero_near_line(&s, cert, 1e-6).unwrap();
        assert!(near.deviation < 1e-12);
    }

    #[test]
    fn n3_at_zero() {
        let s = spec(3);
        let cert = certify(&s, 0.0, 1e-12, 64, 7).unwrap();
        let cert = cert.certificate().unwrap();
        let near = zero_near_line(&s, cert, 1e-3).unwrap();
        assert!(near.deviation <= 0.01);
    }

    #[test]
    fn rejects_poor_certificate() {
        let s = spec(4);
        let mut cert = g4_certificate(0.5, 1e-12).unwrap();
        cert.x = TorusPoint::new(vec![0.0, 0.0]);
        cert.method = CertMethod::Optimizer;
        assert!(zero_near_line(&s, &cert, 1e-3).is_err());
    }
}
