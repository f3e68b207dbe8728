//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL ...` line before asserting.

use std::f64::consts::{LN_2, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sumzeta_cli::json::ZeroJson;
use sumzeta_cli::run_with;
use sumzeta_core::kronecker::{find_translations, zero_near_line};
use sumzeta_core::levelcurve::{
    cauchy_riemann_residual, interval_certificate, level_line_intersect,
};
use sumzeta_core::strip::{prime_strip, x_bounds};
use sumzeta_core::torus::{certify, g4_certificate, lift_certificate, lift_threshold, sigma_grid};
use sumzeta_core::zerofinder::{classify_simple, find_zeros, winding_count, Rectangle};
use sumzeta_core::{PartialSum, Target};

const SEED: u64 = 20_240_601;

fn verdict(number: u32, ok: bool, detail: String) {
    println!(
        "criterion {number}: {} {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {number} failed: {detail}");
}

fn spec(n: usize) -> PartialSum {
    PartialSum::new(n).unwrap()
}

fn within(start: Instant, limit: Duration) -> (bool, Duration) {
    let took = start.elapsed();
    (took < limit, took)
}

#[test]
fn criterion_01_g2_zero_lattice() {
    let start = Instant::now();
    let mut out = Vec::new();
    let code = run_with(
        [
            "sumzeta",
            "zeros",
            "--n",
            "2",
            "--rect",
            "-1,1,0,40",
            "--tol",
            "1e-10",
        ],
        &mut out,
        &mut Vec::new(),
    );
    let (fast, took) = within(start, Duration::from_secs(1));
    let text = String::from_utf8(out).unwrap();
    let zeros: Vec<ZeroJson> = text
        .lines()
        .skip(1)
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let worst = zeros
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let exact = Complex64::new(0.0, PI * (2 * k + 1) as f64 / LN_2);
            (z.location() - exact).norm()
        })
        .fold(0.0, f64::max);
    let ok = code == 0 && zeros.len() == 4 && worst <= 1e-9 && fast;
    verdict(
        1,
        ok,
        format!("count {} max error {worst:.1e} in {took:?}", zeros.len()),
    );
}

fn g4_grid() -> Vec<f64> {
    // exact decimal grid -0.55, -0.50, ..., 1.00
    (0..32).map(|k| (-55 + 5 * k) as f64 / 100.0).collect()
}

#[test]
fn criterion_02_g4_construction_grid() {
    let start = Instant::now();
    let residuals: Vec<f64> = g4_grid()
        .into_iter()
        .map(|sigma| g4_certificate(sigma, 1e-9).map_or(f64::INFINITY, |c| c.residual))
        .collect();
    let (fast, took) = within(start, Duration::from_secs(1));
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    let ok = residuals.len() == 32 && worst <= 1e-9 && fast;
    verdict(
        2,
        ok,
        format!("32 points, max residual {worst:.1e} in {took:?}"),
    );
}

#[test]
fn criterion_03_lift_to_five() {
    let s4 = spec(4);
    let s5 = spec(5);
    let grid = g4_grid();
    let threshold = lift_threshold(4);
    let precondition = grid.iter().all(|&s| s <= threshold);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for &sigma in &grid {
        let lifted = g4_certificate(sigma, 1e-9).and_then(|c| lift_certificate(&s4, &c, 1e-8));
        match lifted {
            Ok(c) => {
                let r = c.recompute_residual(&s5).unwrap();
                worst = worst.max(r);
                if r > 1e-8 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    let ok = precondition && failures == 0;
    verdict(
        3,
        ok,
        format!("threshold {threshold:.4}, {failures} failures, max residual {worst:.1e}"),
    );
}

#[test]
fn criterion_04_zeros_inside_bounds() {
    let start = Instant::now();
    let mut outside = 0;
    let mut total = 0;
    for n in 3..=8 {
        let s = spec(n);
        let b = x_bounds(&s, 1e-13).unwrap();
        let rect = Rectangle::new(-3.0, b.x1 + 1.0, 0.0, 50.0).unwrap();
        let zeros = find_zeros(&s, Target::G, &rect, 1e-12).unwrap();
        total += zeros.len();
        outside += zeros
            .iter()
            .filter(|z| !(b.x0 - 1e-9 <= z.location.re && z.location.re <= b.x1 + 1e-9))
            .count();
    }
    let (fast, took) = within(start, Duration::from_secs(60));
    let ok = outside == 0 && total > 0 && fast;
    verdict(
        4,
        ok,
        format!("{total} zeros for n = 3..8, {outside} outside, in {took:?}"),
    );
}

#[test]
fn criterion_05_prime_simple_strip() {
    let mut details = Vec::new();
    let mut ok = true;
    for n in [3, 5, 7] {
        let s = spec(n);
        let r = prime_strip(&s, 1e-10).unwrap();
        let b = x_bounds(&s, 1e-10).unwrap();
        let rect = Rectangle::new(r.b_n1_prime, r.b_n1, 0.0, 50.0).unwrap();
        let zeros = find_zeros(&s, Target::G, &rect, 1e-12).unwrap();
        let inside: Vec<_> = zeros
            .iter()
            .filter(|z| r.b_n1_prime < z.location.re && z.location.re < r.b_n1)
            .collect();
        let simple = inside
            .iter()
            .all(|z| z.multiplicity == 1 && classify_simple(&s, z.location).unwrap());
        let this = r.gap > 1e-6 && (r.b_n1 - b.x1).abs() <= 2e-10 && simple;
        ok &= this;
        details.push(format!(
            "n={n} gap {:.4} zeros {} simple {simple}",
            r.gap,
            inside.len()
        ));
    }
    verdict(5, ok, details.join("; "));
}

#[test]
fn criterion_06_characterizations_agree() {
    let s = spec(4);
    let b = x_bounds(&s, 1e-13).unwrap();
    let grid = sigma_grid(b.x0, b.x1, 0.1);
    let mut mismatches = Vec::new();
    let mut members = 0;
    for &sigma in &grid {
        let torus = certify(&s, sigma, 1e-6, 64, SEED).unwrap().is_found();
        let level = !level_line_intersect(&s, sigma, 500.0, 0.01)
            .unwrap()
            .is_empty();
        members += usize::from(torus);
        if torus != level {
            mismatches.push(sigma);
        }
    }
    verdict(
        6,
        mismatches.is_empty(),
        format!(
            "{} grid points, {members} in R_4, mismatches {mismatches:?}",
            grid.len()
        ),
    );
}

#[test]
fn criterion_07_interval_from_g_star_zero() {
    let s = spec(4);
    let zero = Complex64::new(0.0, 2.0 * PI / (3.0 * LN_2));
    let cert = interval_certificate(&s, zero, 0.5, 1e-10).unwrap();
    let uncertified: Vec<f64> = (0..=10)
        .map(|j| cert.sigma + cert.r * j as f64 / 10.0)
        .filter(|&sigma| !certify(&s, sigma, 1e-6, 64, SEED).unwrap().is_found())
        .collect();
    let ok = cert.r > 0.0 && uncertified.is_empty();
    verdict(
        7,
        ok,
        format!("r = {:.4}, uncertified grid points {uncertified:?}", cert.r),
    );
}

#[test]
fn criterion_08_translation_chain() {
    let start = Instant::now();
    let s = spec(4);
    let sigma = 0.5;
    let cert = g4_certificate(sigma, 1e-12).unwrap();
    let search = find_translations(&s, sigma, &cert.x, 1e-3, 1e7, 1).unwrap();
    let hit = search.hits.first().expect("a translation height");
    let near = zero_near_line(&s, &cert, 1e-3).unwrap();
    let (fast, took) = within(start, Duration::from_secs(30));
    let g_near = s.g(near.zero.location).norm();
    let ok = cert.residual <= 1e-10
        && hit.t <= 1e7
        && hit.g_value.norm() <= 0.02
        && g_near <= 1e-9
        && near.deviation <= 0.01
        && fast;
    verdict(
        8,
        ok,
        format!(
            "T = {:.3}, |G_4(0.5+iT)| = {:.2e}, zero {:.6} with |G_4| = {g_near:.1e}, in {took:?}",
            hit.t,
            hit.g_value.norm(),
            near.zero.location
        ),
    );
}

#[test]
fn criterion_09_simple_zeros_not_isolated() {
    let s = spec(4);
    let b = x_bounds(&s, 1e-13).unwrap();
    let rect = Rectangle::new(b.x0 - 0.1, b.x1 + 0.1, 0.0, 30.0).unwrap();
    let zeros = find_zeros(&s, Target::G, &rect, 1e-13).unwrap();
    let deltas: Vec<f64> = (1..=10).map(|j| 0.002 * j as f64).collect();
    let mut checked = 0;
    let mut failures = Vec::new();
    for z in zeros
        .iter()
        .filter(|z| z.simple && z.location.im > 0.0 && z.location.im < 30.0)
    {
        checked += 1;
        let sigma0 = z.location.re;
        let side = |sign: f64| {
            deltas.iter().all(|d| {
                certify(&s, sigma0 + sign * d, 1e-6, 64, SEED)
                    .unwrap()
                    .is_found()
            })
        };
        if !(side(-1.0) || side(1.0)) {
            failures.push(z.location);
        }
    }
    verdict(
        9,
        checked > 0 && failures.is_empty(),
        format!("{checked} simple zeros, failures {failures:?}"),
    );
}

/// `G_3(s) = 1 + 2^s + 3^s` and its derivative, written out directly.
fn g3(s: Complex64) -> (Complex64, Complex64) {
    let (l2, l3) = (2f64.ln(), 3f64.ln());
    let (t2, t3) = ((s * l2).exp(), (s * l3).exp());
    (1.0 + t2 + t3, l2 * t2 + l3 * t3)
}

/// Zeros of `G_3` in `[x_lo, x_hi] x [y_lo, y_hi]` from local minima of `|G_3|`
/// on a 2000 x 2000 grid, each polished by Newton's method.
fn g3_grid_oracle(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Vec<Complex64> {
    const N: usize = 2000;
    let dx = (x_hi - x_lo) / (N - 1) as f64;
    let dy = (y_hi - y_lo) / (N - 1) as f64;
    let at = |i: usize, j: usize| Complex64::new(x_lo + i as f64 * dx, y_lo + j as f64 * dy);
    let grid: Vec<f64> = (0..N * N).map(|k| g3(at(k / N, k % N)).0.norm()).collect();
    let value = |i: usize, j: usize| grid[i * N + j];
    let mut found: Vec<Complex64> = Vec::new();
    for i in 1..N - 1 {
        for j in 1..N - 1 {
            let v = value(i, j);
            let is_min = (i - 1..=i + 1)
                .flat_map(|a| (j - 1..=j + 1).map(move |b| (a, b)))
                .filter(|&(a, b)| (a, b) != (i, j))
                .all(|(a, b)| v <= value(a, b));
            if !is_min {
                continue;
            }
            let mut z = at(i, j);
            for _ in 0..50 {
                let (f, d) = g3(z);
                z -= f / d;
            }
            let inside = x_lo <= z.re && z.re <= x_hi && y_lo <= z.im && z.im <= y_hi;
            if inside && g3(z).0.norm() < 1e-12 && !found.iter().any(|w| (w - z).norm() < 1e-6) {
                found.push(z);
            }
        }
    }
    found
}

#[test]
fn criterion_10_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut mismatches = 0;
    let mut rectangles = 0;
    for n in [3, 4, 5] {
        let s = spec(n);
        for _ in 0..20 {
            let x_lo = rng.gen_range(-3.0..1.5);
            let y_lo = rng.gen_range(0.0..40.0);
            let rect = Rectangle::new(
                x_lo,
                x_lo + rng.gen_range(0.2..3.0),
                y_lo,
                y_lo + rng.gen_range(0.5..12.0),
            )
            .unwrap();
            let count = winding_count(&s, Target::G, &rect).unwrap();
            let found: i64 = find_zeros(&s, Target::G, &rect, 1e-12)
                .unwrap()
                .iter()
                .map(|z| z.multiplicity as i64)
                .sum();
            rectangles += 1;
            if count != found {
                mismatches += 1;
            }
        }
    }

    let s3 = spec(3);
    let rect = Rectangle::new(-2.0, 2.0, 0.0, 30.0).unwrap();
    let finder: Vec<Complex64> = find_zeros(&s3, Target::G, &rect, 1e-13)
        .unwrap()
        .iter()
        .map(|z| z.location)
        .collect();
    let oracle = g3_grid_oracle(-2.0, 2.0, 0.0, 30.0);
    let matched = finder
        .iter()
        .all(|z| oracle.iter().any(|w| (w - z).norm() <= 1e-6));
    let ok = mismatches == 0 && finder.len() == oracle.len() && matched;
    verdict(
        10,
        ok,
        format!(
            "{rectangles} rectangles, {mismatches} count mismatches; G_3 grid oracle {} zeros vs {} found, matched {matched}",
            oracle.len(),
            finder.len()
        ),
    );
}

#[test]
fn criterion_11_cauchy_riemann_identity() {
    let s = spec(5);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut points = Vec::new();
    while points.len() < 100 {
        let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.0..50.0));
        if s.g_star(z).unwrap().norm() > 1e-3 {
            points.push(z);
        }
    }
    let worst = points
        .iter()
        .map(|&z| cauchy_riemann_residual(&s, z, 1e-4).unwrap())
        .fold(0.0, f64::max);

    let h = 1e-2;
    let ratios: Vec<f64> = points
        .iter()
        .filter(|&&z| s.g_star(z).unwrap().norm() > 0.1)
        .take(10)
        .map(|&z| {
            cauchy_riemann_residual(&s, z, h).unwrap()
                / cauchy_riemann_residual(&s, z, h / 2.0).unwrap()
        })
        .collect();
    let ok = worst <= 1e-5 && ratios.len() == 10 && ratios.iter().all(|r| (3.0..=5.0).contains(r));
    verdict(
        11,
        ok,
        format!("max residual {worst:.1e}, ratios {ratios:.3?}"),
    );
}
