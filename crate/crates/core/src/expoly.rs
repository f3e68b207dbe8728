//! Combinatorial setup and evaluation of the exponential polynomials.
//!
//! Every integer `m <= n` factors over the primes `p_1 < ... < p_k <= n`, so
//! `ln m = <c_m, p>` with `p = (ln p_1, ..., ln p_k)` and `c_m` a vector of
//! non-negative integers. Replacing the phases `t * ln p_l` of
//! `G_n(sigma + it)` by free variables `x_l` gives the torus function
//!
//! ```text
//! F_n(sigma, x) = sum_{m=1}^{n} m^sigma * exp(i <c_m, x>)
//! ```
//!
//! which agrees with `G_n(sigma + it)` on the line `x = t * p`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The data attached to `G_n`: primes up to `n` and the exponent vector of
/// every `m <= n` over that prime basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialSum {
    n: usize,
    primes: Vec<u64>,
    exponent_vectors: Vec<Vec<u32>>,
    #[serde(skip)]
    logs: Vec<f64>,
}

/// Which holomorphic function a zero search runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    #[serde(rename = "G")]
    G,
    #[serde(rename = "Gp")]
    GDerivative,
    #[serde(rename = "Gstar")]
    GStar,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::G => "G",
            Target::GDerivative => "Gp",
            Target::GStar => "Gstar",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "G" => Some(Target::G),
            "Gp" => Some(Target::GDerivative),
            "Gstar" => Some(Target::GStar),
            _ => None,
        }
    }

    /// Rejects `G*` for `n <= 2`, where it is undefined.
    pub fn validate(self, spec: &PartialSum) -> Result<()> {
        if self == Target::GStar && spec.n <= 2 {
            return Err(Error::invalid("G* requires n > 2"));
        }
        Ok(())
    }

    pub fn value(self, spec: &PartialSum, s: Complex64) -> Complex64 {
        match self {
            Target::G => spec.weighted_sum(s, 0, None),
            Target::GDerivative => spec.weighted_sum(s, 1, None),
            Target::GStar => spec.weighted_sum(s, 0, Some(spec.largest_prime_index())),
        }
    }

    pub fn derivative(self, spec: &PartialSum, s: Complex64) -> Complex64 {
        match self {
            Target::G => spec.weighted_sum(s, 1, None),
            Target::GDerivative => spec.weighted_sum(s, 2, None),
            Target::GStar => spec.weighted_sum(s, 1, Some(spec.largest_prime_index())),
        }
    }

    /// Sum of the moduli of the terms at abscissa `sigma`; the natural size of
    /// the function on the vertical line through `sigma`.
    pub fn scale(self, spec: &PartialSum, sigma: f64) -> f64 {
        let power = match self {
            Target::GDerivative => 1,
            _ => 0,
        };
        spec.logs
            .iter()
            .map(|&l| l.powi(power) * (sigma * l).exp())
            .sum()
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialSum {
    /// Builds the prime basis and exponent vectors by trial division.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("n must be at least 2, got {n}")));
        }
        let primes: Vec<u64> = (2..=n as u64).filter(|&m| is_prime(m)).collect();
        let exponent_vectors = (1..=n as u64)
            .map(|m| {
                let mut rest = m;
                primes
                    .iter()
                    .map(|&p| {
                        let mut e = 0;
                        while rest % p == 0 {
                            rest /= p;
                            e += 1;
                        }
                        e
                    })
                    .collect()
            })
            .collect();
        let logs = (1..=n).map(|m| (m as f64).ln()).collect();
        Ok(Self {
            n,
            primes,
            exponent_vectors,
            logs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of primes `<= n`, the dimension of the torus.
    pub fn k(&self) -> usize {
        self.primes.len()
    }

    /// Exponent vector `c_m`, for `1 <= m <= n`.
    pub fn exponent(&self, m: usize) -> &[u32] {
        &self.exponent_vectors[m - 1]
    }

    pub fn exponent_vectors(&self) -> &[Vec<u32>] {
        &self.exponent_vectors
    }

    /// `ln m` for `m = 1..=n`.
    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    /// `(ln p_1, ..., ln p_k)`.
    pub fn prime_logs(&self) -> Vec<f64> {
        self.primes.iter().map(|&p| (p as f64).ln()).collect()
    }

    pub fn largest_prime(&self) -> u64 {
        *self.primes.last().expect("n >= 2 has a prime")
    }

    fn largest_prime_index(&self) -> usize {
        self.largest_prime() as usize - 1
    }

    /// `sum (ln m)^power * m^s`, optionally skipping one term (0-based).
    fn weighted_sum(&self, s: Complex64, power: i32, skip: Option<usize>) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, &l) in self.logs.iter().enumerate() {
            if Some(idx) == skip {
                continue;
            }
            let term = if idx == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar((s.re * l).exp(), s.im * l)
            };
            acc += if power == 0 {
                term
            } else {
                term * l.powi(power)
            };
        }
        acc
    }

    /// `G_n(s) = sum_{m=1}^n m^s`.
    pub fn g(&self, s: Complex64) -> Complex64 {
        self.weighted_sum(s, 0, None)
    }

    pub fn g_derivative(&self, s: Complex64) -> Complex64 {
        self.weighted_sum(s, 1, None)
    }

    /// `G*_n(s) = G_n(s) - p_k^s`, defined for `n > 2`.
    pub fn g_star(&self, s: Complex64) -> Result<Complex64> {
        Target::GStar.validate(self)?;
        Ok(Target::GStar.value(self, s))
    }

    pub fn g_star_derivative(&self, s: Complex64) -> Result<Complex64> {
        Target::GStar.validate(self)?;
        Ok(Target::GStar.derivative(self, s))
    }

    /// `G_n(sigma)` for real `sigma`: the sum of the term moduli on the line.
    pub fn modulus_sum(&self, sigma: f64) -> f64 {
        self.logs.iter().map(|&l| (sigma * l).exp()).sum()
    }

    fn check_dim(&self, x: &TorusPoint) -> Result<()> {
        if x.len() != self.k() {
            return Err(Error::invalid(format!(
                "torus point has {} components, expected {}",
                x.len(),
                self.k()
            )));
        }
        Ok(())
    }

    /// Phase `<c_m, x>` of term `m` (1-based).
    pub fn phase(&self, m: usize, x: &[f64]) -> f64 {
        self.exponent(m)
            .iter()
            .zip(x)
            .map(|(&c, &xi)| c as f64 * xi)
            .sum()
    }

    /// `F_n(sigma, x)`.
    pub fn f(&self, sigma: f64, x: &TorusPoint) -> Result<Complex64> {
        self.check_dim(x)?;
        Ok(self.f_raw(sigma, x.phases()))
    }

    /// `F_n(sigma, x)` on an unreduced phase vector of the right length.
    pub(crate) fn f_raw(&self, sigma: f64, x: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 1..=self.n {
            acc += Complex64::from_polar((sigma * self.logs[m - 1]).exp(), self.phase(m, x));
        }
        acc
    }

    /// `F_n` together with its partial derivatives in each phase variable:
    /// `dF/dx_l = sum_m m^sigma * i c_m[l] * exp(i <c_m, x>)`.
    pub(crate) fn f_with_jacobian(&self, sigma: f64, x: &[f64]) -> (Complex64, Vec<Complex64>) {
        let mut value = Complex64::new(0.0, 0.0);
        let mut jac = vec![Complex64::new(0.0, 0.0); self.k()];
        for m in 1..=self.n {
            let term = Complex64::from_polar((sigma * self.logs[m - 1]).exp(), self.phase(m, x));
            value += term;
            let rotated = term * Complex64::i();
            for (d, &c) in jac.iter_mut().zip(self.exponent(m)) {
                if c != 0 {
                    *d += rotated * c as f64;
                }
            }
        }
        (value, jac)
    }

    /// `A_n(x, y) = |G*_n(x + iy)| - p_k^x`.
    pub fn a(&self, x: f64, y: f64) -> Result<f64> {
        let star = self.g_star(Complex64::new(x, y))?;
        Ok(star.norm() - (self.largest_prime() as f64).powf(x))
    }

    pub(crate) fn a_unchecked(&self, x: f64, y: f64) -> f64 {
        Target::GStar.value(self, Complex64::new(x, y)).norm()
            - (self.largest_prime() as f64).powf(x)
    }
}

pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A point on the torus `(R / 2 pi Z)^k`, stored with every phase in `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    pub fn new(phases: Vec<f64>) -> Self {
        Self(phases.into_iter().map(reduce_phase).collect())
    }

    /// The point `t * p` of the Kronecker line through the origin.
    pub fn from_height(spec: &PartialSum, t: f64) -> Self {
        Self::new(spec.prime_logs().into_iter().map(|l| t * l).collect())
    }

    pub fn zeros(k: usize) -> Self {
        Self(vec![0.0; k])
    }

    pub fn phases(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for TorusPoint {
    fn from(v: Vec<f64>) -> Self {
        Self::new(v)
    }
}

impl From<TorusPoint> for Vec<f64> {
    fn from(p: TorusPoint) -> Self {
        p.0
    }
}

/// Reduces an angle to `[0, 2 pi)`.
pub fn reduce_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Distance from `x` to the nearest multiple of `2 pi`.
pub fn circle_distance(x: f64) -> f64 {
    let r = reduce_phase(x);
    r.min(TAU - r)
}
