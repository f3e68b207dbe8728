//! Zeros of the partial sums `G_n(s) = 1 + 2^s + ... + n^s` of the Riemann zeta
//! function, and certificates for which real abscissas belong to `R_n`, the
//! closure of the set of real parts of those zeros.
//!
//! The crate is organised by mechanism:
//!
//! * [`expoly`]: the prime basis, exponent vectors and evaluation of `G_n`,
//!   `G_n'`, `G*_n`, the torus function `F_n` and `A_n`.
//! * [`strip`]: the computable bounds `x_{n,0}`, `x_{n,1}`, the prime-`n`
//!   simple-zero strip and the polygon inequalities.
//! * [`zerofinder`]: argument-principle counting and isolation of zeros.
//! * [`torus`]: certificates `F_n(sigma, x) = 0` on the torus.
//! * [`levelcurve`]: level curves of `|G*_n|` and interval certificates.
//! * [`kronecker`]: translation heights that turn a torus certificate into
//!   actual zeros near a vertical line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expoly;
pub mod kronecker;
pub mod levelcurve;
mod roots;
pub mod strip;
pub mod torus;
pub mod zerofinder;

pub use error::{Error, Result};
pub use expoly::{PartialSum, Target, TorusPoint};
pub use num_complex::Complex64;
