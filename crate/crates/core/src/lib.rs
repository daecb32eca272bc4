//! Certified construction of integer pairs `(m, n)` whose harmonic difference
//! `H_m - H_{n-1} = 1/n + ... + 1/m` lies extremely close to 1.
//!
//! The crate is organized bottom-up:
//!
//! - [`exactnum`]: exact rationals and outward-rounded ball arithmetic.
//! - [`contfrac`]: continued fractions of `e`, convergents, remainders.
//! - [`harmonic`]: exact and certified harmonic differences, `t(n)`, `eps_n`.
//! - [`construct`]: explicit pairs from the `p_{3k+2}/q_{3k+2}` convergents.
//! - [`counting`]: exponential sums, the Erdős–Turán inequality, counting
//!   `||p n^2 / q - r|| < delta`, approximations `m/n^2`.
//! - [`oracle`]: exhaustive record scan of `n^2 eps_n`.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise.

pub mod construct;
pub mod contfrac;
pub mod counting;
pub mod error;
pub mod exactnum;
pub mod harmonic;
pub mod oracle;
pub mod par;

pub use error::{Error, Result};
pub use exactnum::{Ball, Rat};
