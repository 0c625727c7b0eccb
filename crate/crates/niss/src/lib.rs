//! Non-interactive source simulation (NISS) over finite alphabets.
//!
//! Two agents observe correlated IID sequences `X^d`, `Y^d` and apply local
//! functions `U = f(X^d)`, `V = g(Y^d)` to approximate a target joint output
//! distribution without communicating. This crate provides the pieces needed
//! to study and solve that problem at desk scale:
//!
//! - [`distributions`]: finite joint/target pmfs, total variation, Pearson
//!   correlation, and the bijection between output distributions and
//!   expectation vectors.
//! - [`fourier`]: orthonormal function bases on finite probability spaces,
//!   transforms of truth tables, and Fourier-domain cross-correlation.
//! - [`maxcorr`]: maximal, biased, and directional maximal correlation;
//!   primal feasible sets and objectives.
//! - [`fpath`]: the convex-concave path-following solver with a Frank-Wolfe
//!   inner loop and an optimality certificate.
//! - [`duallp`]: a linear-programming route to biased maximal correlation for
//!   uniform input marginals, with an embedded dense simplex solver.
//! - [`protocol`]: executable simulating protocols (randomization /
//!   derandomization, gated coin mixtures) and Monte-Carlo evaluation.
//! - [`lexico`]: lexicographic simulating functions, distance spectra,
//!   correlation-preserving operators, and TV-decay experiments.
//! - [`noniid`]: case studies with non-IID inputs (shared-bit common
//!   randomness, Bell-state measurements, Markov sources).
//! - [`oracle`]: brute-force ground-truth engines used to certify the rest.
//! - [`cli`]: instance-file parsing and the command implementations behind
//!   the `niss` binary.

pub mod cli;
pub mod distributions;
pub mod duallp;
pub mod error;
pub mod fourier;
pub mod fpath;
pub mod index;
pub mod lexico;
pub mod maxcorr;
pub mod noniid;
pub mod oracle;
pub mod protocol;

pub use error::{Error, Result};
