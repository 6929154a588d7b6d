#![forbid(unsafe_code)]

//! Exact and asymptotic distribution theory for the card-cyclic to random
//! insertion shuffle: remove and uniformly reinsert each of `n` cards exactly
//! once, in the deck's original left-to-right card order.
//!
//! The crate is organized around the pipeline
//!
//! * [`perm`] — permutations, inversion statistics, l-vectors, and the exact
//!   shuffle mechanics (single moves, full insertion plans, seeded sampling);
//! * [`paths`] — arbitrary-precision counting and enumeration of the
//!   nondecreasing l-paths whose count is the numerator of every exact
//!   shuffle probability, plus the extremal theory and Dyck-word bijection;
//! * [`exact`] — exact finite-`n` probabilities, brute-force oracles,
//!   closed-form first/last-position marginals, and distances to uniform;
//! * [`limits`] — the closed-form limit laws for rescaled card positions,
//!   their densities, expectations, and named constants;
//! * [`sim`] — seeded large-`n` Monte Carlo with reproducible per-sample
//!   streams, independent of worker count;
//! * [`verify`] — the acceptance checks wired into both the `acceptance`
//!   integration test and the CLI `verify` subcommand.
//!
//! With the default `parallel` feature the embarrassingly parallel kernels
//! (plan enumeration, Monte Carlo batches, exhaustive scans) run on rayon;
//! disabling it yields a dependency-free sequential build with identical
//! results.

pub mod error;
pub mod exact;
pub mod exec;
pub mod limits;
pub mod paths;
pub mod perm;
pub mod rng;
pub mod sim;
pub mod verify;

pub use error::Error;
pub use perm::Permutation;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
