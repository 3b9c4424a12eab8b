//! greedylab: a numerical laboratory for greedy approximation.
//!
//! The crate has two wings. The first runs dictionary pursuits in a
//! finite-dimensional Euclidean model — the pure, relaxed and power-relaxed
//! greedy algorithms — together with samplers for the unit-coefficient class
//! `A_1(D)` and convergence-rate checks ([`pursuit`]), plus a standalone
//! verifier for the scalar recursion that drives the relaxed-greedy rate and
//! its `alpha <= 1` threshold ([`recursion`]). The second wing studies the
//! thresholding greedy algorithm over model sequence spaces ([`spaces`],
//! [`tga`]) and produces witness-backed lower bounds for the associated
//! greedy-type constants — unconditionality, democracy, quasi-/almost-/semi-
//! greediness and friends ([`constants`]).
//!
//! Every runnable capability has a worked example under `examples/`; start
//! with `cargo run --example pursuit_rate`. The `greedylab` binary wraps the
//! same machinery in reproducible, seeded experiments with JSON/CSV reports
//! ([`harness`]).
//!
//! Conventions: coordinates of a model space are numbered `1..=n`
//! ([`spaces::IndexSet`] stores 1-based indices), scalars are real, and all
//! spaces are finite-dimensional sections.

pub mod constants;
pub mod error;
pub mod harness;
pub mod numfmt;
pub mod pursuit;
pub mod recursion;
pub mod spaces;
pub mod tga;

pub use error::{Error, Result};
pub use spaces::{CoefVector, IndexSet, SignPattern, Space};
