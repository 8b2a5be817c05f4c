//! deltasieve: exact evaluation of the weighted disjoint-triples form
//!
//! ```text
//! Delta(f, g, h) = sum over pairwise disjoint q-subsets (A, B, C)
//!                  of f(A) * g(B) * h(C)
//! ```
//!
//! over an n-element universe, together with two applications built on
//! top of it: counting t-tuples of pairwise disjoint members of a set
//! family, and counting occurrences of a small bounded-pathwidth pattern
//! graph in a host graph.
//!
//! The evaluator classifies ordered triples by the size j of the triple
//! symmetric difference A ⊕ B ⊕ C and solves a linear system for the
//! per-size totals x_j; the answer is x_{3q}. Equations come from two
//! sources: a Vandermonde family obtained by parity sieving over element
//! tuples, and direct evaluations of small-j indeterminates through
//! integer matrix products. A balance parameter gamma in [0, 1/2] decides
//! how many equations each side contributes.
//!
//! Everything is computed in exact (arbitrary-precision) integer
//! arithmetic, and every fast path has an independent brute-force oracle
//! in [`oracle`] used by the test suites and the `selftest` CLI command.

pub mod counters;
pub mod error;
pub mod firstfam;
pub mod io;
pub mod linsys;
pub mod oracle;
pub mod packing;
pub mod sdproduct;
pub mod selftest;
pub mod setcore;
pub mod subgraph;
pub mod transforms;

pub use counters::{CounterSnapshot, Counters};
pub use error::{Error, Result};
pub use setcore::{SetFunction, Subset};
