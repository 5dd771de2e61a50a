//! Approximation algorithms for Maximum Duo-Preservation String Mapping and
//! its graph form, Maximum Consecutive Bipartite Matching.
//!
//! A string pair becomes a [`DuoGraph`]; solvers return a consecutive
//! matching whose size is the number of preserved duos. The solvers are
//! greedy streak selection followed by one of three second phases, giving
//! guarantees 4, 3, 8/3 and 2 + ε (see [`pipeline`]). [`exact`] holds a
//! branch-and-bound optimum for small instances.

pub mod bench;
pub mod bounded;
pub mod error;
pub mod exact;
pub mod graph;
pub mod greedy;
pub mod io;
pub mod local_search;
pub mod matching;
pub mod pipeline;

pub use error::{Error, Result};
pub use graph::{compatible, decompose_streaks, edges_overlap, is_valid, ConsecutiveMatching, DuoGraph, Edge, Node, Streak};
pub use pipeline::{approx267, approx3, approx4, approx_eps, Guarantee, PipelineReport, Solver, SolverConfig, SolverRegistry};
