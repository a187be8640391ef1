//! Random Euclidean bipartite optimisation problems.
//!
//! Points live in `R^d`, edge weights are `|x - y|^p` with `p >= 1`. The crate
//! covers domain geometry and partitions, point sampling, the combinatorial
//! problem kinds with their gluing operations, exact and heuristic solvers,
//! and discrete optimal transport.
//!
//! The crate is `no_std` (with `alloc`) unless the `std` feature is enabled.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod combinatorial;
pub mod error;
pub mod geometry;
pub mod math;
pub mod sampling;
pub mod solvers;
pub mod transport;

pub use combinatorial::{BipartiteInstance, ProblemKind, Solution};
pub use error::{Error, Result};
pub use geometry::{Domain, PointSet};
