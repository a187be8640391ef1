//! Problem kinds, solutions, feasibility and the gluing operations.

mod tour_factor;
mod feasibility;
mod glue;
mod kind;
mod solution;
mod union_find;

pub use tour_factor::{tour_factor_construct, tour_factor_edges, tour_edges};
pub use feasibility::{is_feasible, violations, Side, Violation};
pub use glue::{glue, Glued};
pub use kind::ProblemKind;
pub use solution::{cost, BipartiteInstance, Solution};
pub(crate) use solution::check_exponent;
pub use union_find::UnionFind;
