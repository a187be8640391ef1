//! Exact, heuristic and brute-force solvers.

pub mod assignment;
pub mod brute;
pub mod exact;
pub mod heuristic;
pub mod hilbert;
pub mod mono_tsp;
mod report;

pub use assignment::{optimal_assignment, Assignment};
pub use mono_tsp::{solve_mono_tsp, tour_cost, Tour, TourMode};
pub use brute::brute_force;
pub use exact::{prefers_exact, solve_bipartite_tsp_exact, solve_exact, solve_matching_exact, within_exact_caps};
pub use report::{Method, Optimality, SolveReport};
pub use heuristic::{solve_heuristic, solve_heuristic_with};

use crate::combinatorial::BipartiteInstance;
use crate::error::Result;

/// Which solver [`solve`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverMode {
    /// Exact when within the exact caps and the work budget, heuristic otherwise.
    #[default]
    Auto,
    Exact,
    Heuristic,
    Brute,
}

/// Solves `inst` with the solver selected by `mode`; size caps surface as
/// [`crate::Error::SizeCap`].
pub fn solve(inst: &BipartiteInstance, mode: SolverMode) -> Result<SolveReport> {
    match mode {
        SolverMode::Auto if prefers_exact(inst) => solve_exact(inst),
        SolverMode::Auto | SolverMode::Heuristic => solve_heuristic(inst),
        SolverMode::Exact => solve_exact(inst),
        SolverMode::Brute => brute_force(inst),
    }
}

/// Fails with [`crate::Error::SizeCap`] when `mode` cannot solve `inst`
/// because of its size, without solving it.
pub fn check_caps(inst: &BipartiteInstance, mode: SolverMode) -> Result<()> {
    match mode {
        SolverMode::Exact => exact::check_caps(inst),
        SolverMode::Brute => brute::check_brute_cap(inst),
        SolverMode::Auto | SolverMode::Heuristic => Ok(()),
    }
}
