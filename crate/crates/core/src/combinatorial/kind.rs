use core::fmt;

use crate::error::{invalid, Result};

/// The combinatorial optimisation problems on the complete bipartite graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    /// Perfect matching.
    Matching,
    /// Hamiltonian cycle alternating between the two sides.
    BipartiteTsp,
    /// Connected `k`-regular spanning subgraph, `k >= 2`.
    ConnectedKFactor(usize),
    /// `k`-regular spanning subgraph, `k >= 1`.
    KFactor(usize),
    /// Spanning tree with maximum degree at most `k`, `k >= 2`.
    KBoundedMst(usize),
}

impl ProblemKind {
    pub fn validate(self) -> Result<Self> {
        match self {
            ProblemKind::ConnectedKFactor(k) if k < 2 => Err(invalid("kappa", "connected k-factor needs k >= 2")),
            ProblemKind::KFactor(k) if k < 1 => Err(invalid("kappa", "k-factor needs k >= 1")),
            ProblemKind::KBoundedMst(k) if k < 2 => Err(invalid("kappa", "degree-bounded tree needs k >= 2")),
            other => Ok(other),
        }
    }

    /// Smallest side size on which a feasible solution exists.
    pub fn min_size(self) -> usize {
        match self {
            ProblemKind::Matching | ProblemKind::KBoundedMst(_) => 1,
            ProblemKind::BipartiteTsp => 2,
            ProblemKind::ConnectedKFactor(k) | ProblemKind::KFactor(k) => k,
        }
    }

    /// Uniform bound on vertex degrees in feasible solutions.
    pub fn max_degree(self) -> usize {
        match self {
            ProblemKind::Matching => 1,
            ProblemKind::BipartiteTsp => 2,
            ProblemKind::ConnectedKFactor(k) | ProblemKind::KFactor(k) | ProblemKind::KBoundedMst(k) => k,
        }
    }

    /// Number of extra edges the gluing operation may add beyond the swap.
    pub fn glue_extra_edges(self) -> usize {
        match self {
            ProblemKind::KBoundedMst(_) => 1,
            _ => 0,
        }
    }

    pub fn degree(self) -> Option<usize> {
        match self {
            ProblemKind::ConnectedKFactor(k) | ProblemKind::KFactor(k) | ProblemKind::KBoundedMst(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemKind::Matching => write!(f, "matching"),
            ProblemKind::BipartiteTsp => write!(f, "tsp"),
            ProblemKind::ConnectedKFactor(k) => write!(f, "connected-kfactor:{k}"),
            ProblemKind::KFactor(k) => write!(f, "kfactor:{k}"),
            ProblemKind::KBoundedMst(k) => write!(f, "kmst:{k}"),
        }
    }
}

impl core::str::FromStr for ProblemKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let kappa = || -> Result<usize> {
            arg.ok_or_else(|| invalid("problem", "missing degree, e.g. kfactor:3"))?
                .parse()
                .map_err(|_| invalid("problem", "degree must be a positive integer"))
        };
        let kind = match name {
            "matching" => ProblemKind::Matching,
            "tsp" => ProblemKind::BipartiteTsp,
            "connected-kfactor" => ProblemKind::ConnectedKFactor(kappa()?),
            "kfactor" => ProblemKind::KFactor(kappa()?),
            "kmst" => ProblemKind::KBoundedMst(kappa()?),
            _ => return Err(invalid("problem", "expected matching, tsp, kfactor:K, connected-kfactor:K or kmst:K")),
        };
        if arg.is_some() && kind.degree().is_none() {
            return Err(invalid("problem", "this problem takes no degree"));
        }
        kind.validate()
    }
}
