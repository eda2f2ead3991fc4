//! Exact and heuristic engines for the product and sum measures, exact
//! comparability tables, and small-case oracles.

mod comp;
mod exact;
mod heuristic;
mod monotone;
mod oracle;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use num_bigint::BigUint;
use thiserror::Error;

use crate::constructions::ConstructionError;
use crate::lattice::{FamilyTuple, LatticeError};

pub use comp::{exact_comp_table, CompRow, CompTable};
pub use exact::{exact_pi, exact_search, exact_sigma};
pub use heuristic::{heuristic_pi, heuristic_search, heuristic_sigma};
pub use monotone::{dual_downset, enumerate_monotone, upset_words};
pub use oracle::oracle_small;

/// Largest ground size the exact engines and tables accept.
pub const EXACT_LIMIT: u32 = 5;
/// Largest ground size for the exhaustive support oracle.
pub const ORACLE_LIMIT: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("n = {n} is beyond the limit of {limit} for this engine")]
    GroundTooLarge { n: u32, limit: u32 },
    #[error("need k >= 2 families, got {0}")]
    BadK(usize),
    #[error("budgets must be positive")]
    BadBudget,
    #[error("budget exhausted before any witness was found")]
    NoWitnessWithinBudget,
    #[error("no cross-Sperner {k}-tuple exists in P([{n}])")]
    NoFeasibleTuple { n: u32, k: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

/// The quantity being maximised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Product of family sizes, `pi(n, k)`.
    Product,
    /// Sum of family sizes, `sigma(n, k)`.
    Sum,
}

impl Objective {
    pub fn of(self, t: &FamilyTuple) -> BigUint {
        match self {
            Objective::Product => t.product(),
            Objective::Sum => BigUint::from(t.sum()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::Product => "pi",
            Objective::Sum => "sigma",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pi" | "product" => Ok(Objective::Product),
            "sigma" | "sum" => Ok(Objective::Sum),
            other => Err(format!("unknown measure `{other}` (expected pi or sigma)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exact,
    Heuristic,
}

impl FromStr for SearchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(SearchMode::Exact),
            "heuristic" => Ok(SearchMode::Heuristic),
            other => Err(format!("unknown mode `{other}` (expected exact or heuristic)")),
        }
    }
}

/// Node (or iteration) and wall-clock limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// DFS nodes for exact search; annealing steps per chain for heuristic search.
    pub nodes: u64,
    pub time: Duration,
}

impl Budget {
    pub const EXACT_DEFAULT: Budget = Budget { nodes: 20_000_000_000, time: Duration::from_secs(600) };
    pub const HEURISTIC_DEFAULT: Budget = Budget { nodes: 5_000_000, time: Duration::from_secs(300) };
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub n: u32,
    pub k: usize,
    pub objective: Objective,
    pub mode: SearchMode,
    pub budget: Budget,
    pub seed: u64,
    pub threads: usize,
    /// Heuristic chains stop once they reach this value.
    pub target: Option<BigUint>,
}

impl SearchConfig {
    pub fn new(n: u32, k: usize, objective: Objective, mode: SearchMode) -> Self {
        let budget = match mode {
            SearchMode::Exact => Budget::EXACT_DEFAULT,
            SearchMode::Heuristic => Budget::HEURISTIC_DEFAULT,
        };
        SearchConfig { n, k, objective, mode, budget, seed: 0, threads: 1, target: None }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_target(mut self, target: impl Into<BigUint>) -> Self {
        self.target = Some(target.into());
        self
    }

    pub(crate) fn validate(&self, limit: Option<u32>) -> Result<(), SearchError> {
        if self.k < 2 {
            return Err(SearchError::BadK(self.k));
        }
        if self.budget.nodes == 0 || self.budget.time.is_zero() {
            return Err(SearchError::BadBudget);
        }
        let limit = limit.unwrap_or(crate::lattice::MAX_GROUND);
        if self.n > limit {
            return Err(SearchError::GroundTooLarge { n: self.n, limit });
        }
        Ok(())
    }
}

/// Runs the engine selected by `cfg.mode`.
pub fn run(cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    match cfg.mode {
        SearchMode::Exact => exact_search(cfg),
        SearchMode::Heuristic => heuristic_search(cfg),
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub objective: Objective,
    pub value: BigUint,
    pub witness: FamilyTuple,
    /// True only when an exact search ran to completion.
    pub optimal: bool,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

impl SearchResult {
    /// Re-verifies the witness and recomputes its measure.
    pub fn verify(&self) -> Result<bool, LatticeError> {
        Ok(self.witness.is_cross_sperner()? && self.objective.of(&self.witness) == self.value)
    }
}
