//! Explicit work limits. Exceeding one is reported as
//! [`Error::ResourceLimit`](crate::Error::ResourceLimit), never as a silently
//! truncated answer.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Environment variable that overrides [`Budget::nodes`].
pub const BUDGET_NODES_ENV: &str = "GROUPSHIFT_BUDGET_NODES";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Search nodes (backtracking steps, DP state updates) per operation.
    pub nodes: u64,
    /// Maximum number of group elements kept in a Cayley ball cache.
    pub ball_cap: usize,
    /// Maximum number of patterns materialized in one list.
    pub patterns: usize,
    /// Maximum number of states in a transfer matrix.
    pub states: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            nodes: 200_000_000,
            ball_cap: 2_000_000,
            patterns: 5_000_000,
            states: 1 << 16,
        }
    }
}

impl Budget {
    /// Defaults, with the node budget taken from `GROUPSHIFT_BUDGET_NODES` when set.
    pub fn from_env() -> Result<Self> {
        let mut budget = Budget::default();
        if let Ok(raw) = std::env::var(BUDGET_NODES_ENV) {
            budget.nodes = raw.trim().parse().map_err(|_| {
                Error::invalid(format!("{BUDGET_NODES_ENV}={raw} is not an integer"))
            })?;
        }
        Ok(budget)
    }

    pub fn with_nodes(mut self, nodes: u64) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn meter(&self, what: &'static str) -> Meter {
        Meter {
            used: AtomicU64::new(0),
            limit: self.nodes,
            what,
        }
    }

    pub(crate) fn check_patterns(&self, n: usize, what: &str) -> Result<()> {
        if n > self.patterns {
            return Err(Error::limit(format!(
                "{what}: {n} patterns exceed the pattern budget {}",
                self.patterns
            )));
        }
        Ok(())
    }
}

/// Shared node counter; safe to tick from worker threads.
#[derive(Debug)]
pub struct Meter {
    used: AtomicU64,
    limit: u64,
    what: &'static str,
}

impl Meter {
    #[inline]
    pub fn tick(&self, n: u64) -> Result<()> {
        let used = self.used.fetch_add(n, Ordering::Relaxed) + n;
        if used > self.limit {
            Err(Error::limit(format!(
                "{}: node budget of {} exhausted",
                self.what, self.limit
            )))
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }
}
