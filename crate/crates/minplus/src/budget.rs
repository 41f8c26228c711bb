//! Resource budgets for symbolic expansion and transform passes.

/// Caps on intermediate object sizes. Passes that would exceed a cap fail
/// with [`crate::Error::BudgetExceeded`] instead of thrashing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of monomials in any intermediate polynomial.
    pub max_terms: usize,
    /// Maximum number of nodes (or vertices + edges) in a produced model.
    pub max_nodes: usize,
    /// Maximum number of hypercube variables enumerated by brute force.
    pub max_hypercube_vars: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_terms: 100_000,
            max_nodes: 1_000_000,
            max_hypercube_vars: 20,
        }
    }
}

impl Budget {
    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub fn with_max_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }
}
