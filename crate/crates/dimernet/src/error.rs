//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid defect pattern: {0}")]
    InvalidDefects(String),

    #[error("node budget exceeded: {nodes} nodes requested, budget is {budget}")]
    NodeBudgetExceeded { nodes: usize, budget: usize },

    #[error("memory budget exceeded: density matrix over {nodes} qutrits (max {max})")]
    MemoryBudgetExceeded { nodes: usize, max: usize },

    #[error("occupied node count {occupied} is odd; dimer coverings need an even count")]
    OddOccupiedCount { occupied: usize },

    #[error("no dimer covering exists for any defect placement")]
    NoCovering,

    #[error("amplitudes of all covering terms cancelled; state is the zero vector")]
    CompleteCancellation,

    #[error("operator is not unitary within tolerance")]
    NonUnitary,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
