//! Exact desk-scale construction and analysis of spin-1/2 dimer-network
//! states with node defects.
//!
//! States live in the qutrit product basis {vacant, spin-up, spin-down} per
//! node and are equal-weight superpositions of dimer coverings of the
//! occupied subgraph. The crate provides:
//!
//! - lattice construction and defect placements ([`lattice`])
//! - enumeration of dimer coverings, i.e. perfect matchings ([`matchings`])
//! - dense state vectors and local-unitary invariance checks ([`state`])
//! - partial traces, exact twirling, invariant-form fits ([`rdm`])
//! - PPT/negativity/entropy/SSA and the exhaustive GME scan
//!   ([`entanglement`])
//! - telecloning ceilings on bipartite entanglement ([`bounds`])
//!
//! Everything is exact dense linear algebra; the default budget of 12 nodes
//! (3^12 amplitudes) keeps every operation interactive on a laptop.

pub mod bounds;
pub mod entanglement;
pub mod error;
pub mod lattice;
pub mod matchings;
pub mod rdm;
pub mod state;
pub mod unitary;

pub use error::{Error, Result};
pub use lattice::{defect_density, DefectPattern, LatticeGraph, LatticeKind, DEFAULT_NODE_BUDGET};
pub use matchings::{count_coverings, enumerate_coverings, DimerCovering};
pub use rdm::{
    fit_single, fit_two, partial_trace, twirl, verify_lemma, DensityMatrix, SingleNodeForm,
    TwoNodeForm,
};
pub use state::{build_state, dimer_amplitudes, QutritState, SIGN_CONVENTION};
