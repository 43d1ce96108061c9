//! Enumeration of dimer coverings (perfect matchings) of the occupied subgraph.
//!
//! Backtracking over bitmasks: the lowest-index uncovered node is always
//! matched against each of its uncovered neighbors in ascending order, so each
//! covering is produced exactly once and the output order is lexicographic by
//! sorted pair list.

use crate::error::{Error, Result};
use crate::lattice::LatticeGraph;

/// A set of disjoint dimers covering a node subset exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimerCovering {
    pairs: Vec<(usize, usize)>,
}

impl DimerCovering {
    /// Dimer pairs, each with the lower node first, sorted by first node.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Union of all pairs.
    pub fn covered(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        v.sort_unstable();
        v
    }
}

/// Every perfect matching of the subgraph induced on `occupied`.
///
/// An empty occupied set yields the single empty covering; an occupied set
/// admitting no matching yields an empty list (distinct from an error).
pub fn enumerate_coverings(
    graph: &LatticeGraph,
    occupied: &[usize],
) -> Result<Vec<DimerCovering>> {
    let mut out = Vec::new();
    visit_coverings(graph, occupied, &mut |pairs| {
        out.push(DimerCovering {
            pairs: pairs.to_vec(),
        })
    })?;
    Ok(out)
}

/// Number of perfect matchings, without materializing them.
pub fn count_coverings(graph: &LatticeGraph, occupied: &[usize]) -> Result<u64> {
    let mut n = 0u64;
    visit_coverings(graph, occupied, &mut |_| n += 1)?;
    Ok(n)
}

/// Shared backtracking core; calls `visit` once per covering.
pub(crate) fn visit_coverings(
    graph: &LatticeGraph,
    occupied: &[usize],
    visit: &mut impl FnMut(&[(usize, usize)]),
) -> Result<()> {
    let mask = occupied_mask(graph, occupied)?;
    let adj = graph.adjacency_masks();
    let mut pairs = Vec::with_capacity(occupied.len() / 2);
    recurse(&adj, mask, &mut pairs, visit);
    Ok(())
}

fn occupied_mask(graph: &LatticeGraph, occupied: &[usize]) -> Result<u32> {
    let n = graph.node_count();
    let mut mask = 0u32;
    for &v in occupied {
        if v >= n {
            return Err(Error::InvalidArgument(format!(
                "occupied node {v} out of range for {n} nodes"
            )));
        }
        if mask & (1 << v) != 0 {
            return Err(Error::InvalidArgument(format!("duplicate occupied node {v}")));
        }
        mask |= 1 << v;
    }
    if !occupied.len().is_multiple_of(2) {
        return Err(Error::OddOccupiedCount {
            occupied: occupied.len(),
        });
    }
    Ok(mask)
}

fn recurse(
    adj: &[u32],
    remaining: u32,
    pairs: &mut Vec<(usize, usize)>,
    visit: &mut impl FnMut(&[(usize, usize)]),
) {
    if remaining == 0 {
        visit(pairs);
        return;
    }
    let v = remaining.trailing_zeros() as usize;
    let mut partners = adj[v] & remaining;
    while partners != 0 {
        let w = partners.trailing_zeros() as usize;
        partners &= partners - 1;
        pairs.push((v, w));
        recurse(adj, remaining & !(1 << v) & !(1 << w), pairs, visit);
        pairs.pop();
    }
}
