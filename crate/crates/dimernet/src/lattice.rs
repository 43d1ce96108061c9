//! Lattice graphs hosting the dimer states, and defect placements on them.
//!
//! The built-in periodic kinds are vertex-transitive: every node has the same
//! degree and the graph looks the same from any site. Custom edge lists are
//! accepted for probing arbitrary topologies.

use crate::error::{Error, Result};

/// Default cap on the number of nodes (3^12 amplitudes is the largest state
/// kept exact and dense by default).
pub const DEFAULT_NODE_BUDGET: usize = 12;

/// Hard ceiling even when the budget is overridden; node sets are bitmasks.
pub const HARD_NODE_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    ChainPbc,
    SquarePbc,
    Complete,
    Custom,
}

impl LatticeKind {
    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::ChainPbc => "chain_pbc",
            LatticeKind::SquarePbc => "square_pbc",
            LatticeKind::Complete => "complete",
            LatticeKind::Custom => "custom",
        }
    }
}

/// Undirected simple graph with nodes `0..node_count`.
///
/// Edges are stored sorted with the lower index first; no self-loops, no
/// duplicates.
#[derive(Debug, Clone)]
pub struct LatticeGraph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    kind: LatticeKind,
    dims: Vec<usize>,
    coordinates: Option<Vec<Vec<i64>>>,
}

impl LatticeGraph {
    /// Periodic chain of `l` sites (a cycle graph).
    pub fn chain_pbc(l: usize) -> Result<Self> {
        Self::build(LatticeKind::ChainPbc, &[l], DEFAULT_NODE_BUDGET)
    }

    /// Periodic `rows x cols` grid. A dimension of length 2 contributes its
    /// wraparound edge merged with the direct edge (cylinder semantics).
    pub fn square_pbc(rows: usize, cols: usize) -> Result<Self> {
        Self::build(LatticeKind::SquarePbc, &[rows, cols], DEFAULT_NODE_BUDGET)
    }

    /// Complete graph on `n` nodes.
    pub fn complete(n: usize) -> Result<Self> {
        Self::build(LatticeKind::Complete, &[n], DEFAULT_NODE_BUDGET)
    }

    /// Graph from an explicit edge list.
    pub fn custom(node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::custom_with_budget(node_count, edges, DEFAULT_NODE_BUDGET)
    }

    /// Build one of the parametric kinds with an explicit node budget.
    pub fn build(kind: LatticeKind, dims: &[usize], budget: usize) -> Result<Self> {
        match kind {
            LatticeKind::ChainPbc => {
                let [l] = expect_dims::<1>(dims, "chain_pbc")?;
                check_budget(l, budget)?;
                if l < 2 {
                    return Err(Error::InvalidLattice(format!(
                        "chain_pbc length must be >= 2, got {l}"
                    )));
                }
                if l == 2 {
                    return Err(Error::InvalidLattice(
                        "chain_pbc of length 2: wraparound edge duplicates the direct edge"
                            .into(),
                    ));
                }
                let edges = (0..l).map(|i| norm_edge(i, (i + 1) % l)).collect();
                Ok(Self {
                    node_count: l,
                    edges: sorted_edges(edges),
                    kind,
                    dims: vec![l],
                    coordinates: Some((0..l).map(|i| vec![i as i64]).collect()),
                })
            }
            LatticeKind::SquarePbc => {
                let [rows, cols] = expect_dims::<2>(dims, "square_pbc")?;
                let n = rows
                    .checked_mul(cols)
                    .ok_or_else(|| Error::InvalidLattice("grid too large".into()))?;
                check_budget(n, budget)?;
                if rows < 2 || cols < 2 {
                    return Err(Error::InvalidLattice(format!(
                        "square_pbc dimensions must be >= 2, got {rows}x{cols}"
                    )));
                }
                if rows <= 2 && cols <= 2 {
                    return Err(Error::InvalidLattice(
                        "square_pbc 2x2: every wraparound edge duplicates a direct edge"
                            .into(),
                    ));
                }
                let idx = |r: usize, c: usize| r * cols + c;
                let mut edges = Vec::new();
                for r in 0..rows {
                    for c in 0..cols {
                        for (dr, dc) in [(1, 0), (0, 1)] {
                            let (r2, c2) = ((r + dr) % rows, (c + dc) % cols);
                            if (r2, c2) != (r, c) {
                                edges.push(norm_edge(idx(r, c), idx(r2, c2)));
                            }
                        }
                    }
                }
                Ok(Self {
                    node_count: n,
                    edges: sorted_edges(edges),
                    kind,
                    dims: vec![rows, cols],
                    coordinates: Some(
                        (0..n)
                            .map(|i| vec![(i / cols) as i64, (i % cols) as i64])
                            .collect(),
                    ),
                })
            }
            LatticeKind::Complete => {
                let [n] = expect_dims::<1>(dims, "complete")?;
                check_budget(n, budget)?;
                if n == 0 {
                    return Err(Error::InvalidLattice("complete graph needs >= 1 node".into()));
                }
                let edges = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .collect();
                Ok(Self {
                    node_count: n,
                    edges,
                    kind,
                    dims: vec![n],
                    coordinates: None,
                })
            }
            LatticeKind::Custom => Err(Error::InvalidLattice(
                "custom lattices take an edge list, not dims".into(),
            )),
        }
    }

    pub fn custom_with_budget(
        node_count: usize,
        edges: &[(usize, usize)],
        budget: usize,
    ) -> Result<Self> {
        check_budget(node_count, budget)?;
        let mut normed: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidLattice(format!("self-loop at node {a}")));
            }
            if a >= node_count || b >= node_count {
                return Err(Error::InvalidLattice(format!(
                    "edge ({a},{b}) out of range for {node_count} nodes"
                )));
            }
            normed.push(norm_edge(a, b));
        }
        normed.sort_unstable();
        if normed.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidLattice("duplicate edge in edge list".into()));
        }
        Ok(Self {
            node_count,
            edges: normed,
            kind: LatticeKind::Custom,
            dims: vec![],
            coordinates: None,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Edges sorted lexicographically, lower node first.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn coordinates(&self) -> Option<&[Vec<i64>]> {
        self.coordinates.as_deref()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&norm_edge(a, b)).is_ok()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == node || b == node)
            .count()
    }

    /// Neighbor bitmask per node.
    pub fn adjacency_masks(&self) -> Vec<u32> {
        let mut adj = vec![0u32; self.node_count];
        for &(a, b) in &self.edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    /// All-pairs graph distances by BFS; `None` for disconnected pairs.
    pub fn graph_distances(&self) -> Vec<Vec<Option<usize>>> {
        let adj = self.adjacency_masks();
        (0..self.node_count)
            .map(|s| {
                let mut dist = vec![None; self.node_count];
                dist[s] = Some(0);
                let mut frontier = vec![s];
                let mut d = 0;
                while !frontier.is_empty() {
                    d += 1;
                    let mut next = Vec::new();
                    for &v in &frontier {
                        let mut nb = adj[v];
                        while nb != 0 {
                            let w = nb.trailing_zeros() as usize;
                            nb &= nb - 1;
                            if dist[w].is_none() {
                                dist[w] = Some(d);
                                next.push(w);
                            }
                        }
                    }
                    frontier = next;
                }
                dist
            })
            .collect()
    }

    /// Short human-readable tag, e.g. `chain_pbc[6]`.
    pub fn label(&self) -> String {
        match self.kind {
            LatticeKind::Custom => format!(
                "custom[n={},e={}]",
                self.node_count,
                self.edges.len()
            ),
            _ => {
                let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
                format!("{}[{}]", self.kind.name(), dims.join(","))
            }
        }
    }
}

fn norm_edge(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn sorted_edges(edges: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    let mut v = edges;
    v.sort_unstable();
    v.dedup();
    v
}

fn expect_dims<const K: usize>(dims: &[usize], kind: &str) -> Result<[usize; K]> {
    dims.try_into().map_err(|_| {
        Error::InvalidLattice(format!(
            "{kind} takes {K} dimension(s), got {}",
            dims.len()
        ))
    })
}

fn check_budget(nodes: usize, budget: usize) -> Result<()> {
    let cap = budget.min(HARD_NODE_LIMIT);
    if nodes > cap {
        return Err(Error::NodeBudgetExceeded { nodes, budget: cap });
    }
    Ok(())
}

/// Which nodes are vacant, and whether the placement is pinned or summed over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DefectPattern {
    /// Defects at these specific nodes.
    Fixed(Vec<usize>),
    /// `P` defects, summed coherently over every P-subset placement.
    Symmetric(usize),
}

impl DefectPattern {
    pub fn defect_count(&self) -> usize {
        match self {
            DefectPattern::Fixed(nodes) => nodes.len(),
            DefectPattern::Symmetric(p) => *p,
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self {
            DefectPattern::Fixed(_) => "fixed",
            DefectPattern::Symmetric(_) => "symmetric",
        }
    }

    pub fn validate(&self, graph: &LatticeGraph) -> Result<()> {
        let n = graph.node_count();
        let p = self.defect_count();
        if let DefectPattern::Fixed(nodes) = self {
            let mut seen = vec![false; n];
            for &v in nodes {
                if v >= n {
                    return Err(Error::InvalidDefects(format!(
                        "defect node {v} out of range for {n} nodes"
                    )));
                }
                if seen[v] {
                    return Err(Error::InvalidDefects(format!("duplicate defect node {v}")));
                }
                seen[v] = true;
            }
        }
        if p > n {
            return Err(Error::InvalidDefects(format!(
                "{p} defects exceed {n} nodes"
            )));
        }
        if !(n - p).is_multiple_of(2) {
            return Err(Error::OddOccupiedCount { occupied: n - p });
        }
        Ok(())
    }
}

/// Fraction of vacant nodes, P/N.
pub fn defect_density(pattern: &DefectPattern, graph: &LatticeGraph) -> Result<f64> {
    pattern.validate(graph)?;
    Ok(pattern.defect_count() as f64 / graph.node_count() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain4_is_the_4_cycle() {
        let g = LatticeGraph::chain_pbc(4).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edges(), &[(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert!((0..4).all(|v| g.degree(v) == 2));
    }

    #[test]
    fn complete4_has_six_edges() {
        let g = LatticeGraph::complete(4).unwrap();
        assert_eq!(g.edges().len(), 6);
        assert!((0..4).all(|v| g.degree(v) == 3));
    }

    #[test]
    fn degenerate_pbc_is_rejected() {
        assert!(matches!(
            LatticeGraph::chain_pbc(2),
            Err(Error::InvalidLattice(_))
        ));
        assert!(matches!(
            LatticeGraph::square_pbc(2, 2),
            Err(Error::InvalidLattice(_))
        ));
    }

    #[test]
    fn two_by_four_builds_as_cylinder() {
        let g = LatticeGraph::square_pbc(2, 4).unwrap();
        assert_eq!(g.node_count(), 8);
        // 8 in-ring edges + 4 merged rungs
        assert_eq!(g.edges().len(), 12);
        assert!((0..8).all(|v| g.degree(v) == 3));
    }

    #[test]
    fn square3x3_has_uniform_degree_four() {
        let g = LatticeGraph::square_pbc(3, 3).unwrap();
        assert!((0..9).all(|v| g.degree(v) == 4));
        assert_eq!(g.edges().len(), 2 * 9);
    }

    #[test]
    fn node_budget_is_enforced() {
        assert!(matches!(
            LatticeGraph::chain_pbc(13),
            Err(Error::NodeBudgetExceeded { nodes: 13, budget: 12 })
        ));
        assert!(LatticeGraph::build(LatticeKind::ChainPbc, &[14], 14).is_ok());
        // hard ceiling survives any budget override
        assert!(LatticeGraph::build(LatticeKind::ChainPbc, &[17], 99).is_err());
    }

    #[test]
    fn custom_rejects_self_loops_and_duplicates() {
        assert!(LatticeGraph::custom(3, &[(0, 0)]).is_err());
        assert!(LatticeGraph::custom(3, &[(0, 1), (1, 0)]).is_err());
        assert!(LatticeGraph::custom(3, &[(0, 1), (5, 1)]).is_err());
        let g = LatticeGraph::custom(3, &[(2, 1), (0, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn defect_density_examples() {
        let g = LatticeGraph::chain_pbc(8).unwrap();
        assert_eq!(defect_density(&DefectPattern::Symmetric(0), &g).unwrap(), 0.0);
        assert_eq!(defect_density(&DefectPattern::Symmetric(8), &g).unwrap(), 1.0);
        assert_eq!(defect_density(&DefectPattern::Symmetric(2), &g).unwrap(), 0.25);
    }

    #[test]
    fn odd_occupied_count_is_rejected() {
        let g = LatticeGraph::chain_pbc(6).unwrap();
        assert!(matches!(
            DefectPattern::Symmetric(1).validate(&g),
            Err(Error::OddOccupiedCount { occupied: 5 })
        ));
        assert!(DefectPattern::Fixed(vec![0, 3]).validate(&g).is_ok());
    }

    #[test]
    fn built_in_kinds_have_uniform_degree_at_every_size_in_budget() {
        for l in 3..=DEFAULT_NODE_BUDGET {
            let g = LatticeGraph::chain_pbc(l).unwrap();
            assert!((0..l).all(|v| g.degree(v) == 2), "chain {l}");
        }
        for rows in 2..=4usize {
            for cols in 2..=6usize {
                if rows * cols > DEFAULT_NODE_BUDGET || (rows <= 2 && cols <= 2) {
                    continue;
                }
                let g = LatticeGraph::square_pbc(rows, cols).unwrap();
                let d0 = g.degree(0);
                assert!(
                    (0..rows * cols).all(|v| g.degree(v) == d0),
                    "square {rows}x{cols}"
                );
            }
        }
        for n in 1..=DEFAULT_NODE_BUDGET {
            let g = LatticeGraph::complete(n).unwrap();
            assert!((0..n).all(|v| g.degree(v) == n - 1), "complete {n}");
        }
    }

    #[test]
    fn distances_on_the_6_cycle() {
        let g = LatticeGraph::chain_pbc(6).unwrap();
        let d = g.graph_distances();
        assert_eq!(d[0][3], Some(3));
        assert_eq!(d[0][5], Some(1));
        let far = LatticeGraph::custom(3, &[(0, 1)]).unwrap();
        assert_eq!(far.graph_distances()[0][2], None);
    }
}
