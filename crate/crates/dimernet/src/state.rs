//! Construction of the qutrit-basis network states.
//!
//! Each node carries three levels: 0 is a vacant node (defect), 1 and 2 are
//! the two spin levels of an occupied node. A basis index encodes the per-node
//! levels base 3 with node 0 as the most significant digit.
//!
//! A dimer on an edge is the spin singlet written in the canonical node order:
//! for i < j it contributes +1/sqrt2 at levels (1_i, 2_j) and -1/sqrt2 at
//! (2_i, 1_j). Every covering term enters the superposition with coefficient
//! +1 ("canonical-order" sign convention) and the sum is normalized once.
//! Quantities that depend on interference between coverings are convention
//! sensitive; reports carry the convention tag.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{DefectPattern, LatticeGraph};
use crate::matchings;
use crate::unitary::{check_unitary, embed_vacancy};

/// Sign convention tag embedded in every report.
pub const SIGN_CONVENTION: &str = "canonical-order";

/// Provenance of a constructed state, echoed into outputs.
#[derive(Debug, Clone)]
pub struct StateMeta {
    pub lattice: String,
    pub defect_mode: String,
    pub defect_count: usize,
    pub sign_convention: &'static str,
}

/// Normalized pure state over the 3^N qutrit product basis.
#[derive(Debug, Clone)]
pub struct QutritState {
    amps: Vec<Complex64>,
    node_count: usize,
    meta: StateMeta,
}

pub(crate) fn pow3(k: usize) -> usize {
    3usize.pow(k as u32)
}

/// Level of `node` in basis index `idx` for an `n`-node state.
pub(crate) fn level_at(idx: usize, node: usize, n: usize) -> usize {
    idx / pow3(n - 1 - node) % 3
}

impl QutritState {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Fixed node order of the basis encoding (identity order).
    pub fn node_order(&self) -> Vec<usize> {
        (0..self.node_count).collect()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn meta(&self) -> &StateMeta {
        &self.meta
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// |<self|other>|, a global-phase-free fidelity between pure states.
    pub fn overlap_magnitude(&self, other: &QutritState) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }

    /// Applies (1 ⊕ u) to every node.
    pub fn apply_local_unitary(&self, u: &Matrix2<Complex64>) -> Result<QutritState> {
        check_unitary(u)?;
        let e = embed_vacancy(u);
        let n = self.node_count;
        let mut amps = self.amps.clone();
        for node in 0..n {
            let stride = pow3(n - 1 - node);
            let block = 3 * stride;
            for base in (0..amps.len()).step_by(block) {
                for off in 0..stride {
                    let i0 = base + off;
                    let (a0, a1, a2) = (amps[i0], amps[i0 + stride], amps[i0 + 2 * stride]);
                    amps[i0] = e[(0, 0)] * a0 + e[(0, 1)] * a1 + e[(0, 2)] * a2;
                    amps[i0 + stride] = e[(1, 0)] * a0 + e[(1, 1)] * a1 + e[(1, 2)] * a2;
                    amps[i0 + 2 * stride] = e[(2, 0)] * a0 + e[(2, 1)] * a1 + e[(2, 2)] * a2;
                }
            }
        }
        Ok(QutritState {
            amps,
            node_count: n,
            meta: self.meta.clone(),
        })
    }
}

/// One product-basis term of a dimer, as levels on the (lower, higher) node of
/// the canonicalized pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerTerm {
    pub level_low: usize,
    pub level_high: usize,
    pub amplitude: f64,
}

/// The two signed product-basis terms of the singlet on a node pair. The pair
/// is canonicalized to (min, max); passing it reversed yields the same state
/// up to the global sign absorbed by the convention.
pub fn dimer_amplitudes(i: usize, j: usize) -> Result<[DimerTerm; 2]> {
    if i == j {
        return Err(Error::InvalidArgument(format!(
            "a dimer needs two distinct nodes, got ({i},{i})"
        )));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    Ok([
        DimerTerm {
            level_low: 1,
            level_high: 2,
            amplitude: inv_sqrt2,
        },
        DimerTerm {
            level_low: 2,
            level_high: 1,
            amplitude: -inv_sqrt2,
        },
    ])
}

/// Equal-weight superposition of all dimer coverings compatible with the
/// defect pattern.
///
/// Fixed mode places the defects at the given nodes and sums over all
/// coverings of the rest. Symmetric mode additionally sums, with unit
/// coefficient per term, over every P-subset placement; placements admitting
/// no covering contribute nothing. The all-defect pattern (P = N) yields the
/// product of vacant nodes.
pub fn build_state(graph: &LatticeGraph, pattern: &DefectPattern) -> Result<QutritState> {
    pattern.validate(graph)?;
    let n = graph.node_count();
    let mut amps = vec![Complex64::new(0.0, 0.0); pow3(n)];
    let mut any_covering = false;

    let mut add_placement = |defects: &[usize]| -> Result<()> {
        let occupied: Vec<usize> = (0..n).filter(|v| !defects.contains(v)).collect();
        matchings::visit_coverings(graph, &occupied, &mut |pairs| {
            any_covering = true;
            accumulate_covering(&mut amps, n, pairs);
        })
    };

    match pattern {
        DefectPattern::Fixed(nodes) => add_placement(nodes)?,
        DefectPattern::Symmetric(p) => {
            for defects in Combinations::new(n, *p) {
                add_placement(&defects)?;
            }
        }
    }

    if !any_covering {
        return Err(Error::NoCovering);
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(Error::CompleteCancellation);
    }
    let inv = Complex64::new(1.0 / norm, 0.0);
    for a in &mut amps {
        *a *= inv;
    }
    Ok(QutritState {
        amps,
        node_count: n,
        meta: StateMeta {
            lattice: graph.label(),
            defect_mode: pattern.mode_name().to_string(),
            defect_count: pattern.defect_count(),
            sign_convention: SIGN_CONVENTION,
        },
    })
}

/// Expand one covering (defect nodes implicitly at level 0) into the dense
/// amplitude vector: 2^(#dimers) signed product terms.
fn accumulate_covering(amps: &mut [Complex64], n: usize, pairs: &[(usize, usize)]) {
    let mut terms: Vec<(usize, f64)> = vec![(0, 1.0)];
    for &(i, j) in pairs {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let parts = dimer_amplitudes(lo, hi).expect("covering pairs are distinct");
        let (slo, shi) = (pow3(n - 1 - lo), pow3(n - 1 - hi));
        let mut next = Vec::with_capacity(terms.len() * 2);
        for &(idx, amp) in &terms {
            for t in parts {
                next.push((
                    idx + t.level_low * slo + t.level_high * shi,
                    amp * t.amplitude,
                ));
            }
        }
        terms = next;
    }
    for (idx, amp) in terms {
        amps[idx] += Complex64::new(amp, 0.0);
    }
}

/// The defect placements a pattern sums over: the fixed node set, or every
/// P-subset in lexicographic order.
pub fn defect_placements(node_count: usize, pattern: &DefectPattern) -> Vec<Vec<usize>> {
    match pattern {
        DefectPattern::Fixed(nodes) => {
            let mut v = nodes.clone();
            v.sort_unstable();
            vec![v]
        }
        DefectPattern::Symmetric(p) => Combinations::new(node_count, *p).collect(),
    }
}

/// Lexicographic k-subsets of 0..n.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Combinations { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let k = cur.len();
        let mut next = cur.clone();
        // advance the rightmost index that can still move
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - (k - i) {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(cur)
    }
}
