//! Telecloning-derived ceilings on the two-node Werner parameter and the
//! bipartite-entanglement curves built from them.
//!
//! Remote preparation of M copies of an unknown qutrit through M equal
//! two-node channel states cannot beat the optimal-cloning fidelity, so the
//! teleportation fidelity implied by the channel's singlet fraction bounds
//! the Werner parameter q from above. The shipped `q_upper_bound` evaluates
//!
//!   q <= (1/3)(2/p'3 - 1) - (2/(3 p'3))(p'1 - 1/M),
//!
//! clamped to the physical Werner range [-1/3, 1].

use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rdm::{fit_two, partial_trace, two_node_matrix, DensityMatrix, TwoNodeForm};
use crate::state::QutritState;

/// Number of remote copies; the infinite limit is exact, not a large integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Copies {
    Finite(u64),
    Infinite,
}

impl Copies {
    /// 1/M, with the infinite limit mapped to 0.
    pub fn inverse(self) -> f64 {
        match self {
            Copies::Finite(m) => 1.0 / m as f64,
            Copies::Infinite => 0.0,
        }
    }
}

impl PartialOrd for Copies {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Copies {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Copies::Finite(a), Copies::Finite(b)) => a.cmp(b),
            (Copies::Finite(_), Copies::Infinite) => std::cmp::Ordering::Less,
            (Copies::Infinite, Copies::Finite(_)) => std::cmp::Ordering::Greater,
            (Copies::Infinite, Copies::Infinite) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for Copies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Copies::Finite(m) => write!(f, "{m}"),
            Copies::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Copies {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Copies::Infinite),
            t => t
                .parse::<u64>()
                .ok()
                .filter(|&m| m >= 1)
                .map(Copies::Finite)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("copy count must be a positive integer or 'inf', got '{s}'"))
                }),
        }
    }
}

impl Serialize for Copies {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Identity-protocol lower bound on the maximal singlet fraction:
/// F' = p'1/3 + (p'3/3)(3q + 1)/2, the overlap of the two-node form with the
/// maximally entangled qutrit state (|12> - |21> + |00>)/sqrt3.
pub fn singlet_fraction_lower(form: &TwoNodeForm) -> f64 {
    let werner = match form.werner_q {
        Some(q) => (form.spin_pair / 3.0) * (3.0 * q + 1.0) / 2.0,
        None => 0.0, // spin-pair weight below threshold contributes nothing
    };
    form.both_vacant / 3.0 + werner
}

/// Teleportation fidelity implied by a singlet fraction: (F d + 1)/(d + 1).
pub fn tele_fidelity_lower(f_prime: f64, d: u32) -> f64 {
    debug_assert!((0.0..=1.0 + 1e-12).contains(&f_prime));
    (f_prime * d as f64 + 1.0) / (d as f64 + 1.0)
}

/// Optimal 1 -> M cloning fidelity for d-level states:
/// (2M + d - 1)/(M(d + 1)); for qutrits this is 1/2 + 1/(2M), with limit 1/2.
pub fn clone_fidelity(copies: Copies, d: u32) -> f64 {
    let d = d as f64;
    match copies {
        Copies::Finite(m) => {
            let m = m as f64;
            (2.0 * m + d - 1.0) / (m * (d + 1.0))
        }
        Copies::Infinite => 2.0 / (d + 1.0),
    }
}

/// Ceiling on the Werner parameter from the telecloning argument, clamped to
/// the physical range [-1/3, 1]; the flag reports whether clamping applied.
pub fn q_upper_bound(both_vacant: f64, spin_pair: f64, copies: Copies) -> Result<(f64, bool)> {
    if spin_pair <= 0.0 {
        return Err(Error::InvalidArgument(
            "q bound undefined for zero spin-pair weight".into(),
        ));
    }
    if both_vacant < 0.0 || both_vacant + spin_pair > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "weights out of range: p'1 = {both_vacant}, p'3 = {spin_pair}"
        )));
    }
    let raw = (2.0 / spin_pair - 1.0) / 3.0
        - 2.0 / (3.0 * spin_pair) * (both_vacant - copies.inverse());
    let clamped = raw.clamp(-1.0 / 3.0, 1.0);
    Ok((clamped, clamped != raw))
}

/// One row of the permissible-entanglement curve family.
#[derive(Debug, Clone, Serialize)]
pub struct Fig1Row {
    pub one_minus_p3: f64,
    pub m: Copies,
    pub q_max: f64,
    pub clamped: bool,
    pub ln_max: f64,
}

/// Maximum permissible logarithmic negativity over a (M, p'3) grid at fixed
/// p'1: the negativity of the two-node form at q = q_max, computed from the
/// partial-transpose spectrum.
pub fn figure1_data(m_list: &[Copies], p3_grid: &[f64], both_vacant: f64) -> Result<Vec<Fig1Row>> {
    if m_list.is_empty() || p3_grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if !(0.0..=1.0).contains(&both_vacant) {
        return Err(Error::InvalidArgument(format!("p'1 = {both_vacant} out of [0, 1]")));
    }
    for &p3 in p3_grid {
        if !(p3 > 0.0 && p3 <= 1.0 && both_vacant + p3 <= 1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "grid point p'3 = {p3} invalid for p'1 = {both_vacant}"
            )));
        }
    }
    let mut rows = Vec::with_capacity(m_list.len() * p3_grid.len());
    for &m in m_list {
        for &p3 in p3_grid {
            let (q_max, clamped) = q_upper_bound(both_vacant, p3, m)?;
            let one_vacant = (1.0 - both_vacant - p3).max(0.0);
            let rho = DensityMatrix::new(
                two_node_matrix(both_vacant, one_vacant, p3, q_max),
                vec![0, 1],
            )?;
            let ln_max = crate::entanglement::log_negativity(&rho)?;
            rows.push(Fig1Row {
                one_minus_p3: 1.0 - p3,
                m,
                q_max,
                clamped,
                ln_max,
            });
        }
    }
    Ok(rows)
}

/// All telecloning quantities for one (p'1, p'3, M) point, evaluated at the
/// permissible ceiling q = q_max.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub both_vacant: f64,
    pub spin_pair: f64,
    pub copies: Copies,
    pub dim: u32,
    pub f_prime: f64,
    pub f_tele_lower: f64,
    pub f_clo: f64,
    pub q_max: f64,
    pub clamped: bool,
    pub ln_max: f64,
}

pub fn bound_report(both_vacant: f64, spin_pair: f64, copies: Copies) -> Result<BoundReport> {
    const D: u32 = 3;
    let (q_max, clamped) = q_upper_bound(both_vacant, spin_pair, copies)?;
    let one_vacant = (1.0 - both_vacant - spin_pair).max(0.0);
    let rho = DensityMatrix::new(
        two_node_matrix(both_vacant, one_vacant, spin_pair, q_max),
        vec![0, 1],
    )?;
    let form = fit_two(&rho)?;
    let f_prime = singlet_fraction_lower(&form);
    Ok(BoundReport {
        both_vacant,
        spin_pair,
        copies,
        dim: D,
        f_prime,
        f_tele_lower: tele_fidelity_lower(f_prime, D),
        f_clo: clone_fidelity(copies, D),
        q_max,
        clamped,
        ln_max: crate::entanglement::log_negativity(&rho)?,
    })
}

/// Companions of `node` grouped by equal two-node reduced state.
///
/// The telecloning ceiling applies to M *equal* channel states; on lattices
/// where equidistant pairs split into inequivalent orbits (the 2xL cylinder),
/// grouping by graph distance would overcount M.
#[derive(Debug, Clone)]
pub struct ChannelClass {
    pub companions: Vec<usize>,
    pub form: TwoNodeForm,
}

pub fn channel_classes(state: &QutritState, node: usize) -> Result<Vec<ChannelClass>> {
    const SAME_RDM_TOL: f64 = 1e-8;
    let n = state.node_count();
    if node >= n {
        return Err(Error::InvalidArgument(format!(
            "node {node} out of range for {n} nodes"
        )));
    }
    let mut groups: Vec<(DensityMatrix, Vec<usize>)> = Vec::new();
    for other in (0..n).filter(|&v| v != node) {
        let rho = partial_trace(state, &[node, other])?;
        // pair index order must match within a class: put `node` first by
        // comparing matrices with the companion slot aligned
        let aligned = align_pair(&rho, node < other);
        match groups
            .iter_mut()
            .find(|(rep, _)| (rep.matrix() - &aligned).norm() < SAME_RDM_TOL)
        {
            Some((_, members)) => members.push(other),
            None => groups.push((
                DensityMatrix::new(aligned, vec![node, other])?,
                vec![other],
            )),
        }
    }
    groups
        .into_iter()
        .map(|(rep, companions)| {
            Ok(ChannelClass {
                companions,
                form: fit_two(&rep)?,
            })
        })
        .collect()
}

/// Swap the two qutrit slots unless `node_first` already holds.
fn align_pair(
    rho: &DensityMatrix,
    node_first: bool,
) -> nalgebra::DMatrix<num_complex::Complex64> {
    if node_first {
        return rho.matrix().clone();
    }
    nalgebra::DMatrix::from_fn(9, 9, |i, j| {
        let (a, b) = (i / 3, i % 3);
        let (c, d) = (j / 3, j % 3);
        rho.matrix()[(3 * b + a, 3 * d + c)]
    })
}
