//! Partial traces, exact twirling, and the invariant-family parameter fits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{level_at, pow3, QutritState};
use crate::unitary::{embed_kron_pow, embed_vacancy, haar_unitary_2, single_qubit_cliffords};

/// Largest subset a density matrix is materialized for (3^6 = 729 square).
pub const MAX_RDM_QUTRITS: usize = 6;

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive-semidefinite matrix over a node subset.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
    subset: Vec<usize>,
}

impl DensityMatrix {
    /// Validates the defining invariants. The eigenvalue (positivity) check
    /// runs for dimensions up to 81; larger matrices rely on the Gram-form
    /// construction used by `partial_trace`.
    pub fn new(matrix: DMatrix<Complex64>, subset: Vec<usize>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || dim != pow3(subset.len()) {
            return Err(Error::InvalidArgument(format!(
                "density matrix must be 3^{} square, got {}x{}",
                subset.len(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = (&matrix - matrix.adjoint()).norm();
        if herm > HERMITICITY_TOL * (dim as f64) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not Hermitian: ||rho - rho^dag|| = {herm:.3e}"
            )));
        }
        let trace: Complex64 = matrix.diagonal().iter().sum();
        if (trace.re - 1.0).abs() > TRACE_TOL * (dim as f64) || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidArgument(format!(
                "matrix trace is {trace}, expected 1"
            )));
        }
        if dim <= 81 {
            let min = hermitian_eigenvalues(&matrix)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            if min < -PSD_TOL {
                return Err(Error::InvalidArgument(format!(
                    "matrix has negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(DensityMatrix { matrix, subset })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Real eigenvalues of a Hermitian complex matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

/// Reshape the state over the cut (keep | rest): entry (r, c) is the
/// amplitude with keep-digits r and rest-digits c, both big-endian in
/// ascending node order.
pub(crate) fn cut_matrix(state: &QutritState, keep: &[usize]) -> DMatrix<Complex64> {
    let n = state.node_count();
    let rest: Vec<usize> = (0..n).filter(|v| !keep.contains(v)).collect();
    let mut a = DMatrix::zeros(pow3(keep.len()), pow3(rest.len()));
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let r = keep.iter().fold(0, |acc, &m| acc * 3 + level_at(idx, m, n));
        let c = rest.iter().fold(0, |acc, &m| acc * 3 + level_at(idx, m, n));
        a[(r, c)] += *amp;
    }
    a
}

fn checked_subset(state: &QutritState, keep: &[usize]) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument("keep set is empty".into()));
    }
    let mut subset = keep.to_vec();
    subset.sort_unstable();
    subset.dedup();
    if subset.len() != keep.len() {
        return Err(Error::InvalidArgument("keep set has duplicates".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&v| v >= state.node_count()) {
        return Err(Error::InvalidArgument(format!(
            "keep node {bad} out of range for {} nodes",
            state.node_count()
        )));
    }
    if subset.len() > MAX_RDM_QUTRITS {
        return Err(Error::MemoryBudgetExceeded {
            nodes: subset.len(),
            max: MAX_RDM_QUTRITS,
        });
    }
    Ok(subset)
}

/// Reduced density matrix over `keep`, tracing out everything else.
///
/// Independent of the order of the traced-out nodes; `keep` is sorted
/// ascending in the result's index convention.
pub fn partial_trace(state: &QutritState, keep: &[usize]) -> Result<DensityMatrix> {
    let subset = checked_subset(state, keep)?;
    let a = cut_matrix(state, &subset);
    let rho = &a * a.adjoint();
    DensityMatrix::new(rho, subset)
}

/// Max Frobenius deviation of (1 ⊕ u)^⊗x rho (1 ⊕ u)†^⊗x from rho over
/// `trials` Haar-random u.
pub fn verify_lemma(
    state: &QutritState,
    keep: &[usize],
    trials: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let rho = partial_trace(state, keep)?;
    let x = rho.subset().len();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let u = haar_unitary_2(rng);
        let g = embed_kron_pow(&u, x);
        let rotated = &g * rho.matrix() * g.adjoint();
        worst = worst.max((rotated - rho.matrix()).norm());
    }
    Ok(worst)
}

/// Exact projection of a two-node state onto the family invariant under all
/// (1 ⊕ u) ⊗ (1 ⊕ u), u in U(2).
///
/// Averages over the 24 single-qubit Cliffords, each taken with the four
/// phase representatives i^k; the embedding 1 ⊕ u is not phase covariant, so
/// the phases are needed to reproduce the full U(2) average (they annihilate
/// the blocks unbalanced in spin occupation, the Clifford 2-design handles
/// the balanced ones).
pub fn twirl(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 9 {
        return Err(Error::InvalidArgument(format!(
            "twirl needs a two-node (9x9) matrix, got dim {}",
            rho.dim()
        )));
    }
    let phases = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    let mut acc: DMatrix<Complex64> = DMatrix::zeros(9, 9);
    let mut count = 0usize;
    for c in single_qubit_cliffords() {
        for ph in phases {
            let e = embed_vacancy(&(c * ph));
            let e9 = DMatrix::from_fn(3, 3, |i, j| e[(i, j)]);
            let g = e9.kronecker(&e9);
            acc += &g * rho.matrix() * g.adjoint();
            count += 1;
        }
    }
    acc /= Complex64::new(count as f64, 0.0);
    DensityMatrix::new(acc, rho.subset().to_vec())
}

/// Parameters of the invariant single-node form diag(p1, p2/2, p2/2).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleNodeForm {
    /// Weight of the vacant level (p1).
    pub vacancy: f64,
    /// Weight of the maximally mixed spin block (p2).
    pub spin: f64,
    /// Frobenius distance to the reconstructed form.
    pub residual: f64,
}

pub fn fit_single(rho: &DensityMatrix) -> Result<SingleNodeForm> {
    if rho.dim() != 3 {
        return Err(Error::InvalidArgument(format!(
            "fit_single needs a single-node (3x3) matrix, got dim {}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    let vacancy = m[(0, 0)].re;
    let spin = m[(1, 1)].re + m[(2, 2)].re;
    let mut rec = DMatrix::zeros(3, 3);
    rec[(0, 0)] = Complex64::new(vacancy, 0.0);
    rec[(1, 1)] = Complex64::new(spin / 2.0, 0.0);
    rec[(2, 2)] = Complex64::new(spin / 2.0, 0.0);
    let residual = (m - rec).norm();
    Ok(SingleNodeForm {
        vacancy,
        spin,
        residual,
    })
}

/// Below this spin-pair weight the Werner parameter is unidentifiable.
pub const Q_UNDEFINED_THRESHOLD: f64 = 1e-12;

/// Parameters of the invariant two-node form
/// p'1 |00><00| + p'2 I'4/4 + p'3 W(q).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoNodeForm {
    /// Both nodes vacant (p'1).
    pub both_vacant: f64,
    /// One node vacant, one spin, maximally mixed (p'2).
    pub one_vacant: f64,
    /// Both nodes occupied, Werner block (p'3).
    pub spin_pair: f64,
    /// Werner parameter q in [-1/3, 1]; `None` when p'3 < 1e-12.
    pub werner_q: Option<f64>,
    /// Frobenius distance to the reconstructed form.
    pub residual: f64,
}

const BOTH_VACANT: usize = 0; // |00>
const ONE_VACANT: [usize; 4] = [1, 2, 3, 6]; // |01>, |02>, |10>, |20>
const SPIN_12: usize = 5; // |12>
const SPIN_21: usize = 7; // |21>

pub fn fit_two(rho: &DensityMatrix) -> Result<TwoNodeForm> {
    if rho.dim() != 9 {
        return Err(Error::InvalidArgument(format!(
            "fit_two needs a two-node (9x9) matrix, got dim {}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    let both_vacant = m[(BOTH_VACANT, BOTH_VACANT)].re;
    let one_vacant: f64 = ONE_VACANT.iter().map(|&i| m[(i, i)].re).sum();
    let spin_pair = 1.0 - both_vacant - one_vacant;
    let werner_q = if spin_pair < Q_UNDEFINED_THRESHOLD {
        None
    } else {
        // <psi-|rho|psi-> with psi- = (|12> - |21>)/sqrt2
        let s = 0.5
            * (m[(SPIN_12, SPIN_12)] + m[(SPIN_21, SPIN_21)]
                - m[(SPIN_12, SPIN_21)]
                - m[(SPIN_21, SPIN_12)])
                .re;
        Some((4.0 * s / spin_pair - 1.0) / 3.0)
    };
    let rec = two_node_matrix(
        both_vacant,
        one_vacant,
        spin_pair.max(0.0),
        werner_q.unwrap_or(0.0),
    );
    let residual = (m - rec).norm();
    Ok(TwoNodeForm {
        both_vacant,
        one_vacant,
        spin_pair,
        werner_q,
        residual,
    })
}

/// Dense 9x9 matrix of the invariant two-node family at the given parameters.
pub fn two_node_matrix(
    both_vacant: f64,
    one_vacant: f64,
    spin_pair: f64,
    q: f64,
) -> DMatrix<Complex64> {
    let mut m: DMatrix<Complex64> = DMatrix::zeros(9, 9);
    m[(BOTH_VACANT, BOTH_VACANT)] = Complex64::new(both_vacant, 0.0);
    for &i in &ONE_VACANT {
        m[(i, i)] = Complex64::new(one_vacant / 4.0, 0.0);
    }
    // W(q) = q |psi-><psi-| + (1-q) I4/4 on the spin-spin block
    for &i in &[4, 5, 7, 8] {
        m[(i, i)] += Complex64::new(spin_pair * (1.0 - q) / 4.0, 0.0);
    }
    let half_q = Complex64::new(spin_pair * q / 2.0, 0.0);
    m[(SPIN_12, SPIN_12)] += half_q;
    m[(SPIN_21, SPIN_21)] += half_q;
    m[(SPIN_12, SPIN_21)] -= half_q;
    m[(SPIN_21, SPIN_12)] -= half_q;
    m
}

/// The invariant family also admits a coherence between |s,0> and |0,s>
/// (equal on s = 1, 2) that the four-parameter form above lacks; constructed
/// symmetric-mode states can carry it. Returned is the mean of the two
/// matrix elements <1,0|rho|0,1> and <2,0|rho|0,2>.
pub fn exchange_coherence(rho: &DensityMatrix) -> Result<Complex64> {
    if rho.dim() != 9 {
        return Err(Error::InvalidArgument(format!(
            "exchange_coherence needs a two-node matrix, got dim {}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    Ok((m[(3, 1)] + m[(6, 2)]) / Complex64::new(2.0, 0.0))
}
