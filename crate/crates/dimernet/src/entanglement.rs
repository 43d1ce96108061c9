//! PPT tests, logarithmic negativity, entropies, strong subadditivity, and
//! the exhaustive genuine-multipartite-entanglement certificate.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rdm::{cut_matrix, hermitian_eigenvalues, DensityMatrix};
use crate::state::QutritState;

/// Eigenvalues below this are treated as exact zeros in entropies.
const ENTROPY_EIGENVALUE_FLOOR: f64 = 1e-14;

/// Default mixedness threshold for the GME certificate.
pub const GME_MIXEDNESS_TOL: f64 = 1e-8;

/// Partial transpose over the second node of a two-node matrix. Trace and
/// Hermiticity are preserved; both are asserted.
pub fn partial_transpose_second(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    assert_eq!(m.nrows(), 9);
    let pt = DMatrix::from_fn(9, 9, |i, j| {
        let (a, b) = (i / 3, i % 3);
        let (a2, b2) = (j / 3, j % 3);
        m[(3 * a + b2, 3 * a2 + b)]
    });
    let dtrace: Complex64 = (pt.diagonal() - m.diagonal()).iter().sum();
    assert!(dtrace.norm() < 1e-12, "partial transpose changed the trace");
    assert!(
        (&pt - pt.adjoint()).norm() < 1e-10,
        "partial transpose broke Hermiticity"
    );
    pt
}

/// Negative-partial-transpose test: `(is_npt, min PT eigenvalue)`.
pub fn ppt_check(rho: &DensityMatrix) -> Result<(bool, f64)> {
    let pt = transpose_of_pair(rho)?;
    let min = hermitian_eigenvalues(&pt)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok((min < -1e-12, min))
}

/// log2 of the trace norm of the partial transpose; 0 for PPT states.
pub fn log_negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = transpose_of_pair(rho)?;
    let trace_norm: f64 = hermitian_eigenvalues(&pt).iter().map(|l| l.abs()).sum();
    let e = trace_norm.log2();
    debug_assert!(e >= -1e-12, "trace norm below 1: {trace_norm}");
    // eigenvalue noise on PPT states lands within 1e-12 of zero; snap it
    Ok(if e < 1e-12 { 0.0 } else { e })
}

fn transpose_of_pair(rho: &DensityMatrix) -> Result<DMatrix<Complex64>> {
    if rho.dim() != 9 {
        return Err(Error::InvalidArgument(format!(
            "partial transpose needs a two-node matrix, got dim {}",
            rho.dim()
        )));
    }
    Ok(partial_transpose_second(rho.matrix()))
}

/// Von Neumann entropy -sum lambda log2 lambda.
pub fn entropy(rho: &DensityMatrix) -> f64 {
    hermitian_eigenvalues(rho.matrix())
        .into_iter()
        .filter(|&l| l > ENTROPY_EIGENVALUE_FLOOR)
        .map(|l| -l * l.log2())
        .sum()
}

/// Entropy of a subset of a pure state, via the singular values of the
/// amplitude matrix reshaped over the cut. Equal to entropy(partial_trace)
/// but never materializes the density matrix; an empty subset has entropy 0.
pub fn subsystem_entropy(state: &QutritState, subset: &[usize]) -> Result<f64> {
    let nodes = checked_disjoint(state, &[subset])?;
    let a = cut_matrix(state, &nodes);
    Ok(a
        .svd(false, false)
        .singular_values
        .iter()
        .map(|s| s * s)
        .filter(|&l| l > ENTROPY_EIGENVALUE_FLOOR)
        .map(|l| -l * l.log2())
        .sum())
}

/// Strong-subadditivity slack S(ab) + S(bc) - S(b) - S(abc), which is
/// non-negative for every state; `b` may be empty (plain subadditivity).
pub fn ssa_check(
    state: &QutritState,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<f64> {
    checked_disjoint(state, &[a, b, c])?;
    let join = |xs: &[&[usize]]| -> Vec<usize> {
        let mut v: Vec<usize> = xs.iter().flat_map(|s| s.iter().copied()).collect();
        v.sort_unstable();
        v
    };
    let s_ab = subsystem_entropy(state, &join(&[a, b]))?;
    let s_bc = subsystem_entropy(state, &join(&[b, c]))?;
    let s_b = subsystem_entropy(state, b)?;
    let s_abc = subsystem_entropy(state, &join(&[a, b, c]))?;
    Ok(s_ab + s_bc - s_b - s_abc)
}

/// Validates node ranges and mutual disjointness; returns the sorted union.
fn checked_disjoint(state: &QutritState, sets: &[&[usize]]) -> Result<Vec<usize>> {
    let n = state.node_count();
    let mut seen = vec![false; n];
    let mut union = Vec::new();
    for set in sets {
        for &v in *set {
            if v >= n {
                return Err(Error::InvalidArgument(format!(
                    "node {v} out of range for {n} nodes"
                )));
            }
            if seen[v] {
                return Err(Error::InvalidArgument(format!(
                    "node {v} appears in more than one subset"
                )));
            }
            seen[v] = true;
            union.push(v);
        }
    }
    union.sort_unstable();
    Ok(union)
}

/// `trials` random disjoint triples with the given RNG; returns the minimum
/// SSA slack observed. Subset sizes are 1..=2 for a and c, 0..=2 for b.
pub fn ssa_sweep(state: &QutritState, trials: usize, rng: &mut impl Rng) -> Result<f64> {
    let n = state.node_count();
    if n < 4 {
        return Err(Error::InvalidArgument("need at least 4 nodes".into()));
    }
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
        let mut nodes: Vec<usize> = (0..n).collect();
        // Fisher-Yates with the seeded RNG
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            nodes.swap(i, j);
        }
        let sa = rng.gen_range(1..=2usize);
        let sb = rng.gen_range(0..=2usize);
        let sc = rng.gen_range(1..=2usize);
        if sa + sb + sc > n {
            continue;
        }
        let a = sorted(&nodes[..sa]);
        let b = sorted(&nodes[sa..sa + sb]);
        let c = sorted(&nodes[sa + sb..sa + sb + sc]);
        worst = worst.min(ssa_check(state, &a, &b, &c)?);
    }
    Ok(worst)
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

/// Result of the exhaustive bipartition-mixedness scan.
#[derive(Debug, Clone, Serialize)]
pub struct GmeReport {
    pub bipartitions_checked: usize,
    /// 1 - max purity over all bipartitions.
    pub min_mixedness: f64,
    /// True iff every bipartition purity is at most 1 - tolerance.
    pub certified: bool,
    /// Side (containing node 0) of the bipartition attaining max purity.
    pub witness_partition: Vec<usize>,
}

/// Tr(rho^2) of one side of a bipartition, via the Gram matrix of the
/// amplitude matrix reshaped over the cut; the smaller side is used.
pub fn bipartition_purity(state: &QutritState, side: &[usize]) -> Result<f64> {
    let n = state.node_count();
    let nodes = checked_disjoint(state, &[side])?;
    if nodes.is_empty() || nodes.len() == n {
        return Err(Error::InvalidArgument(
            "bipartition side must be a nonempty proper subset".into(),
        ));
    }
    let keep: Vec<usize> = if nodes.len() * 2 <= n {
        nodes
    } else {
        (0..n).filter(|v| !nodes.contains(v)).collect()
    };
    let a = cut_matrix(state, &keep);
    let g = &a * a.adjoint();
    Ok(g.iter().map(|c| c.norm_sqr()).sum())
}

/// Purity of every bipartition, keyed by the side containing node 0, in
/// increasing bitmask order (2^(N-1) - 1 entries).
pub fn bipartition_purities(state: &QutritState) -> Result<Vec<(Vec<usize>, f64)>> {
    let n = state.node_count();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 nodes".into()));
    }
    let masks: Vec<u32> = (1u32..(1 << n) - 1).filter(|m| m & 1 == 1).collect();
    let purities: Vec<f64> = masks
        .par_iter()
        .map(|&mask| {
            let side: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
            bipartition_purity(state, &side).expect("valid side by construction")
        })
        .collect();
    Ok(masks
        .into_iter()
        .zip(purities)
        .map(|(mask, p)| {
            let side: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
            (side, p)
        })
        .collect())
}

/// Exhaustive GME certificate: a pure state is genuinely multipartite
/// entangled iff every bipartition is mixed. The all-defect product state
/// reports purity 1 everywhere and certified = false.
pub fn certify_gme(state: &QutritState, tolerance: f64) -> Result<GmeReport> {
    let scan = bipartition_purities(state)?;
    let mut max_purity = f64::NEG_INFINITY;
    let mut witness = Vec::new();
    for (side, purity) in &scan {
        if *purity > max_purity {
            max_purity = *purity;
            witness = side.clone();
        }
    }
    let min_mixedness = 1.0 - max_purity;
    Ok(GmeReport {
        bipartitions_checked: scan.len(),
        min_mixedness,
        certified: min_mixedness > tolerance,
        witness_partition: witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{DefectPattern, LatticeGraph};
    use crate::rdm::{fit_two, partial_trace, twirl, two_node_matrix};
    use crate::state::build_state;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chain(l: usize, p: usize) -> QutritState {
        let g = LatticeGraph::chain_pbc(l).unwrap();
        build_state(&g, &DefectPattern::Symmetric(p)).unwrap()
    }

    fn density(m: DMatrix<Complex64>) -> DensityMatrix {
        DensityMatrix::new(m, vec![0, 1]).unwrap()
    }

    #[test]
    fn singlet_has_one_ebit() {
        let rho = density(two_node_matrix(0.0, 0.0, 1.0, 1.0));
        assert_relative_eq!(log_negativity(&rho).unwrap(), 1.0, epsilon = 1e-12);
        let (npt, min) = ppt_check(&rho).unwrap();
        assert!(npt);
        assert_relative_eq!(min, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn ppt_threshold_sits_at_one_third() {
        let at = |q: f64| ppt_check(&density(two_node_matrix(0.0, 0.0, 1.0, q))).unwrap();
        assert!(!at(1.0 / 3.0).0, "exactly at threshold: PPT");
        assert!(!at(1.0 / 3.0 - 1e-9).0);
        let (npt, min) = at(0.5);
        assert!(npt);
        assert_relative_eq!(min, -1.0 / 8.0, epsilon = 1e-12);
    }

    #[test]
    fn negativity_matches_the_closed_form() {
        // log2(1 + p3 * max(0, 3q - 1) / 2) against the eigenvalue route
        for (p1, p2, p3) in [(0.0, 0.0, 1.0), (0.1, 0.4, 0.5), (0.3, 0.3, 0.4)] {
            for q in [-0.3, 0.0, 1.0 / 3.0, 0.4, 0.7, 1.0] {
                let rho = density(two_node_matrix(p1, p2, p3, q));
                let expected = (1.0 + p3 * (3.0 * q - 1.0).max(0.0) / 2.0).log2();
                assert_relative_eq!(
                    log_negativity(&rho).unwrap(),
                    expected,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn separable_block_has_zero_negativity() {
        let rho = density(two_node_matrix(0.2, 0.5, 0.3, 0.2));
        assert_eq!(log_negativity(&rho).unwrap(), 0.0);
        assert!(!ppt_check(&rho).unwrap().0);
    }

    #[test]
    fn all_defect_pair_is_ppt() {
        let s = chain(4, 4);
        let rho = partial_trace(&s, &[0, 1]).unwrap();
        assert!(!ppt_check(&rho).unwrap().0);
        assert_eq!(log_negativity(&rho).unwrap(), 0.0);
    }

    #[test]
    fn entropy_examples() {
        let pure = density(two_node_matrix(1.0, 0.0, 0.0, 0.0));
        assert!(entropy(&pure).abs() < 1e-12);

        let s = chain(6, 0);
        let site = partial_trace(&s, &[0]).unwrap();
        assert_relative_eq!(entropy(&site), 1.0, epsilon = 1e-12);

        let defected = chain(6, 2);
        let site = partial_trace(&defected, &[0]).unwrap();
        // spectrum (1/3, 1/3, 1/3)
        assert_relative_eq!(entropy(&site), 3f64.log2(), epsilon = 1e-12);
    }

    #[test]
    fn entropy_never_drops_under_twirling() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let g = DMatrix::from_fn(9, 9, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let mut m = &g * g.adjoint();
            let tr: Complex64 = m.diagonal().iter().sum();
            m /= tr;
            let rho = density(m);
            assert!(entropy(&twirl(&rho).unwrap()) >= entropy(&rho) - 1e-10);
        }
    }

    #[test]
    fn subsystem_entropy_agrees_with_the_density_matrix_route() {
        let s = chain(6, 2);
        for subset in [vec![0], vec![0, 1], vec![1, 3, 5]] {
            let via_svd = subsystem_entropy(&s, &subset).unwrap();
            let via_rho = entropy(&partial_trace(&s, &subset).unwrap());
            assert_relative_eq!(via_svd, via_rho, epsilon = 1e-10);
        }
        assert_eq!(subsystem_entropy(&s, &[]).unwrap(), 0.0);
    }

    #[test]
    fn ssa_on_products_and_empty_middle() {
        let s = chain(8, 2);
        // b empty reduces to subadditivity
        let slack = ssa_check(&s, &[0, 1], &[], &[4, 5]).unwrap();
        assert!(slack >= -1e-9, "subadditivity slack {slack:.3e}");
        let slack = ssa_check(&s, &[0], &[2, 3], &[5]).unwrap();
        assert!(slack >= -1e-9, "ssa slack {slack:.3e}");
        assert!(ssa_check(&s, &[0], &[0], &[1]).is_err(), "overlap rejected");
    }

    #[test]
    fn ssa_sweep_is_nonnegative_and_seeded() {
        let s = chain(8, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let worst = ssa_sweep(&s, 50, &mut rng).unwrap();
        assert!(worst >= -1e-9, "worst slack {worst:.3e}");
        let mut rng2 = ChaCha8Rng::seed_from_u64(123);
        assert_eq!(worst, ssa_sweep(&s, 50, &mut rng2).unwrap());
    }

    #[test]
    fn purity_scan_agrees_with_the_density_matrix_route() {
        let s = chain(6, 2);
        let direct = partial_trace(&s, &[0, 2]).unwrap().purity();
        let via_cut = bipartition_purity(&s, &[0, 2]).unwrap();
        assert_relative_eq!(direct, via_cut, epsilon = 1e-12);
        // complement side gives the same purity for a pure total state
        let compl = bipartition_purity(&s, &[1, 3, 4, 5]).unwrap();
        assert_relative_eq!(via_cut, compl, epsilon = 1e-12);
    }

    #[test]
    fn gme_certificate_on_chains() {
        let report = certify_gme(&chain(6, 0), GME_MIXEDNESS_TOL).unwrap();
        assert!(report.certified);
        assert_eq!(report.bipartitions_checked, 31);

        let report = certify_gme(&chain(6, 2), GME_MIXEDNESS_TOL).unwrap();
        assert!(report.certified);
    }

    #[test]
    fn all_defect_state_fails_certification_with_unit_purities() {
        let s = chain(6, 6);
        let report = certify_gme(&s, GME_MIXEDNESS_TOL).unwrap();
        assert!(!report.certified);
        assert!(report.min_mixedness.abs() < 1e-12);
        for (_, p) in bipartition_purities(&s).unwrap() {
            assert_relative_eq!(p, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn chain4_defect_free_factorizes_into_crossed_singlets() {
        // Under the canonical-order convention the equal-weight sum of the
        // 4-cycle's two coverings is exactly singlet(0,2) x singlet(1,3):
        // the antipodal bipartition is pure and certification honestly fails.
        let s = chain(4, 0);
        let report = certify_gme(&s, GME_MIXEDNESS_TOL).unwrap();
        assert!(!report.certified);
        assert_eq!(report.witness_partition, vec![0, 2]);
        assert_relative_eq!(
            bipartition_purity(&s, &[0, 2]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let f = fit_two(&partial_trace(&s, &[0, 2]).unwrap()).unwrap();
        assert_relative_eq!(f.werner_q.unwrap(), 1.0, epsilon = 1e-12);
    }
}
