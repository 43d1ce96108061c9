//! Cross-checks against independent brute-force oracles, plus structural
//! properties that must hold on every shipped lattice.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dimernet::{
    build_state, count_coverings, enumerate_coverings, fit_single, fit_two, partial_trace,
    verify_lemma, DefectPattern, LatticeGraph,
};

/// Every lattice with at most `max_nodes` nodes used in cross-checks.
fn oracle_graphs(max_nodes: usize) -> Vec<(String, LatticeGraph)> {
    let mut graphs = vec![
        ("chain4".into(), LatticeGraph::chain_pbc(4).unwrap()),
        ("chain6".into(), LatticeGraph::chain_pbc(6).unwrap()),
        ("chain8".into(), LatticeGraph::chain_pbc(8).unwrap()),
        ("square2x4".into(), LatticeGraph::square_pbc(2, 4).unwrap()),
        ("complete4".into(), LatticeGraph::complete(4).unwrap()),
        ("complete6".into(), LatticeGraph::complete(6).unwrap()),
        (
            "path6".into(),
            LatticeGraph::custom(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap(),
        ),
        (
            "star4".into(),
            LatticeGraph::custom(4, &[(0, 1), (0, 2), (0, 3)]).unwrap(),
        ),
        ("edgeless2".into(), LatticeGraph::custom(2, &[]).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..6 {
        let n = rng.gen_range(4..=8usize);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(0.4) {
                    edges.push((a, b));
                }
            }
        }
        graphs.push((format!("random{i}"), LatticeGraph::custom(n, &edges).unwrap()));
    }
    graphs.retain(|(_, g)| g.node_count() <= max_nodes);
    graphs
}

/// Brute force: every pairing of the occupied nodes, kept when all pairs are
/// edges. O((n-1)!!), independent of the backtracking implementation.
fn pairings_oracle(g: &LatticeGraph, occupied: &[usize]) -> Vec<Vec<(usize, usize)>> {
    fn rec(
        g: &LatticeGraph,
        remaining: Vec<usize>,
        acc: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if remaining.is_empty() {
            out.push(acc.clone());
            return;
        }
        let v = remaining[0];
        for i in 1..remaining.len() {
            let w = remaining[i];
            if !g.has_edge(v, w) {
                continue;
            }
            let rest: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&x| x != v && x != w)
                .collect();
            acc.push((v.min(w), v.max(w)));
            rec(g, rest, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    let mut nodes = occupied.to_vec();
    nodes.sort_unstable();
    rec(g, nodes, &mut Vec::new(), &mut out);
    let mut canon: Vec<Vec<(usize, usize)>> = out
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    canon.sort();
    canon.dedup();
    canon
}

#[test]
fn coverings_match_the_all_pairings_filter() {
    for (name, g) in oracle_graphs(8) {
        let all: Vec<usize> = (0..g.node_count()).collect();
        // full occupancy and one defect pair
        let mut occupations = vec![all.clone()];
        if g.node_count() >= 4 {
            occupations.push(all[2..].to_vec());
        }
        for occ in occupations {
            if occ.len() % 2 != 0 {
                continue;
            }
            let ours: Vec<Vec<(usize, usize)>> = enumerate_coverings(&g, &occ)
                .unwrap()
                .iter()
                .map(|c| c.pairs().to_vec())
                .collect();
            let oracle = pairings_oracle(&g, &occ);
            assert_eq!(
                ours, oracle,
                "{name}: coverings disagree with the pairing oracle"
            );
            assert_eq!(
                count_coverings(&g, &occ).unwrap(),
                oracle.len() as u64,
                "{name}: count disagrees"
            );
        }
    }
}

#[test]
fn known_covering_counts() {
    let counts = [
        ("chain4", LatticeGraph::chain_pbc(4).unwrap(), 2u64),
        ("chain6", LatticeGraph::chain_pbc(6).unwrap(), 2),
        ("chain8", LatticeGraph::chain_pbc(8).unwrap(), 2),
        ("square2x4", LatticeGraph::square_pbc(2, 4).unwrap(), 9),
        ("complete4", LatticeGraph::complete(4).unwrap(), 3),
        ("complete6", LatticeGraph::complete(6).unwrap(), 15),
    ];
    for (name, g, expected) in counts {
        let all: Vec<usize> = (0..g.node_count()).collect();
        assert_eq!(count_coverings(&g, &all).unwrap(), expected, "{name}");
    }
}

/// Index-looping partial trace: explicit sums over the traced digits with no
/// shared code with the library implementation.
fn partial_trace_oracle(
    amps: &[Complex64],
    n: usize,
    keep: &[usize],
) -> DMatrix<Complex64> {
    let rest: Vec<usize> = (0..n).filter(|v| !keep.contains(v)).collect();
    let dk = 3usize.pow(keep.len() as u32);
    let dr = 3usize.pow(rest.len() as u32);
    // rebuild a full basis index from per-node digits
    let compose = |digits: &[usize], nodes: &[usize]| -> usize {
        let mut idx = 0usize;
        for (d, &node) in digits.iter().zip(nodes) {
            idx += d * 3usize.pow((n - 1 - node) as u32);
        }
        idx
    };
    let digits_of = |mut x: usize, len: usize| -> Vec<usize> {
        let mut v = vec![0; len];
        for slot in (0..len).rev() {
            v[slot] = x % 3;
            x /= 3;
        }
        v
    };
    let mut rho = DMatrix::zeros(dk, dk);
    for r in 0..dk {
        for c in 0..dk {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..dr {
                let i = compose(&digits_of(r, keep.len()), keep)
                    + compose(&digits_of(t, rest.len()), &rest);
                let j = compose(&digits_of(c, keep.len()), keep)
                    + compose(&digits_of(t, rest.len()), &rest);
                acc += amps[i] * amps[j].conj();
            }
            rho[(r, c)] = acc;
        }
    }
    rho
}

#[test]
fn partial_trace_matches_the_index_looping_oracle() {
    let cases: Vec<(LatticeGraph, DefectPattern)> = vec![
        (LatticeGraph::chain_pbc(4).unwrap(), DefectPattern::Symmetric(0)),
        (LatticeGraph::chain_pbc(4).unwrap(), DefectPattern::Symmetric(2)),
        (LatticeGraph::chain_pbc(6).unwrap(), DefectPattern::Symmetric(0)),
        (LatticeGraph::chain_pbc(6).unwrap(), DefectPattern::Symmetric(2)),
        (LatticeGraph::chain_pbc(6).unwrap(), DefectPattern::Fixed(vec![0, 3])),
        (LatticeGraph::complete(4).unwrap(), DefectPattern::Symmetric(2)),
        (LatticeGraph::complete(6).unwrap(), DefectPattern::Symmetric(0)),
    ];
    for (g, p) in cases {
        let s = build_state(&g, &p).unwrap();
        let n = s.node_count();
        let keeps: Vec<Vec<usize>> = vec![
            vec![0],
            vec![n - 1],
            vec![0, 1],
            vec![0, n / 2],
            vec![0, 1, n - 1],
        ];
        for keep in keeps {
            let ours = partial_trace(&s, &keep).unwrap();
            let oracle = partial_trace_oracle(s.amplitudes(), n, &keep);
            let diff = (ours.matrix() - &oracle).norm();
            assert!(
                diff < 1e-12,
                "{} keep {keep:?}: |ours - oracle| = {diff:.3e}",
                g.label()
            );
        }
    }
}

#[test]
fn lemma_holds_on_all_shipped_lattices_in_both_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let graphs = [
        LatticeGraph::chain_pbc(4).unwrap(),
        LatticeGraph::chain_pbc(6).unwrap(),
        LatticeGraph::chain_pbc(8).unwrap(),
        LatticeGraph::square_pbc(2, 4).unwrap(),
        LatticeGraph::complete(4).unwrap(),
        LatticeGraph::complete(8).unwrap(),
    ];
    for g in graphs {
        let n = g.node_count();
        let patterns = [
            DefectPattern::Symmetric(0),
            DefectPattern::Symmetric(2),
            DefectPattern::Fixed(vec![0, 1]),
        ];
        for p in patterns {
            let s = build_state(&g, &p).unwrap();
            for keep in [vec![0], vec![0, n - 1], vec![0, 1, 2]] {
                let dev = verify_lemma(&s, &keep, 5, &mut rng).unwrap();
                assert!(
                    dev < 1e-10,
                    "{} {:?} keep {keep:?}: deviation {dev:.3e}",
                    g.label(),
                    p
                );
            }
        }
    }
}

#[test]
fn single_site_forms_are_site_independent_on_vertex_transitive_lattices() {
    let graphs = [
        LatticeGraph::chain_pbc(6).unwrap(),
        LatticeGraph::chain_pbc(8).unwrap(),
        LatticeGraph::square_pbc(2, 4).unwrap(),
        LatticeGraph::complete(6).unwrap(),
    ];
    for g in graphs {
        let n = g.node_count();
        for p in [0usize, 2] {
            let s = build_state(&g, &DefectPattern::Symmetric(p)).unwrap();
            let density = p as f64 / n as f64;
            for node in 0..n {
                let f = fit_single(&partial_trace(&s, &[node]).unwrap()).unwrap();
                assert!(
                    (f.vacancy - density).abs() < 1e-10,
                    "{} site {node}: p1 = {} vs density {density}",
                    g.label(),
                    f.vacancy
                );
                assert!((f.vacancy + f.spin - 1.0).abs() < 1e-10);
                assert!(f.residual < 1e-10);
            }
        }
    }
}

#[test]
#[allow(clippy::needless_range_loop)]
fn pair_forms_depend_only_on_distance_on_rings() {
    // rings are distance transitive, so equal ring distance must give equal
    // fitted parameters (the 2xL cylinder deliberately does not qualify)
    for l in [6usize, 8] {
        let g = LatticeGraph::chain_pbc(l).unwrap();
        let dist = g.graph_distances();
        for p in [0usize, 2] {
            let s = build_state(&g, &DefectPattern::Symmetric(p)).unwrap();
            let mut by_dist: Vec<Option<(f64, f64, Option<f64>)>> = vec![None; l];
            for a in 0..l {
                for b in a + 1..l {
                    let f = fit_two(&partial_trace(&s, &[a, b]).unwrap()).unwrap();
                    let d = dist[a][b].unwrap();
                    let key = (f.both_vacant, f.spin_pair, f.werner_q);
                    match &by_dist[d] {
                        None => by_dist[d] = Some(key),
                        Some((p1, p3, q)) => {
                            assert!((p1 - key.0).abs() < 1e-10, "chain{l} d={d}");
                            assert!((p3 - key.1).abs() < 1e-10, "chain{l} d={d}");
                            match (q, key.2) {
                                (Some(x), Some(y)) => {
                                    assert!((x - y).abs() < 1e-10, "chain{l} d={d}")
                                }
                                (None, None) => {}
                                _ => panic!("chain{l} d={d}: q definedness differs"),
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn coverings_enter_coherently_not_as_a_mixture() {
    // the 4-ring's two coverings interfere: four of the eight product terms
    // cancel pairwise, which no classical mixture reproduces
    let g = LatticeGraph::chain_pbc(4).unwrap();
    let s = build_state(&g, &DefectPattern::Symmetric(0)).unwrap();
    let nonzero = s
        .amplitudes()
        .iter()
        .filter(|a| a.norm_sqr() > 1e-28)
        .count();
    assert_eq!(nonzero, 4);
}
