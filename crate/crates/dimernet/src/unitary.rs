//! Spin-space unitaries and their qutrit embedding 1 ⊕ u.

use nalgebra::{DMatrix, Matrix2, Matrix3};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Frobenius deviation of u from unitarity, ||u† u - I||_F.
pub fn unitarity_defect(u: &Matrix2<Complex64>) -> f64 {
    let d = u.adjoint() * u - Matrix2::identity();
    d.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn check_unitary(u: &Matrix2<Complex64>) -> Result<()> {
    if unitarity_defect(u) > 1e-11 {
        return Err(Error::NonUnitary);
    }
    Ok(())
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller; 1 - u keeps the log argument in (0, 1]
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng)) / 2f64.sqrt()
}

/// Haar-random U(2) element: complex Ginibre matrix orthonormalized by
/// Gram-Schmidt. The implied R factor has a real positive diagonal, which
/// makes the resulting Q exactly Haar distributed.
pub fn haar_unitary_2(rng: &mut impl Rng) -> Matrix2<Complex64> {
    let (a, c) = (complex_gaussian(rng), complex_gaussian(rng)); // first column
    let (b, d) = (complex_gaussian(rng), complex_gaussian(rng)); // second column
    let r11 = (a.norm_sqr() + c.norm_sqr()).sqrt();
    let (q1a, q1c) = (a / r11, c / r11);
    let proj = q1a.conj() * b + q1c.conj() * d;
    let (mut q2b, mut q2d) = (b - proj * q1a, d - proj * q1c);
    let r22 = (q2b.norm_sqr() + q2d.norm_sqr()).sqrt();
    q2b /= r22;
    q2d /= r22;
    Matrix2::new(q1a, q2b, q1c, q2d)
}

/// 1 ⊕ u acting on a qutrit: level 0 untouched, u on the spin levels {1, 2}.
pub fn embed_vacancy(u: &Matrix2<Complex64>) -> Matrix3<Complex64> {
    Matrix3::new(
        ONE,
        ZERO,
        ZERO,
        ZERO,
        u[(0, 0)],
        u[(0, 1)],
        ZERO,
        u[(1, 0)],
        u[(1, 1)],
    )
}

/// k-fold Kronecker power of the embedded unitary.
pub fn embed_kron_pow(u: &Matrix2<Complex64>, k: usize) -> DMatrix<Complex64> {
    let e = embed_vacancy(u);
    let base = DMatrix::from_fn(3, 3, |i, j| e[(i, j)]);
    let mut out = base.clone();
    for _ in 1..k {
        out = out.kronecker(&base);
    }
    out
}

/// The 24 single-qubit Clifford unitaries (one canonical-phase representative
/// per projective element), generated by closure over H and S.
pub fn single_qubit_cliffords() -> &'static [Matrix2<Complex64>] {
    static GROUP: OnceLock<Vec<Matrix2<Complex64>>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let s = 1.0 / 2f64.sqrt();
        let h = Matrix2::new(
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(-s, 0.0),
        );
        let sg = Matrix2::new(ONE, ZERO, ZERO, Complex64::new(0.0, 1.0));
        let mut group: Vec<Matrix2<Complex64>> = vec![Matrix2::identity()];
        let mut frontier = group.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for g in &frontier {
                for gen in [&h, &sg] {
                    let m = canonical_phase(gen * g);
                    if !group.iter().any(|k| matrix_close(k, &m)) {
                        group.push(m);
                        next.push(m);
                    }
                }
            }
            frontier = next;
        }
        assert_eq!(group.len(), 24);
        group
    })
}

fn canonical_phase(m: Matrix2<Complex64>) -> Matrix2<Complex64> {
    for &x in m.iter() {
        if x.norm() > 1e-9 {
            return m * (x.conj() / x.norm());
        }
    }
    m
}

fn matrix_close(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> bool {
    a.iter()
        .zip(b.iter())
        .all(|(x, y)| (x - y).norm() < 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_samples_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let u = haar_unitary_2(&mut rng);
            assert!(unitarity_defect(&u) < 1e-13);
        }
    }

    #[test]
    fn haar_first_moment_vanishes() {
        // E[u] = 0 over U(2); a crude check that phases are not biased
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut acc = Matrix2::<Complex64>::zeros();
        let k = 20000;
        for _ in 0..k {
            acc += haar_unitary_2(&mut rng);
        }
        acc /= Complex64::new(k as f64, 0.0);
        assert!(acc.iter().all(|c| c.norm() < 0.02), "{acc:?}");
    }

    #[test]
    fn clifford_group_closure() {
        let g = single_qubit_cliffords();
        assert_eq!(g.len(), 24);
        for u in g {
            assert!(unitarity_defect(u) < 1e-12);
        }
        // closed under multiplication modulo phase
        for a in g {
            for b in g {
                let m = canonical_phase(a * b);
                assert!(g.iter().any(|k| matrix_close(k, &m)));
            }
        }
    }

    #[test]
    fn embedding_fixes_the_vacancy_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_unitary_2(&mut rng);
        let e = embed_vacancy(&u);
        assert_eq!(e[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(e[(0, 1)], Complex64::new(0.0, 0.0));
        assert_eq!(e[(1, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(e[(1, 1)], u[(0, 0)]);
    }
}
