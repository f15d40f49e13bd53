//! Takagi factorization `A = U Σ Uᵀ` of complex symmetric matrices.
//!
//! Writing `A = B + iC` with `B, C` real symmetric, the real symmetric matrix
//! `M = [[B, C], [C, -B]]` has spectrum `±σ_k`, and an eigenvector `(x; y)`
//! for `σ_k ≥ 0` gives a Takagi vector `u = x + iy` with `A ū = σ_k u`.
//! Eigenvectors for distinct positive `σ` are orthonormal as complex vectors
//! even inside degenerate clusters; the zero block is re-orthonormalized.

use super::{herm_eig, CMat, C64, HERMITIAN_TOL, ZERO};
use crate::error::{Error, Result};

/// `A = factors · diag(coefficients) · factorsᵀ`.
#[derive(Clone, Debug)]
pub struct TakagiDecomp {
    pub factors: CMat,
    pub coefficients: Vec<f64>,
}

impl TakagiDecomp {
    pub fn reconstruct(&self) -> CMat {
        let n = self.coefficients.len();
        let u = &self.factors;
        CMat::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| u[(i, k)] * u[(j, k)] * self.coefficients[k])
                .sum()
        })
    }
}

pub fn takagi(s: &CMat) -> Result<TakagiDecomp> {
    takagi_with_tol(s, HERMITIAN_TOL)
}

pub fn takagi_with_tol(s: &CMat, tol: f64) -> Result<TakagiDecomp> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Takagi factorization needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    let dev = s.symmetric_deviation();
    if dev > tol {
        return Err(Error::NotSymmetric { deviation: dev });
    }
    let n = s.rows();
    let sym = CMat::from_fn(n, n, |i, j| (s[(i, j)] + s[(j, i)]) * 0.5);

    let m = CMat::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, ri) = (i / n, i % n);
        let (bj, rj) = (j / n, j % n);
        let z = sym[(ri, rj)];
        let v = match (bi, bj) {
            (0, 0) => z.re,
            (1, 1) => -z.re,
            _ => z.im,
        };
        C64::new(v, 0.0)
    });
    let eig = herm_eig(&m)?;
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let zero_tol = 1e-9 * scale.max(1e-300);

    let mut factors = CMat::zeros(n, n);
    let mut coefficients = Vec::with_capacity(n);
    let mut count = 0;
    // strictly positive part of the spectrum, already descending
    for k in 0..2 * n {
        if count == n || eig.eigenvalues[k] <= zero_tol {
            break;
        }
        let u: Vec<C64> = (0..n)
            .map(|i| C64::new(eig.eigenvectors[(i, k)].re, eig.eigenvectors[(n + i, k)].re))
            .collect();
        factors.set_col(count, &normalized(u));
        coefficients.push(eig.eigenvalues[k]);
        count += 1;
    }
    // near-null block: Gram–Schmidt the complex candidates until n columns
    if count < n {
        let mut candidates: Vec<Vec<C64>> = Vec::new();
        for k in 0..2 * n {
            if eig.eigenvalues[k].abs() <= zero_tol {
                candidates.push(
                    (0..n)
                        .map(|i| {
                            C64::new(eig.eigenvectors[(i, k)].re, eig.eigenvectors[(n + i, k)].re)
                        })
                        .collect(),
                );
            }
        }
        // fall back to the standard basis if rounding left us short
        candidates.extend((0..n).map(|i| {
            let mut e = vec![ZERO; n];
            e[i] = C64::new(1.0, 0.0);
            e
        }));
        for mut cand in candidates {
            if count == n {
                break;
            }
            for _ in 0..2 {
                for j in 0..count {
                    let col = factors.col(j);
                    let proj: C64 = col.iter().zip(&cand).map(|(a, b)| a.conj() * b).sum();
                    for (c, a) in cand.iter_mut().zip(&col) {
                        *c -= a * proj;
                    }
                }
            }
            let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.5 {
                factors.set_col(count, &normalized(cand));
                coefficients.push(0.0);
                count += 1;
            }
        }
    }
    Ok(TakagiDecomp {
        factors,
        coefficients,
    })
}

fn normalized(mut v: Vec<C64>) -> Vec<C64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in &mut v {
            *z /= norm;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{herm_eig, householder_qr};

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn random_symmetric(n: usize, seed: &mut u64) -> CMat {
        let g = CMat::from_fn(n, n, |_, _| C64::new(lcg(seed), lcg(seed)));
        (&g + &g.transpose()).scale_real(0.5)
    }

    /// Singular values through the eigenvalues of `A†A`.
    fn singular_values(a: &CMat) -> Vec<f64> {
        herm_eig(&a.adjoint().matmul(a))
            .unwrap()
            .eigenvalues
            .iter()
            .map(|&l| l.max(0.0).sqrt())
            .collect()
    }

    fn check(a: &CMat) -> TakagiDecomp {
        let t = takagi(a).unwrap();
        let n = a.rows();
        assert!(t.reconstruct().approx_eq(a, 1e-10), "reconstruction failed");
        let u = &t.factors;
        assert!(u.adjoint().matmul(u).approx_eq(&CMat::identity(n), 1e-10));
        assert!(t.coefficients.windows(2).all(|w| w[0] >= w[1]));
        assert!(t.coefficients.iter().all(|&c| c >= 0.0));
        t
    }

    #[test]
    fn swap_matrix() {
        let a = CMat::from_real(2, 2, &[0., 1., 1., 0.]).unwrap();
        let t = check(&a);
        assert!((t.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((t.coefficients[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_nonnegative() {
        let t = check(&CMat::diag_real(&[2.0, 0.0]));
        assert_eq!(t.coefficients.len(), 2);
        assert!((t.coefficients[0] - 2.0).abs() < 1e-12);
        assert!(t.coefficients[1].abs() < 1e-12);
        assert!((t.factors[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let t = check(&CMat::zeros(3, 3));
        assert!(t.coefficients.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn random_matches_svd() {
        let mut s = 31;
        for n in [1, 2, 3, 4, 6] {
            for _ in 0..10 {
                let a = random_symmetric(n, &mut s);
                let t = check(&a);
                for (x, y) in t.coefficients.iter().zip(singular_values(&a)) {
                    assert!((x - y).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn rank_deficient() {
        let mut s = 8;
        let v: Vec<C64> = (0..4).map(|_| C64::new(lcg(&mut s), lcg(&mut s))).collect();
        let w: Vec<C64> = (0..4).map(|_| C64::new(lcg(&mut s), lcg(&mut s))).collect();
        let a = CMat::from_fn(4, 4, |i, j| v[i] * v[j] + w[i] * w[j]);
        let t = check(&a);
        assert!(t.coefficients[2].abs() < 1e-10 && t.coefficients[3].abs() < 1e-10);
    }

    #[test]
    fn unitary_congruence_invariance() {
        let mut s = 77;
        for _ in 0..10 {
            let a = random_symmetric(4, &mut s);
            let g = CMat::from_fn(4, 4, |_, _| C64::new(lcg(&mut s), lcg(&mut s)));
            let q = householder_qr(&g).q;
            let b = q.matmul(&a).matmul(&q.transpose());
            let ta = takagi(&a).unwrap().coefficients;
            let tb = takagi(&b).unwrap().coefficients;
            for (x, y) in ta.iter().zip(&tb) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_non_symmetric() {
        let a = CMat::from_real(2, 2, &[0., 1., 0., 0.]).unwrap();
        assert!(matches!(takagi(&a), Err(Error::NotSymmetric { .. })));
    }
}
