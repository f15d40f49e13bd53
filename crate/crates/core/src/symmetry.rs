//! Flip operator, symmetric subspace, and the compression
//! `K = P_S (T ⊗ id)(C) P_S` that carries a channel's gate fidelity.

use crate::channel::{Choi, PureState};
use crate::error::Result;
use crate::linalg::{herm_eig_with_tol, partial_transpose, CMat, EigDecomp, Subsystem, C64, ONE};

/// `F|φψ⟩ = |ψφ⟩`.
pub fn flip(n: usize) -> CMat {
    let mut f = CMat::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            f[(i * n + j, j * n + i)] = ONE;
        }
    }
    f
}

/// `P_S = (I + F)/2`, rank `n(n+1)/2`.
pub fn sym_projector(n: usize) -> CMat {
    (&CMat::identity(n * n) + &flip(n)).scale_real(0.5)
}

pub fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// `(1/√n) Σ_j |jj⟩`.
pub fn max_entangled(n: usize) -> PureState {
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    let a = 1.0 / (n as f64).sqrt();
    for j in 0..n {
        v[j * n + j] = C64::new(a, 0.0);
    }
    PureState::normalized(v).expect("nonzero")
}

/// Orthonormal basis of the symmetric subspace as the columns of an
/// `n² × n(n+1)/2` matrix: `|ii⟩` first, then `(|ij⟩ + |ji⟩)/√2` for `i < j`.
pub fn symmetric_basis(n: usize) -> CMat {
    let mut b = CMat::zeros(n * n, sym_dim(n));
    let mut col = 0;
    for i in 0..n {
        b[(i * n + i, col)] = ONE;
        col += 1;
    }
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            b[(i * n + j, col)] = h;
            b[(j * n + i, col)] = h;
            col += 1;
        }
    }
    b
}

/// The compression of a Choi matrix onto the symmetric subspace.
#[derive(Clone, Debug)]
pub struct Compression {
    n: usize,
    k: CMat,
}

/// Eigen-data of a compression restricted to the symmetric subspace.
#[derive(Clone, Debug)]
pub struct SymmetricSpectrum {
    /// `λ_1 ≥ … ≥ λ_{n(n+1)/2}`.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors lifted back to `C^n ⊗ C^n`, one per column.
    pub eigenvectors: CMat,
}

impl SymmetricSpectrum {
    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.eigenvectors.col(j)
    }
}

impl Compression {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> &CMat {
        &self.k
    }

    /// `Bᵀ K B` in the basis of [`symmetric_basis`] (real basis, so `B† = Bᵀ`).
    pub fn reduced(&self) -> CMat {
        let b = symmetric_basis(self.n);
        b.adjoint().matmul(&self.k).matmul(&b)
    }

    /// Spectrum supported on `P_S`, without the `n(n−1)/2` structural zeros.
    pub fn symmetric_spectrum(&self) -> Result<SymmetricSpectrum> {
        let b = symmetric_basis(self.n);
        let red = b.adjoint().matmul(&self.k).matmul(&b);
        let EigDecomp {
            eigenvalues,
            eigenvectors,
        } = herm_eig_with_tol(&red, 1e-8)?;
        Ok(SymmetricSpectrum {
            eigenvalues,
            eigenvectors: b.matmul(&eigenvectors),
        })
    }

    pub fn lambda1(&self) -> Result<f64> {
        Ok(self.symmetric_spectrum()?.lambda1())
    }

    pub fn trace(&self) -> f64 {
        self.k.trace().re
    }
}

/// `K = P_S · (T ⊗ id)(C) · P_S`, transposing the input (first) factor.
pub fn compression(c: &Choi) -> Compression {
    let n = c.n();
    let pt = partial_transpose(c.mat(), n, Subsystem::First).expect("Choi shape is checked");
    let ps = sym_projector(n);
    let k = ps.matmul(&pt).matmul(&ps);
    Compression { n, k }
}
