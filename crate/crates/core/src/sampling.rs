//! Reproducible random channels, states, and unitaries.
//!
//! The generator is ChaCha20 (a counter-based stream cipher RNG) keyed by a
//! 64-bit seed, with `stream_index` selecting one of 2^64 independent
//! streams. Uniform doubles take the top 53 bits of each 64-bit word and
//! Gaussians come from Box–Muller, so a given `(seed, stream_index)` yields
//! the same draws on every platform and thread count.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::channel::{choi_from_kraus, Choi, DensityMatrix, KrausSet, PureState};
use crate::error::{Error, Result};
use crate::linalg::{householder_qr, CMat, C64};

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        Self {
            seed,
            stream_index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Pair of independent standard normals (Box–Muller).
    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = std::f64::consts::TAU * u2;
        (r * t.cos(), r * t.sin())
    }

    /// Standard complex Gaussian, `E|z|² = 1`.
    pub fn complex_gaussian(&mut self) -> C64 {
        let (a, b) = self.gaussian_pair();
        C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// `rows × cols` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut RngStream) -> CMat {
    CMat::from_fn(rows, cols, |_, _| rng.complex_gaussian())
}

/// Haar-random `d × d` unitary: QR of a Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary(d: usize, rng: &mut RngStream) -> CMat {
    let g = ginibre(d, d, rng);
    let qr = householder_qr(&g);
    let mut q = qr.q;
    for j in 0..d {
        let rjj = qr.r[(j, j)];
        let ph = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random channel `E(ρ) = Tr_env(U (|0⟩⟨0| ⊗ ρ) U†)` with `U` Haar on
/// `C^{n²} ⊗ C^n` (environment first).
pub fn random_channel(n: usize, rng: &mut RngStream) -> Choi {
    let env = n * n;
    let u = haar_unitary(env * n, rng);
    // Kraus operator for environment outcome e: K_e[a][j] = U[e·n + a][j]
    let ops = (0..env)
        .map(|e| CMat::from_fn(n, n, |a, j| u[(e * n + a, j)]))
        .collect();
    choi_from_kraus(&KrausSet::new(n, ops).expect("square blocks"))
}

/// Fubini–Study-uniform pure state.
pub fn random_pure_state(n: usize, rng: &mut RngStream) -> PureState {
    loop {
        let v: Vec<C64> = (0..n).map(|_| rng.complex_gaussian()).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// `G G† / Tr(G G†)` for an `n × rank` complex Gaussian `G`.
pub fn random_density(n: usize, rank: usize, rng: &mut RngStream) -> Result<DensityMatrix> {
    if rank == 0 || rank > n {
        return Err(Error::InvalidArgument(format!(
            "rank must be in 1..={n}, got {rank}"
        )));
    }
    let g = ginibre(n, rank, rng);
    let rho = g.matmul(&g.adjoint());
    let tr = rho.trace().re;
    Ok(DensityMatrix::new_unchecked(rho.scale_real(1.0 / tr)))
}
