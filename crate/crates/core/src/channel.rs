//! Channel representations and conversions.
//!
//! Conventions used throughout the crate:
//!
//! * The Choi matrix of `E` on `C^n` is `C = Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`, input
//!   factor first, output factor second.
//! * Trace preserving ⟺ tracing out the output (second) factor gives `I`;
//!   unital ⟺ tracing out the input (first) factor gives `I`.
//! * For a Kraus operator `K`, `(I ⊗ K) Σ_i |ii⟩` is the row-major
//!   vectorization of `Kᵀ`, i.e. component `i·n + a` is `K[a][i]`. The
//!   eigenvectors of `C` unvectorize to Kraus operators this way.

use crate::error::{Error, Result};
use crate::linalg::{herm_eig_with_tol, partial_trace, CMat, Subsystem, C64, ONE, ZERO};
use crate::symmetry::flip;

/// Choi matrix of a linear map on `n×n` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Choi {
    n: usize,
    mat: CMat,
}

impl Choi {
    pub fn new(n: usize, mat: CMat) -> Result<Self> {
        if n == 0 || mat.rows() != n * n || mat.cols() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix for n = {n} must be {0}x{0}, got {1}x{2}",
                n * n,
                mat.rows(),
                mat.cols()
            )));
        }
        if !mat.all_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, mat })
    }

    /// Choi matrix of an arbitrary linear map given as a closure, by direct
    /// evaluation on the matrix units `|i⟩⟨j|`.
    pub fn from_map(n: usize, map: impl Fn(&CMat) -> CMat) -> Self {
        let mut mat = CMat::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let mut unit = CMat::zeros(n, n);
                unit[(i, j)] = ONE;
                let image = map(&unit);
                for a in 0..n {
                    for b in 0..n {
                        mat[(i * n + a, j * n + b)] = image[(a, b)];
                    }
                }
            }
        }
        Self { n, mat }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_map(n, |x| x.clone())
    }

    /// The (non-CP) transpose map; its Choi matrix is the flip operator.
    pub fn transpose_map(n: usize) -> Self {
        Self::from_map(n, |x| x.transpose())
    }

    /// `E(ρ) = p ρ + (1 − p) Tr(ρ) I/n`.
    pub fn depolarizing(n: usize, p: f64) -> Self {
        Self::from_map(n, |x| {
            let t = x.trace() * ((1.0 - p) / n as f64);
            &x.scale_real(p) + &CMat::identity(n).scale(t)
        })
    }

    /// `E(ρ) = Tr(ρ) I/n`.
    pub fn completely_depolarizing(n: usize) -> Self {
        Self::depolarizing(n, 0.0)
    }

    /// Qubit amplitude damping with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Self {
        let k0 = CMat::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]).unwrap();
        let k1 = CMat::from_real(2, 2, &[0.0, gamma.sqrt(), 0.0, 0.0]).unwrap();
        choi_from_kraus(&KrausSet::new(2, vec![k0, k1]).unwrap())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn into_mat(self) -> CMat {
        self.mat
    }

    /// Errors unless this is a channel within `tol`.
    pub fn require_channel(&self, tol: f64) -> Result<ValidationReport> {
        let report = validate(self, tol)?;
        if !report.cp {
            return Err(Error::InvalidChannel(format!(
                "Choi matrix has eigenvalue {:.3e}",
                report.min_eigenvalue
            )));
        }
        if !report.tp {
            return Err(Error::InvalidChannel("map is not trace preserving".into()));
        }
        Ok(report)
    }
}

impl std::ops::Sub<&Choi> for &Choi {
    type Output = Choi;
    fn sub(self, rhs: &Choi) -> Choi {
        assert_eq!(self.n, rhs.n);
        Choi {
            n: self.n,
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl std::ops::Add<&Choi> for &Choi {
    type Output = Choi;
    fn add(self, rhs: &Choi) -> Choi {
        assert_eq!(self.n, rhs.n);
        Choi {
            n: self.n,
            mat: &self.mat + &rhs.mat,
        }
    }
}

#[derive(Clone, Debug)]
pub struct KrausSet {
    n: usize,
    ops: Vec<CMat>,
}

impl KrausSet {
    pub fn new(n: usize, ops: Vec<CMat>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if let Some(bad) = ops.iter().find(|k| k.rows() != n || k.cols() != n) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator is {}x{}, expected {n}x{n}",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self { n, ops })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    /// `Σ K_i† K_i`.
    pub fn completeness(&self) -> CMat {
        self.ops.iter().fold(CMat::zeros(self.n, self.n), |acc, k| {
            &acc + &k.adjoint().matmul(k)
        })
    }

    pub fn is_channel(&self, tol: f64) -> bool {
        self.completeness().approx_eq(&CMat::identity(self.n), tol)
    }

    /// `Σ K_i ρ K_i†`.
    pub fn apply(&self, rho: &CMat) -> CMat {
        self.ops.iter().fold(CMat::zeros(self.n, self.n), |acc, k| {
            &acc + &k.matmul(rho).matmul(&k.adjoint())
        })
    }

    pub fn adjoint(&self) -> KrausSet {
        KrausSet {
            n: self.n,
            ops: self.ops.iter().map(CMat::adjoint).collect(),
        }
    }
}

/// Mixed state: PSD with unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    mat: CMat,
}

impl DensityMatrix {
    pub const TOL: f64 = 1e-10;

    pub fn new(mat: CMat) -> Result<Self> {
        Self::with_tol(mat, Self::TOL)
    }

    pub fn with_tol(mat: CMat, tol: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch(
                "density matrix must be square".into(),
            ));
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let eig = herm_eig_with_tol(&mat, tol)?;
        if eig.min() < -tol {
            return Err(Error::InvalidState(format!(
                "min eigenvalue {:.3e}",
                eig.min()
            )));
        }
        Ok(Self { n: mat.rows(), mat })
    }

    pub(crate) fn new_unchecked(mat: CMat) -> Self {
        Self { n: mat.rows(), mat }
    }

    pub fn pure(phi: &PureState) -> Self {
        Self::new_unchecked(CMat::outer(phi.amplitudes()))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self::new_unchecked(CMat::identity(n).scale_real(1.0 / n as f64))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }
}

/// Unit vector in `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub const TOL: f64 = 1e-12;

    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || (norm - 1.0).abs() > Self::TOL {
            return Err(Error::InvalidState(format!("vector norm is {norm}")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut amplitudes = vec![ZERO; n];
        amplitudes[k] = ONE;
        Self { amplitudes }
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

pub fn choi_from_kraus(k: &KrausSet) -> Choi {
    let n = k.n;
    let mut mat = CMat::zeros(n * n, n * n);
    for op in &k.ops {
        // component i*n + a is op[a][i]
        let v: Vec<C64> = (0..n * n).map(|idx| op[(idx % n, idx / n)]).collect();
        mat += &CMat::outer(&v);
    }
    Choi { n, mat }
}

/// Kraus operators `√λ_i · unvec(v_i)` from the spectral decomposition of the
/// Choi matrix, dropping eigenvalues `≤ 1e-10 · λ_max`.
pub fn kraus_from_choi(c: &Choi) -> Result<KrausSet> {
    let n = c.n;
    let eig = herm_eig_with_tol(&c.mat, 1e-8)?;
    if eig.min() < -1e-8 {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    let cutoff = 1e-10 * eig.max().max(0.0);
    let mut ops = Vec::new();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam <= cutoff {
            continue;
        }
        let s = lam.sqrt();
        ops.push(CMat::from_fn(n, n, |a, i| {
            eig.eigenvectors[(i * n + a, k)] * s
        }));
    }
    Ok(KrausSet { n, ops })
}

/// Applies the map to an arbitrary matrix: `E(X)_ab = Σ_ij X_ij C[(i,a),(j,b)]`,
/// i.e. `Tr_1((Xᵀ ⊗ I) C)`.
pub fn apply_map(c: &Choi, x: &CMat) -> Result<CMat> {
    let n = c.n;
    if x.rows() != n || x.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "channel on C^{n} applied to a {}x{} matrix",
            x.rows(),
            x.cols()
        )));
    }
    let mut out = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let xij = x[(i, j)];
            if xij == ZERO {
                continue;
            }
            for a in 0..n {
                for b in 0..n {
                    out[(a, b)] += xij * c.mat[(i * n + a, j * n + b)];
                }
            }
        }
    }
    Ok(out)
}

pub fn apply(c: &Choi, rho: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(apply_map(c, &rho.mat)?))
}

/// Choi matrix of the Hilbert–Schmidt adjoint map: `F Cᵀ F`.
pub fn dual_choi(c: &Choi) -> Choi {
    let n = c.n;
    let nn = n * n;
    let swap = |idx: usize| (idx % n) * n + idx / n;
    // (F Cᵀ F)[r][s] = C[swap(s)][swap(r)]
    let mat = CMat::from_fn(nn, nn, |r, s| c.mat[(swap(s), swap(r))]);
    debug_assert!(mat.approx_eq(&flip(n).matmul(&c.mat.transpose()).matmul(&flip(n)), 1e-12));
    Choi { n, mat }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationReport {
    pub cp: bool,
    pub tp: bool,
    pub unital: bool,
    pub min_eigenvalue: f64,
}

impl ValidationReport {
    pub fn is_channel(&self) -> bool {
        self.cp && self.tp
    }
}

/// Checks complete positivity, trace preservation, and unitality within
/// `tol`.
pub fn validate(c: &Choi, tol: f64) -> Result<ValidationReport> {
    let dev = c.mat.hermitian_deviation();
    if dev > tol.max(crate::linalg::HERMITIAN_TOL) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let eig = herm_eig_with_tol(&c.mat, f64::INFINITY)?;
    let id = CMat::identity(c.n);
    let out_trace = partial_trace(&c.mat, c.n, Subsystem::Second)?;
    let in_trace = partial_trace(&c.mat, c.n, Subsystem::First)?;
    Ok(ValidationReport {
        cp: eig.min() >= -tol,
        tp: out_trace.approx_eq(&id, tol),
        unital: in_trace.approx_eq(&id, tol),
        min_eigenvalue: eig.min(),
    })
}
