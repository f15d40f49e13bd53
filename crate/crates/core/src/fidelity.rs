//! Gate fidelities computed from Choi matrices.
//!
//! The gate fidelity of a channel at `|φ⟩` is `⟨φφ|(T ⊗ id)(C)|φφ⟩`, so it
//! only depends on the compression `K = P_S (T ⊗ id)(C) P_S`. Everything here
//! is a statement about `K`: its trace gives the average, its top eigenvalue
//! and the S(1)-norm of `λ₁P_S − K` give the minimum.

use rayon::prelude::*;

use crate::channel::{apply, kraus_from_choi, Choi, DensityMatrix, KrausSet, PureState};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig_with_tol, kron_vec, partial_transpose, takagi, CMat, Subsystem, C64};
use crate::s1norm;
use crate::symmetry::{compression, max_entangled, sym_projector};

/// Tolerance for "is a channel" preconditions.
pub const CHANNEL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MinFidelityMethod {
    /// Exact PPT SDP for qubits; falls back to `PptAndSeesaw` for `n ≥ 3`.
    SdpExact,
    PptAndSeesaw,
    /// Bloch-sphere grid with step π/1000 (qubits only).
    Grid,
}

impl MinFidelityMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::SdpExact => "sdp_exact",
            Self::PptAndSeesaw => "ppt_and_seesaw",
            Self::Grid => "grid",
        }
    }
}

impl std::fmt::Display for MinFidelityMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug)]
pub struct FidelityReport {
    pub average: f64,
    pub lambda1: f64,
    pub minimum: f64,
    pub certified_interval: (f64, f64),
    pub method: MinFidelityMethod,
}

#[derive(Clone, Debug)]
pub struct MinFidelityOptions {
    pub method: MinFidelityMethod,
    /// Target SDP duality gap.
    pub tolerance: f64,
    pub seesaw_restarts: usize,
    pub seesaw_iterations: usize,
    pub seed: u64,
    pub grid_steps: usize,
}

impl Default for MinFidelityOptions {
    fn default() -> Self {
        Self {
            method: MinFidelityMethod::SdpExact,
            tolerance: crate::sdp::DEFAULT_TOLERANCE,
            seesaw_restarts: s1norm::DEFAULT_RESTARTS,
            seesaw_iterations: s1norm::DEFAULT_ITERATIONS,
            seed: 0,
            grid_steps: 1000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QubitDecomposition {
    pub r: f64,
    pub e: Choi,
    pub c1: C64,
    pub c2: C64,
}

fn check_dim(c: &Choi, n: usize) -> Result<()> {
    if c.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "channel on C^{} used with a state on C^{n}",
            c.n()
        )));
    }
    Ok(())
}

/// `F_E(φ) = ⟨φφ|(T ⊗ id)(C)|φφ⟩`.
pub fn gate_fidelity_at(c: &Choi, phi: &PureState) -> Result<f64> {
    let n = c.n();
    check_dim(c, phi.n())?;
    let pt = partial_transpose(c.mat(), n, Subsystem::First)?;
    let a = phi.amplitudes();
    Ok(pt.quad_form(&kron_vec(a, a)).re)
}

/// `G` with `G G† = ρ`, keeping only eigenvalues above `1e-12`.
fn psd_factor(m: &CMat) -> Result<CMat> {
    let eig = herm_eig_with_tol(m, 1e-9)?;
    if eig.min() < -1e-10 {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    let keep: Vec<usize> = (0..eig.dim())
        .filter(|&k| eig.eigenvalues[k] > 1e-12)
        .collect();
    let mut g = CMat::zeros(m.rows(), keep.len());
    for (c, &k) in keep.iter().enumerate() {
        let s = eig.eigenvalues[k].sqrt();
        let v: Vec<C64> = eig.vector(k).iter().map(|z| z * s).collect();
        g.set_col(c, &v);
    }
    Ok(g)
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`, evaluated as `‖G_ρ† G_σ‖₁²` so that
/// a pure argument reduces exactly to `⟨φ|ρ|φ⟩`.
pub fn state_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.n() != sigma.n() {
        return Err(Error::DimensionMismatch(format!(
            "states on C^{} and C^{}",
            rho.n(),
            sigma.n()
        )));
    }
    let a = psd_factor(rho.mat())?
        .adjoint()
        .matmul(&psd_factor(sigma.mat())?);
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0.0);
    }
    let gram = if a.rows() <= a.cols() {
        a.matmul(&a.adjoint())
    } else {
        a.adjoint().matmul(&a)
    };
    let t: f64 = herm_eig_with_tol(&gram.hermitian_part(), f64::INFINITY)?
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .sum();
    Ok((t * t).clamp(0.0, 1.0))
}

/// `(n + Σ|Tr E_i|²) / (n(n+1))`.
pub fn average_fidelity_kraus(k: &KrausSet) -> Result<f64> {
    if !k.is_channel(CHANNEL_TOL) {
        return Err(Error::InvalidChannel(
            "Kraus operators are not trace preserving".into(),
        ));
    }
    let n = k.n() as f64;
    let s: f64 = k.ops().iter().map(|e| e.trace().norm_sqr()).sum();
    Ok((n + s) / (n * (n + 1.0)))
}

/// `2 Tr(K) / (n(n+1))`.
pub fn average_fidelity_choi(c: &Choi) -> Result<f64> {
    c.require_channel(CHANNEL_TOL)?;
    Ok(average_from_trace(c.n(), compression(c).trace()))
}

fn average_from_trace(n: usize, tr: f64) -> f64 {
    let n = n as f64;
    2.0 * tr / (n * (n + 1.0))
}

/// Entanglement fidelity `⟨ψ₊|C|ψ₊⟩ / n`.
pub fn chi00(c: &Choi) -> f64 {
    c.mat().quad_form(max_entangled(c.n()).amplitudes()).re / c.n() as f64
}

/// `‖K_Q − K_R‖_F`.
pub fn compression_difference(cq: &Choi, cr: &Choi) -> Result<f64> {
    if cq.n() != cr.n() {
        return Err(Error::DimensionMismatch(format!(
            "channels on C^{} and C^{}",
            cq.n(),
            cr.n()
        )));
    }
    Ok((compression(cq).k() - compression(cr).k()).frobenius_norm())
}

/// Equal gate fidelity everywhere iff the compressions agree.
pub fn equal_fidelity(cq: &Choi, cr: &Choi, tol: f64) -> Result<bool> {
    let diff = compression_difference(cq, cr)?;
    let scale = compression(cq).k().frobenius_norm().max(1.0);
    Ok(diff <= tol * scale)
}

/// The constant `c` when `K = c P_S` within `tol`.
pub fn constant_fidelity(c: &Choi, tol: f64) -> Option<f64> {
    let n = c.n();
    let k = compression(c);
    let value = average_from_trace(n, k.trace());
    let dev = (k.k() - &sym_projector(n).scale_real(value)).frobenius_norm();
    (dev <= tol).then_some(value)
}

/// Necessary condition: the middle `n` eigenvalues of `(T ⊗ id)(C)` agree.
pub fn constant_fidelity_necessary(c: &Choi, tol: f64) -> Result<bool> {
    let n = c.n();
    let pt = partial_transpose(c.mat(), n, Subsystem::First)?;
    let eig = herm_eig_with_tol(&pt, f64::INFINITY)?;
    let mid = &eig.eigenvalues[n * (n - 1) / 2..n * (n + 1) / 2];
    let hi = mid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = mid.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(hi - lo <= tol)
}

/// `λ₁` and `X = λ₁ P_S − K`.
fn gap_operator(c: &Choi) -> Result<(f64, CMat, f64)> {
    let k = compression(c);
    let lambda1 = k.lambda1()?;
    let x = &sym_projector(c.n()).scale_real(lambda1) - k.k();
    Ok((lambda1, x, k.trace()))
}

pub fn min_gate_fidelity(c: &Choi, method: MinFidelityMethod) -> Result<FidelityReport> {
    min_gate_fidelity_with(
        c,
        &MinFidelityOptions {
            method,
            ..Default::default()
        },
    )
}

pub fn min_gate_fidelity_with(c: &Choi, opts: &MinFidelityOptions) -> Result<FidelityReport> {
    c.require_channel(CHANNEL_TOL)?;
    let n = c.n();
    let (lambda1, x, tr) = gap_operator(c)?;
    let average = average_from_trace(n, tr);
    if n == 1 {
        // the only state is fixed
        return Ok(FidelityReport {
            average,
            lambda1,
            minimum: lambda1,
            certified_interval: (lambda1, lambda1),
            method: opts.method,
        });
    }
    let method = match (opts.method, n) {
        (MinFidelityMethod::SdpExact, 2) => MinFidelityMethod::SdpExact,
        (MinFidelityMethod::SdpExact, _) => MinFidelityMethod::PptAndSeesaw,
        (MinFidelityMethod::Grid, 2) => MinFidelityMethod::Grid,
        (MinFidelityMethod::Grid, _) => {
            return Err(Error::InvalidArgument(
                "grid search is only available for qubit channels".into(),
            ))
        }
        (m, _) => m,
    };
    let (minimum, interval) = match method {
        MinFidelityMethod::SdpExact => {
            let s = s1norm::s1_exact_qubit_with_tol(&x, opts.tolerance)?;
            (lambda1 - s.value, (lambda1 - s.upper, lambda1 - s.lower))
        }
        MinFidelityMethod::PptAndSeesaw => {
            let upper = s1norm::s1_ppt_upper_with_tol(&x, n, opts.tolerance)?;
            let lower = s1norm::s1_seesaw_lower(
                &x,
                n,
                opts.seesaw_restarts,
                opts.seesaw_iterations,
                opts.seed,
            )?;
            let upper = upper.max(lower.value);
            (
                lambda1 - lower.value,
                (lambda1 - upper, lambda1 - lower.value),
            )
        }
        MinFidelityMethod::Grid => {
            let (g, _) = grid_minimum(c, opts.grid_steps)?;
            let (lo, _) = min_fid_bounds(c)?;
            (g, (lo.min(g), g))
        }
    };
    let minimum = minimum.min(average);
    Ok(FidelityReport {
        average,
        lambda1,
        minimum,
        certified_interval: (interval.0.min(minimum), interval.1.max(minimum)),
        method,
    })
}

/// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
pub fn bloch_state(theta: f64, phi: f64) -> PureState {
    PureState::new(vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ])
    .expect("unit vector")
}

/// Minimum of the gate fidelity over a Bloch-sphere grid with `steps`
/// polar samples on `[0, π]` and `2·steps` azimuthal samples on `[0, 2π)`.
/// Returns the minimum and the `(θ, φ)` attaining it.
pub fn grid_minimum(c: &Choi, steps: usize) -> Result<(f64, (f64, f64))> {
    check_dim(c, 2)?;
    if steps == 0 {
        return Err(Error::InvalidArgument(
            "grid needs at least one step".into(),
        ));
    }
    let pt = partial_transpose(c.mat(), 2, Subsystem::First)?;
    let h = std::f64::consts::PI / steps as f64;
    let azimuths: Vec<(f64, f64)> = (0..2 * steps).map(|j| (j as f64 * h).sin_cos()).collect();
    let best = (0..=steps)
        .into_par_iter()
        .map(|i| {
            let theta = i as f64 * h;
            let (s, co) = (theta / 2.0).sin_cos();
            let mut best = (f64::INFINITY, 0usize);
            for (j, &(sp, cp)) in azimuths.iter().enumerate() {
                let v = [C64::new(co, 0.0), C64::new(s * cp, s * sp)];
                let f = pt.quad_form(&kron_vec(&v, &v)).re;
                if f < best.0 {
                    best = (f, j);
                }
            }
            (best.0, i, best.1)
        })
        .reduce(
            || (f64::INFINITY, usize::MAX, usize::MAX),
            |a, b| {
                if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                    b
                } else {
                    a
                }
            },
        );
    Ok((best.0, (best.1 as f64 * h, best.2 as f64 * h)))
}

/// Eigenvalue/Schmidt-coefficient bounds `(lower, upper)` on the minimum
/// gate fidelity.
pub fn min_fid_bounds(c: &Choi) -> Result<(f64, f64)> {
    c.require_channel(CHANNEL_TOL)?;
    let n = c.n();
    let spec = compression(c).symmetric_spectrum()?;
    let l1 = spec.lambda1();
    let last = *spec.eigenvalues.last().expect("nonempty spectrum");
    let mut sum = 0.0;
    let mut best: f64 = 0.0;
    for (j, &lj) in spec.eigenvalues.iter().enumerate() {
        let v = spec.vector(j);
        // symmetric coefficient matrix of the eigenvector
        let m = CMat::from_fn(n, n, |a, b| v[a * n + b]);
        let alpha = takagi(&m)?.coefficients[0];
        let t = (l1 - lj) * alpha * alpha;
        sum += t;
        best = best.max(t);
    }
    let upper_gap = (l1 - last).min(sum);
    Ok((l1 - upper_gap, l1 - best))
}

/// `F(E(ρ), ρ)`; never below the minimum gate fidelity.
pub fn min_fid_mixed_check(c: &Choi, rho: &DensityMatrix) -> Result<f64> {
    if c.n() != rho.n() {
        return Err(Error::DimensionMismatch(format!(
            "channel on C^{} applied to a state on C^{}",
            c.n(),
            rho.n()
        )));
    }
    state_fidelity(&apply(c, rho)?, rho)
}

/// Kraus-route average; convenient cross-check of [`average_fidelity_choi`].
pub fn average_fidelity_via_kraus(c: &Choi) -> Result<f64> {
    average_fidelity_kraus(&kraus_from_choi(c)?)
}

/// `(T ⊗ id)(C_E − C_{E†})` pattern for the qubit construction, times `r`.
fn difference_pattern(c1: C64, c2: C64) -> CMat {
    let z = C64::new(0.0, 0.0);
    let two = 2.0;
    CMat::from_vec(
        4,
        4,
        vec![
            z,
            c2.conj(),
            -c2.conj(),
            z,
            c2,
            z,
            c1 * two,
            c2.conj(),
            -c2,
            c1.conj() * two,
            z,
            -c2.conj(),
            z,
            c2,
            -c2,
            z,
        ],
    )
    .expect("4x4")
}

/// The unital channel with Choi matrix
/// `(1/2r)[[r,0,−2c₂,2c̄₁],[0,r,0,2c₂],[−2c̄₂,0,r,0],[2c₁,2c̄₂,0,r]]`.
pub fn qubit_shift_channel(r: f64, c1: C64, c2: C64) -> Result<Choi> {
    if r <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "r must be positive, got {r}"
        )));
    }
    let rc = C64::new(r, 0.0);
    let z = C64::new(0.0, 0.0);
    let m = CMat::from_vec(
        4,
        4,
        vec![
            rc,
            z,
            -c2 * 2.0,
            c1.conj() * 2.0,
            z,
            rc,
            z,
            c2 * 2.0,
            -c2.conj() * 2.0,
            z,
            rc,
            z,
            c1 * 2.0,
            c2.conj() * 2.0,
            z,
            rc,
        ],
    )?;
    Choi::new(2, m.scale_real(0.5 / r))
}

/// Writes `C_Q − C_R = r (C_E − C_{E†})` with `E` unital, for qubit
/// channels of equal gate fidelity.
pub fn decompose_qubit(cq: &Choi, cr: &Choi) -> Result<QubitDecomposition> {
    if cq.n() != 2 || cr.n() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "decomposition needs qubit channels, got n = {} and {}",
            cq.n(),
            cr.n()
        )));
    }
    cq.require_channel(CHANNEL_TOL)?;
    cr.require_channel(CHANNEL_TOL)?;
    let diff = compression_difference(cq, cr)?;
    if !equal_fidelity(cq, cr, CHANNEL_TOL)? {
        return Err(Error::PatternViolation { residual: diff });
    }
    let d = partial_transpose((cq - cr).mat(), 2, Subsystem::First)?;
    let c2 = d[(0, 1)].conj();
    let c1 = d[(1, 2)] / 2.0;
    let residual = (&d - &difference_pattern(c1, c2))
        .frobenius_norm()
        .max(c1.re.abs());
    if residual > CHANNEL_TOL {
        return Err(Error::PatternViolation { residual });
    }
    let c1 = C64::new(0.0, c1.im);
    let r = 2.0 * c2.norm() + 2.0 * c1.norm();
    if r <= 1e-14 {
        return Ok(QubitDecomposition {
            r: 0.0,
            e: Choi::identity(2),
            c1,
            c2,
        });
    }
    let e = qubit_shift_channel(r, c1, c2)?;
    Ok(QubitDecomposition { r, e, c1, c2 })
}
