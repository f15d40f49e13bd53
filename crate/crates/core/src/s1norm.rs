//! The S(1)-norm `‖X‖ = sup_{φ,ψ} ⟨φψ|X|φψ⟩` of a PSD operator on
//! `C^n ⊗ C^n`.
//!
//! * [`s1_exact_qubit`]: exact for `2 ⊗ 2`, where PPT states are separable.
//! * [`s1_ppt_upper`]: the PPT relaxation, a certified upper bound for any `n`.
//! * [`s1_seesaw_lower`]: alternating maximization over product states, a
//!   lower bound with an explicit witness.

use crate::channel::PureState;
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, herm_eig_with_tol, kron_vec, CMat, C64};
use crate::sampling::{random_pure_state, RngStream};
use crate::sdp::{self, SdpInstance};

pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_ITERATIONS: usize = 200;
const SEESAW_CONVERGENCE: f64 = 1e-12;
const PSD_CLAMP: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct S1Result {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Product state `(φ, ψ)` with `⟨φψ|X|φψ⟩ = lower`.
    pub witness: Option<(PureState, PureState)>,
    pub exact: bool,
}

impl S1Result {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Clamps eigenvalues in `[-1e-9, 0)` to zero and rejects anything lower.
pub fn clamp_psd(x: &CMat) -> Result<CMat> {
    let eig = herm_eig_with_tol(x, 1e-9)?;
    if eig.min() < -PSD_CLAMP {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    if eig.min() >= 0.0 {
        return Ok(x.hermitian_part());
    }
    let vals: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    Ok(eig.reconstruct_with(&vals))
}

fn local_dim(x: &CMat) -> Result<usize> {
    let m = x.rows();
    let n = (m as f64).sqrt().round() as usize;
    if !x.is_square() || n * n != m || n == 0 {
        return Err(Error::DimensionMismatch(format!(
            "expected an operator on C^n ⊗ C^n, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(n)
}

/// `⟨φψ|X|φψ⟩`.
pub fn product_value(x: &CMat, phi: &[C64], psi: &[C64]) -> f64 {
    x.quad_form(&kron_vec(phi, psi)).re
}

/// Exact S(1)-norm on `2 ⊗ 2` by the PPT semidefinite program.
pub fn s1_exact_qubit(x: &CMat) -> Result<S1Result> {
    s1_exact_qubit_with_tol(x, sdp::DEFAULT_TOLERANCE)
}

/// [`s1_exact_qubit`] with a target duality gap.
pub fn s1_exact_qubit_with_tol(x: &CMat, tol: f64) -> Result<S1Result> {
    if x.rows() != 4 || x.cols() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "exact S(1)-norm needs a 4x4 operator, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let x = clamp_psd(x)?;
    let res = sdp::solve(&SdpInstance::new(x, (2, 2)).with_tolerance(tol))?;
    if !res.converged {
        return Err(Error::NonConvergence {
            iterations: res.iterations,
            gap: res.gap,
        });
    }
    Ok(S1Result {
        value: res.primal_value,
        lower: res.primal_value,
        upper: res.dual_bound,
        witness: None,
        exact: true,
    })
}

/// PPT-relaxation upper bound (the certified dual value of the SDP).
pub fn s1_ppt_upper(x: &CMat, n: usize) -> Result<f64> {
    s1_ppt_upper_with_tol(x, n, sdp::DEFAULT_TOLERANCE)
}

pub fn s1_ppt_upper_with_tol(x: &CMat, n: usize, tol: f64) -> Result<f64> {
    if local_dim(x)? != n {
        return Err(Error::DimensionMismatch(format!(
            "operator is {0}x{0}, not on C^{n} ⊗ C^{n}",
            x.rows()
        )));
    }
    let x = clamp_psd(x)?;
    let res = sdp::solve(&SdpInstance::new(x, (n, n)).with_tolerance(tol))?;
    Ok(res.dual_bound)
}

/// Objective history of a single see-saw run.
#[derive(Clone, Debug)]
pub struct SeesawRun {
    pub value: f64,
    pub phi: Vec<C64>,
    pub psi: Vec<C64>,
    pub history: Vec<f64>,
}

/// `(I ⊗ ⟨ψ|) X (I ⊗ |ψ⟩)`.
fn contract_second(x: &CMat, n: usize, psi: &[C64]) -> CMat {
    CMat::from_fn(n, n, |a, b| {
        let mut s = C64::new(0.0, 0.0);
        for p in 0..n {
            for q in 0..n {
                s += psi[p].conj() * x[(a * n + p, b * n + q)] * psi[q];
            }
        }
        s
    })
}

/// `(⟨φ| ⊗ I) X (|φ⟩ ⊗ I)`.
fn contract_first(x: &CMat, n: usize, phi: &[C64]) -> CMat {
    CMat::from_fn(n, n, |p, q| {
        let mut s = C64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                s += phi[a].conj() * x[(a * n + p, b * n + q)] * phi[b];
            }
        }
        s
    })
}

/// Alternating maximization from a starting `ψ`. Each half-step solves its
/// subproblem exactly (top eigenvector), so the objective never decreases.
pub fn seesaw_single(x: &CMat, n: usize, start_psi: &[C64], iters: usize) -> Result<SeesawRun> {
    let mut psi = start_psi.to_vec();
    let mut phi = vec![C64::new(0.0, 0.0); n];
    let mut history = Vec::with_capacity(2 * iters);
    let mut last = f64::NEG_INFINITY;
    for _ in 0..iters.max(1) {
        let e = herm_eig(&contract_second(x, n, &psi).hermitian_part())?;
        phi = e.vector(0);
        let e = herm_eig(&contract_first(x, n, &phi).hermitian_part())?;
        psi = e.vector(0);
        let v = product_value(x, &phi, &psi);
        history.push(v);
        if (v - last).abs() < SEESAW_CONVERGENCE {
            last = v;
            break;
        }
        last = v;
    }
    Ok(SeesawRun {
        value: last,
        phi,
        psi,
        history,
    })
}

/// Best see-saw value over `restarts` Fubini–Study random starts drawn from
/// `seed` (stream index = restart index). Ties go to the lowest restart.
pub fn s1_seesaw_lower(
    x: &CMat,
    n: usize,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<S1Result> {
    if local_dim(x)? != n {
        return Err(Error::DimensionMismatch(format!(
            "operator is {0}x{0}, not on C^{n} ⊗ C^{n}",
            x.rows()
        )));
    }
    let x = clamp_psd(x)?;
    let mut best: Option<SeesawRun> = None;
    for r in 0..restarts.max(1) {
        let mut rng = RngStream::new(seed, r as u64);
        let start = random_pure_state(n, &mut rng);
        let run = seesaw_single(&x, n, start.amplitudes(), iters)?;
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    let phi = PureState::normalized(best.phi)?;
    let psi = PureState::normalized(best.psi)?;
    let value = product_value(&x, phi.amplitudes(), psi.amplitudes());
    let upper = herm_eig(&x)?.max().max(value);
    Ok(S1Result {
        value,
        lower: value,
        upper,
        witness: Some((phi, psi)),
        exact: false,
    })
}

pub fn s1_seesaw_default(x: &CMat, n: usize, seed: u64) -> Result<S1Result> {
    s1_seesaw_lower(x, n, DEFAULT_RESTARTS, DEFAULT_ITERATIONS, seed)
}
