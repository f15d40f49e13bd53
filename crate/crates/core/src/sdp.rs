//! Dense interior-point solver for
//!
//! ```text
//! maximize  Tr(X ρ)
//! s.t.      ρ ⪰ 0,  Γ(ρ) ⪰ 0,  Tr ρ = 1
//! ```
//!
//! where `Γ` is the partial transpose on the second tensor factor.
//!
//! The trace constraint is eliminated by writing `ρ = I/m + Σ_k y_k B_k`
//! over an orthonormal basis of traceless Hermitian matrices. For a barrier
//! weight `μ` we minimize `−Tr(Xρ)/μ − log det ρ − log det Γ(ρ)` by damped
//! Newton steps, then halve `μ`.
//!
//! Dual: for any `W ⪰ 0`, `Tr(Xρ) ≤ λ_max(X + Γ(W))` on the feasible set.
//! Two certificates are tried after every centering:
//!
//! * `W = μ Γ(ρ)⁻¹` from the primal barrier center;
//! * `W` from a second path that minimizes `λ/μ − log det(λI − X − Γ(W)) −
//!   log det W` directly. Near a degenerate optimum `Γ(ρ)` has eigenvalues
//!   of order `μ` and inverting it loses about `1e-16/μ` of accuracy; the
//!   dual path carries `W` itself and does not.
//!
//! Both are projected onto the PSD cone and evaluated exactly, so
//! `dual_bound` is valid whether or not the run converges.

use crate::channel::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, herm_eig, herm_eig_with_tol, solve_spd, CMat, C64};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;

const MAX_NEWTON_STEPS: usize = 60;
const NEWTON_DECREMENT_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct SdpInstance {
    pub objective: CMat,
    pub local_dims: (usize, usize),
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl SdpInstance {
    pub fn new(objective: CMat, local_dims: (usize, usize)) -> Self {
        Self {
            objective,
            local_dims,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }
}

/// One outer iteration of the path-following loop.
#[derive(Clone, Copy, Debug)]
pub struct SdpIterate {
    pub mu: f64,
    pub primal_value: f64,
    pub dual_bound: f64,
    pub newton_steps: usize,
}

#[derive(Clone, Debug)]
pub struct SdpResult {
    pub primal_value: f64,
    pub primal_point: DensityMatrix,
    pub dual_bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trail: Vec<SdpIterate>,
}

/// Partial transpose of the second factor for an operator on `C^a ⊗ C^b`.
pub fn partial_transpose_second(m: &CMat, (a, b): (usize, usize)) -> CMat {
    let mut out = CMat::zeros(a * b, a * b);
    for i in 0..a {
        for j in 0..a {
            for p in 0..b {
                for q in 0..b {
                    out[(i * b + q, j * b + p)] = m[(i * b + p, j * b + q)];
                }
            }
        }
    }
    out
}

/// Orthonormal (Hilbert–Schmidt) basis of traceless Hermitian `m × m`
/// matrices.
fn traceless_basis(m: usize) -> Vec<CMat> {
    let mut basis = Vec::with_capacity(m * m - 1);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..m {
        for j in i + 1..m {
            let mut s = CMat::zeros(m, m);
            s[(i, j)] = C64::new(h, 0.0);
            s[(j, i)] = C64::new(h, 0.0);
            basis.push(s);
            let mut a = CMat::zeros(m, m);
            a[(i, j)] = C64::new(0.0, h);
            a[(j, i)] = C64::new(0.0, -h);
            basis.push(a);
        }
    }
    for k in 1..m {
        let norm = ((k * (k + 1)) as f64).sqrt();
        let mut d = CMat::zeros(m, m);
        for i in 0..k {
            d[(i, i)] = C64::new(1.0 / norm, 0.0);
        }
        d[(k, k)] = C64::new(-(k as f64) / norm, 0.0);
        basis.push(d);
    }
    basis
}

/// `m += Σ_k y_k A_k`
fn accumulate(m: &mut CMat, dirs: &[CMat], y: &[f64]) {
    for (&yk, ak) in y.iter().zip(dirs) {
        if yk != 0.0 {
            for (o, a) in m.as_mut_slice().iter_mut().zip(ak.as_slice()) {
                *o += a * yk;
            }
        }
    }
}

fn forward_solve(l: &CMat, b: &CMat) -> CMat {
    let n = l.rows();
    let mut x = b.clone();
    for c in 0..b.cols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

fn log_det_from_cholesky(l: &CMat) -> f64 {
    (0..l.rows()).map(|i| 2.0 * l[(i, i)].re.ln()).sum()
}

fn real_inner(a: &CMat, b: &CMat) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

fn inverse_from_cholesky(l: &CMat) -> CMat {
    let n = l.rows();
    let linv = forward_solve(l, &CMat::identity(n));
    linv.adjoint().matmul(&linv)
}

/// Linear matrix inequalities `M_j(y) = C_j + Σ_k y_k A_jk ≻ 0` with a
/// linear cost `c·y`, minimized along the log-det barrier path.
struct Lmi {
    blocks: Vec<(CMat, Vec<CMat>)>,
    cost: Vec<f64>,
}

struct Iterate {
    y: Vec<f64>,
    chol: Vec<CMat>,
}

impl Lmi {
    fn iterate(&self, y: Vec<f64>) -> Option<Iterate> {
        let mut chol = Vec::with_capacity(self.blocks.len());
        for (c, a) in &self.blocks {
            let mut m = c.clone();
            accumulate(&mut m, a, &y);
            chol.push(cholesky(&m)?);
        }
        Some(Iterate { y, chol })
    }

    fn cost(&self, y: &[f64]) -> f64 {
        self.cost.iter().zip(y).map(|(c, y)| c * y).sum()
    }

    fn barrier(&self, it: &Iterate, t: f64) -> f64 {
        t * self.cost(&it.y) - it.chol.iter().map(log_det_from_cholesky).sum::<f64>()
    }

    /// Newton step and squared decrement.
    fn newton(&self, it: &Iterate, t: f64) -> Option<(Vec<f64>, f64)> {
        let dim = self.cost.len();
        let mut h = vec![0.0; dim * dim];
        let mut g: Vec<f64> = self.cost.iter().map(|c| t * c).collect();
        for ((_, a), l) in self.blocks.iter().zip(&it.chol) {
            let linv = forward_solve(l, &CMat::identity(l.rows()));
            let linv_adj = linv.adjoint();
            let w: Vec<CMat> = a
                .iter()
                .map(|ak| linv.matmul(ak).matmul(&linv_adj))
                .collect();
            for k in 0..dim {
                g[k] -= w[k].trace().re;
                for j in 0..=k {
                    h[k * dim + j] += real_inner(&w[k], &w[j]);
                }
            }
        }
        for k in 0..dim {
            for j in 0..k {
                h[j * dim + k] = h[k * dim + j];
            }
        }
        // symmetric diagonal equilibration
        let scale: Vec<f64> = (0..dim).map(|k| 1.0 / h[k * dim + k].sqrt()).collect();
        for k in 0..dim {
            for j in 0..dim {
                h[k * dim + j] *= scale[k] * scale[j];
            }
        }
        let rhs: Vec<f64> = g.iter().zip(&scale).map(|(g, s)| -g * s).collect();
        // shift the diagonal if Cholesky breaks down near the boundary
        let z = solve_spd(&h, &rhs).or_else(|| {
            [1e-15, 1e-13, 1e-11, 1e-9].iter().find_map(|&delta| {
                let mut hd = h.clone();
                for k in 0..dim {
                    hd[k * dim + k] += delta;
                }
                solve_spd(&hd, &rhs)
            })
        })?;
        let step: Vec<f64> = z.iter().zip(&scale).map(|(z, s)| z * s).collect();
        let decrement = -step.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
        Some((step, decrement))
    }

    /// Centers at barrier weight `1/t`; returns the number of Newton steps.
    fn center(&self, it: &mut Iterate, t: f64) -> Result<usize> {
        for step in 0..MAX_NEWTON_STEPS {
            let (dir, dec) = self
                .newton(it, t)
                .ok_or_else(|| Error::Breakdown("singular Newton system".into()))?;
            if !dec.is_finite() {
                return Err(Error::Breakdown("non-finite Newton decrement".into()));
            }
            if dec / 2.0 <= NEWTON_DECREMENT_TOL {
                return Ok(step);
            }
            let f0 = self.barrier(it, t);
            let mut alpha = if dec.sqrt() > 0.25 {
                1.0 / (1.0 + dec.sqrt())
            } else {
                1.0
            };
            let mut accepted = false;
            for _ in 0..40 {
                let y: Vec<f64> = it.y.iter().zip(&dir).map(|(y, d)| y + alpha * d).collect();
                if let Some(q) = self.iterate(y) {
                    let f1 = self.barrier(&q, t);
                    if f1 <= f0 - 0.25 * alpha * dec || (dec < 1e-10 && f1 <= f0 + 1e-12 * f0.abs())
                    {
                        *it = q;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                // rounding floor: no further decrease is representable
                return Ok(step);
            }
        }
        Ok(MAX_NEWTON_STEPS)
    }
}

struct Certifier<'a> {
    objective: &'a CMat,
    dims: (usize, usize),
}

impl Certifier<'_> {
    /// `λ_max(X + Γ(W₊))` where `W₊` is the PSD part of `W`.
    fn bound(&self, w: &CMat) -> Result<f64> {
        let eig = herm_eig_with_tol(&w.hermitian_part(), f64::INFINITY)?;
        let clamped: Vec<f64> = eig.eigenvalues.iter().map(|&x| x.max(0.0)).collect();
        let w = eig.reconstruct_with(&clamped);
        let shifted = (self.objective + &partial_transpose_second(&w, self.dims)).hermitian_part();
        Ok(herm_eig_with_tol(&shifted, f64::INFINITY)?.max())
    }
}

fn combine(basis: &[CMat], offset: &CMat, y: &[f64]) -> CMat {
    let mut m = offset.clone();
    accumulate(&mut m, basis, y);
    m
}

/// Solves the PPT-constrained maximization.
pub fn solve(inst: &SdpInstance) -> Result<SdpResult> {
    let x = &inst.objective;
    let (a, b) = inst.local_dims;
    let m = a * b;
    if a == 0 || b == 0 || x.rows() != m || x.cols() != m {
        return Err(Error::DimensionMismatch(format!(
            "objective is {}x{}, local dims {a}x{b}",
            x.rows(),
            x.cols()
        )));
    }
    if m > 100 {
        return Err(Error::InvalidArgument(format!(
            "SDP dimension {m} exceeds the supported maximum of 100"
        )));
    }
    let dev = x.hermitian_deviation();
    if dev > 1e-10 {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let objective = x.hermitian_part();
    let dims = (a, b);
    let start = CMat::identity(m).scale_real(1.0 / m as f64);
    if m == 1 {
        let v = objective[(0, 0)].re;
        return Ok(SdpResult {
            primal_value: v,
            primal_point: DensityMatrix::new_unchecked(start),
            dual_bound: v,
            gap: 0.0,
            iterations: 0,
            converged: true,
            trail: Vec::new(),
        });
    }

    // primal: ρ = I/m + Σ y_k B_k
    let basis = traceless_basis(m);
    let basis_pt: Vec<CMat> = basis
        .iter()
        .map(|bk| partial_transpose_second(bk, dims))
        .collect();
    let primal = Lmi {
        blocks: vec![
            (start.clone(), basis.clone()),
            (start.clone(), basis_pt.clone()),
        ],
        cost: basis
            .iter()
            .map(|bk| -objective.trace_product(bk).re)
            .collect(),
    };
    let base_value = objective.trace().re / m as f64;

    // dual: variables (λ, w) with W = Σ w_k E_k over {I/√m} ∪ basis
    let full_basis: Vec<CMat> =
        std::iter::once(CMat::identity(m).scale_real(1.0 / (m as f64).sqrt()))
            .chain(basis.iter().cloned())
            .collect();
    let zero = CMat::zeros(m, m);
    let z_dirs: Vec<CMat> = std::iter::once(CMat::identity(m))
        .chain(
            full_basis
                .iter()
                .map(|e| -&partial_transpose_second(e, dims)),
        )
        .collect();
    let w_dirs: Vec<CMat> = std::iter::once(zero.clone())
        .chain(full_basis.iter().cloned())
        .collect();
    let mut dual_cost = vec![0.0; m * m + 1];
    dual_cost[0] = 1.0;
    let dual = Lmi {
        blocks: vec![(-&objective, z_dirs), (zero, w_dirs)],
        cost: dual_cost,
    };
    let cert = Certifier {
        objective: &objective,
        dims,
    };

    let eig = herm_eig(&objective)?;
    let scale = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()));
    let mut p = primal
        .iterate(vec![0.0; m * m - 1])
        .expect("I/m is strictly feasible");
    let mut y0 = vec![0.0; m * m + 1];
    y0[0] = eig.max() + 2.0;
    y0[1] = (m as f64).sqrt();
    let mut d = dual.iterate(y0).expect("W = I is strictly feasible");

    let mut mu = scale.max(1e-3);
    let mu_floor = scale.max(1.0) * 1e-15;
    let mut trail = Vec::new();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut best_dual = f64::INFINITY;
    let mut primal_alive = true;
    let mut dual_alive = true;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < inst.max_iterations {
        iterations += 1;
        let t = 1.0 / mu;
        let mut steps = 0;
        if primal_alive {
            match primal.center(&mut p, t) {
                Ok(s) => steps += s,
                Err(e) => {
                    if best.is_none() {
                        return Err(e);
                    }
                    primal_alive = false;
                }
            }
        }
        if dual_alive {
            match dual.center(&mut d, t) {
                Ok(s) => steps += s,
                Err(_) => dual_alive = false,
            }
        }
        let value = base_value - primal.cost(&p.y);
        let mut bound = f64::INFINITY;
        if primal_alive {
            let w = inverse_from_cholesky(&p.chol[1]).scale_real(mu);
            bound = bound.min(cert.bound(&w)?);
        }
        if dual_alive {
            let w = combine(&full_basis, &CMat::zeros(m, m), &d.y[1..]);
            bound = bound.min(cert.bound(&w)?);
        }
        best_dual = best_dual.min(bound);
        trail.push(SdpIterate {
            mu,
            primal_value: value,
            dual_bound: bound,
            newton_steps: steps,
        });
        if best.as_ref().is_none_or(|(bp, _)| value > *bp) {
            best = Some((value, p.y.clone()));
        }
        let best_primal = best.as_ref().map(|t| t.0).unwrap_or(value);
        if best_dual - best_primal <= inst.tolerance {
            converged = true;
            break;
        }
        if !(primal_alive || dual_alive) || mu < mu_floor {
            break;
        }
        mu *= 0.5;
    }

    let (primal_value, y) = best.expect("at least one iteration ran");
    let rho = combine(&basis, &start, &y).hermitian_part();
    let tr = rho.trace().re;
    let rho = rho.scale_real(1.0 / tr);
    let gap = best_dual - primal_value;
    Ok(SdpResult {
        primal_value,
        primal_point: DensityMatrix::new_unchecked(rho),
        dual_bound: best_dual,
        gap,
        iterations,
        converged,
        trail,
    })
}

/// Minimum eigenvalues of `ρ` and of its partial transpose.
pub fn feasibility_residuals(rho: &CMat, dims: (usize, usize)) -> Result<(f64, f64)> {
    let a = herm_eig_with_tol(rho, 1e-9)?.min();
    let b = herm_eig_with_tol(&partial_transpose_second(rho, dims), 1e-9)?.min();
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron_vec;
    use crate::sampling::{ginibre, random_pure_state, RngStream};
    use crate::symmetry::{flip, max_entangled};

    fn random_psd(m: usize, seed: u64) -> CMat {
        let g = ginibre(m, m, &mut RngStream::new(seed, 0));
        g.matmul(&g.adjoint())
    }

    #[test]
    fn basis_is_orthonormal_and_traceless() {
        let b = traceless_basis(4);
        assert_eq!(b.len(), 15);
        for (i, x) in b.iter().enumerate() {
            assert!(x.trace().norm() < 1e-15);
            assert!(x.is_hermitian(0.0));
            for (j, y) in b.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((real_inner(x, y) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn partial_transpose_of_max_entangled_is_flip() {
        let me = CMat::outer(max_entangled(3).amplitudes()).scale_real(3.0);
        assert!(partial_transpose_second(&me, (3, 3)).approx_eq(&flip(3), 1e-15));
        let x = random_psd(6, 1);
        let back = partial_transpose_second(&partial_transpose_second(&x, (2, 3)), (2, 3));
        assert!(back.approx_eq(&x, 0.0));
    }

    #[test]
    fn diagonal_objective() {
        let r = solve(&SdpInstance::new(
            CMat::diag_real(&[1.0, 2.0, 3.0, 4.0]),
            (2, 2),
        ))
        .unwrap();
        assert!(r.converged);
        assert!((r.primal_value - 4.0).abs() < 1e-8);
        assert!(r.dual_bound >= r.primal_value);
    }

    #[test]
    fn entangled_objective_hits_ppt_value() {
        let x = CMat::outer(max_entangled(2).amplitudes());
        let r = solve(&SdpInstance::new(x, (2, 2))).unwrap();
        assert!(r.converged);
        assert!((r.primal_value - 0.5).abs() < 1e-8);
        assert!((r.dual_bound - 0.5).abs() < 1e-8);
    }

    #[test]
    fn zero_objective() {
        let r = solve(&SdpInstance::new(CMat::zeros(4, 4), (2, 2))).unwrap();
        assert!(r.converged);
        assert!(r.primal_value.abs() < 1e-12 && r.dual_bound.abs() < 1e-9);
    }

    #[test]
    fn weak_duality_and_feasibility() {
        for seed in 0..5 {
            let x = random_psd(4, seed);
            let r = solve(&SdpInstance::new(x.clone(), (2, 2))).unwrap();
            assert!(r.converged, "gap {}", r.gap);
            assert!(r.gap <= 1e-9 && r.gap >= -1e-12);
            for it in &r.trail {
                assert!(it.dual_bound >= r.primal_value - 1e-12);
                assert!(it.dual_bound >= it.primal_value - 1e-12);
            }
            let (a, b) = feasibility_residuals(r.primal_point.mat(), (2, 2)).unwrap();
            assert!(a >= -1e-9 && b >= -1e-9);
            assert!((r.primal_point.mat().trace().re - 1.0).abs() < 1e-12);
            // product states are feasible, so they never beat the dual bound
            let mut rng = RngStream::new(seed, 1);
            for _ in 0..200 {
                let p = random_pure_state(2, &mut rng);
                let q = random_pure_state(2, &mut rng);
                let v = x.quad_form(&kron_vec(p.amplitudes(), q.amplitudes())).re;
                assert!(v <= r.dual_bound + 1e-12);
            }
        }
    }

    #[test]
    fn qutrit_pair() {
        let x = random_psd(9, 11);
        let r = solve(&SdpInstance::new(x, (3, 3))).unwrap();
        assert!(r.converged);
        let (a, b) = feasibility_residuals(r.primal_point.mat(), (3, 3)).unwrap();
        assert!(a >= -1e-9 && b >= -1e-9);
    }

    #[test]
    fn deterministic() {
        let x = random_psd(4, 3);
        let a = solve(&SdpInstance::new(x.clone(), (2, 2))).unwrap();
        let b = solve(&SdpInstance::new(x, (2, 2))).unwrap();
        assert_eq!(a.primal_value.to_bits(), b.primal_value.to_bits());
        assert_eq!(a.dual_bound.to_bits(), b.dual_bound.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(solve(&SdpInstance::new(CMat::zeros(4, 4), (2, 3))).is_err());
        let mut x = CMat::zeros(4, 4);
        x[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            solve(&SdpInstance::new(x, (2, 2))),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_unconverged() {
        let x = random_psd(4, 5);
        let r = solve(&SdpInstance::new(x, (2, 2)).with_max_iterations(3)).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
        assert!(r.dual_bound >= r.primal_value);
    }
}
