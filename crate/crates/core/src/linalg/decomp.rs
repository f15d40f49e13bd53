use super::{CMat, C64, ONE, ZERO};

/// Lower-triangular Cholesky factor `L` with `a = L L†`, or `None` when `a`
/// is not (numerically) positive definite.
pub fn cholesky(a: &CMat) -> Option<CMat> {
    let n = a.rows();
    if !a.is_square() {
        return None;
    }
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Solves the real symmetric positive-definite system `a x = b` in place via
/// Cholesky. `a` is `n×n` row-major. Returns `None` on breakdown.
pub fn solve_spd(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    Some(y)
}

#[derive(Clone, Debug)]
pub struct QrDecomp {
    pub q: CMat,
    pub r: CMat,
}

/// Householder QR of a square matrix. `q` is unitary and `r` upper
/// triangular; no sign/phase normalization is applied.
pub fn householder_qr(a: &CMat) -> QrDecomp {
    let n = a.rows();
    assert!(a.is_square(), "householder_qr expects a square matrix");
    let mut r = a.clone();
    let mut q = CMat::identity(n);
    for k in 0..n.saturating_sub(1) {
        let norm_x: f64 = (k..n).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        // v = x + e^{i arg x0} ‖x‖ e_1
        let mut v: Vec<C64> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] += phase * norm_x;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // r ← (I − 2 v v†/‖v‖²) r
        for j in 0..n {
            let mut s = ZERO;
            for (t, vi) in v.iter().enumerate() {
                s += vi.conj() * r[(k + t, j)];
            }
            let s = s * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] -= vi * s;
            }
        }
        // q ← q (I − 2 v v†/‖v‖²)
        for i in 0..n {
            let mut s = ZERO;
            for (t, vi) in v.iter().enumerate() {
                s += q[(i, k + t)] * vi;
            }
            let s = s * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                q[(i, k + t)] -= s * vi.conj();
            }
        }
        for i in k + 1..n {
            r[(i, k)] = ZERO;
        }
    }
    QrDecomp { q, r }
}
