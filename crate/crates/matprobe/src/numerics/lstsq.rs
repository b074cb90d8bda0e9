//! Dense least squares. Householder QR with column pivoting; a column whose
//! pivot falls below 1e-12 times the largest pivot is treated as dependent,
//! in which case the minimal-norm solution is produced through the SVD.

use crate::error::{Error, Result};
use crate::numerics::{all_finite, svd, Cpx, Mat};

/// Relative pivot threshold for declaring a column dependent.
pub const RANK_RTOL: f64 = 1e-12;

pub struct LeastSquaresSolution {
    /// Minimizer of ‖Lc − b‖₂ (minimal-norm one when rank-deficient).
    pub coefficients: Vec<Cpx>,
    pub rank: usize,
    pub rank_deficient: bool,
}

/// Solve min ‖Lc − b‖₂ for overdetermined (rows ≥ cols) dense systems.
pub fn least_squares(l: &Mat, b: &[Cpx]) -> Result<LeastSquaresSolution> {
    let (m, n) = (l.rows(), l.cols());
    if m < n {
        return Err(Error::Dimension(format!(
            "least_squares: {m} rows < {n} cols"
        )));
    }
    if b.len() != m {
        return Err(Error::Dimension(format!(
            "least_squares: rhs length {} != {m} rows",
            b.len()
        )));
    }
    if !l.is_finite() || !all_finite(b) {
        return Err(Error::NonFinite("least_squares input"));
    }

    // column-major working copy
    let mut cols: Vec<Vec<Cpx>> = (0..n).map(|j| l.col(j)).collect();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut diag: Vec<Cpx> = vec![Cpx::new(0.0, 0.0); n];
    let mut rank = n;
    let mut first_pivot = 0.0f64;

    for k in 0..n {
        // pivot: remaining column with the largest trailing norm
        let mut best = k;
        let mut best_norm = trailing_norm_sqr(&cols[k], k);
        for j in k + 1..n {
            let nj = trailing_norm_sqr(&cols[j], k);
            if nj > best_norm {
                best = j;
                best_norm = nj;
            }
        }
        if best != k {
            cols.swap(k, best);
            perm.swap(k, best);
        }
        let norm = best_norm.sqrt();
        if k == 0 {
            first_pivot = norm;
        }
        if norm < RANK_RTOL * first_pivot || norm == 0.0 {
            rank = k;
            break;
        }
        // Householder reflector sending the trailing part of column k to α e_k,
        // α = -e^{i arg(x_k)}‖x‖; H = I - τ v v* with real τ = 2/(v*v).
        let xk = cols[k][k];
        let phase = if xk.norm() > 0.0 { xk / xk.norm() } else { Cpx::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let mut v = vec![Cpx::new(0.0, 0.0); m - k];
        for i in k..m {
            v[i - k] = cols[k][i];
        }
        v[0] -= alpha;
        let vsq: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        diag[k] = alpha;
        if vsq > 0.0 {
            let tau = 2.0 / vsq;
            for j in k + 1..n {
                reflect(&mut cols[j][k..], &v, tau);
            }
            reflect(&mut rhs[k..], &v, tau);
        }
        // store the reflector in the factored column
        for i in k..m {
            cols[k][i] = v[i - k];
        }
    }

    let rank_deficient = rank < n;
    if rank_deficient {
        // minimal-norm solution through the SVD of the original matrix
        let f = svd(l, true)?;
        let u = f.u.unwrap();
        let v = f.v.unwrap();
        let smax = f.values.first().copied().unwrap_or(0.0);
        let mut c = vec![Cpx::new(0.0, 0.0); n];
        for (idx, &s) in f.values.iter().enumerate() {
            if s <= RANK_RTOL * smax || s == 0.0 {
                continue;
            }
            let mut uy = Cpx::new(0.0, 0.0);
            for i in 0..m {
                uy += u[(i, idx)].conj() * b[i];
            }
            let w = uy / s;
            for i in 0..n {
                c[i] += v[(i, idx)] * w;
            }
        }
        return Ok(LeastSquaresSolution { coefficients: c, rank, rank_deficient });
    }

    // back-substitution on the R factor (R[k][j] lives in cols[j][k], j >= k)
    let mut y = vec![Cpx::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let mut acc = rhs[k];
        for j in k + 1..n {
            acc -= cols[j][k] * y[j];
        }
        y[k] = acc / diag[k];
    }
    let mut c = vec![Cpx::new(0.0, 0.0); n];
    for k in 0..n {
        c[perm[k]] = y[k];
    }
    Ok(LeastSquaresSolution { coefficients: c, rank, rank_deficient })
}

fn trailing_norm_sqr(col: &[Cpx], from: usize) -> f64 {
    col[from..].iter().map(|x| x.norm_sqr()).sum()
}

fn reflect(col: &mut [Cpx], v: &[Cpx], tau: f64) {
    let mut w = crate::numerics::dot(v, col);
    w *= tau;
    let (wr, wi) = (w.re, w.im);
    for (x, vi) in col.iter_mut().zip(v) {
        x.re -= vi.re * wr - vi.im * wi;
        x.im -= vi.re * wi + vi.im * wr;
    }
}

/// Cholesky factor of a Hermitian positive definite matrix, M = L L*.
pub struct Cholesky {
    lower: Mat,
}

/// Returns None when the matrix is not numerically positive definite.
pub fn cholesky(m: &Mat) -> Option<Cholesky> {
    let n = m.rows();
    if n != m.cols() {
        return None;
    }
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut acc = m[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            if i == j {
                let d = acc.re;
                if d <= 0.0 || !d.is_finite() {
                    return None;
                }
                l[(i, i)] = Cpx::new(d.sqrt(), 0.0);
            } else {
                l[(i, j)] = acc / l[(j, j)].re;
            }
        }
    }
    Some(Cholesky { lower: l })
}

impl Cholesky {
    /// Solve M x = y.
    pub fn solve(&self, y: &[Cpx]) -> Vec<Cpx> {
        let n = self.lower.rows();
        assert_eq!(y.len(), n);
        let mut z = y.to_vec();
        for i in 0..n {
            let mut acc = z[i];
            for k in 0..i {
                acc -= self.lower[(i, k)] * z[k];
            }
            z[i] = acc / self.lower[(i, i)].re;
        }
        for i in (0..n).rev() {
            let mut acc = z[i];
            for k in i + 1..n {
                acc -= self.lower[(k, i)].conj() * z[k];
            }
            z[i] = acc / self.lower[(i, i)].re;
        }
        z
    }
}
