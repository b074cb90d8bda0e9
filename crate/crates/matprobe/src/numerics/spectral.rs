//! Eigen/singular value computation: cyclic Jacobi for Hermitian matrices and
//! one-sided Jacobi for the SVD. Both are plain O(n³)-per-sweep methods that
//! are accurate at desk scale (n up to a couple thousand) without any
//! external dependency.

use crate::error::{Error, Result};
use crate::numerics::{dot, Cpx, Mat};

const HERMITIAN_RTOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 60;

/// 2x2 complex rotation G diagonalizing the Hermitian block [[a, c], [c̄, b]]
/// (a, b real) in the sense that G* H G is diagonal. Returned as
/// (g11, g12, g21, g22); g11 and g12 are real-valued.
fn hermitian_rotation(a: f64, b: f64, c: Cpx) -> (Cpx, Cpx, Cpx, Cpx) {
    let abs_c = c.norm();
    let phase = c / abs_c; // e^{iφ}
    let tau = (b - a) / (2.0 * abs_c);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    let e = phase.conj(); // e^{-iφ}
    (
        Cpx::new(cs, 0.0),
        Cpx::new(sn, 0.0),
        -sn * e,
        cs * e,
    )
}

/// Eigenvalues of a Hermitian matrix, ascending. The input must be Hermitian
/// to within 1e-12 relative; it is symmetrized before factorization.
pub fn hermitian_eigenvalues(m: &Mat) -> Result<Vec<f64>> {
    if m.rows() != m.cols() {
        return Err(Error::Dimension(format!(
            "hermitian_eigenvalues: matrix is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("hermitian_eigenvalues input"));
    }
    let scale = m.max_abs();
    let dev = m.hermitian_deviation();
    if scale > 0.0 && dev > HERMITIAN_RTOL * scale {
        return Err(Error::NotHermitian { deviation: dev / scale });
    }
    let n = m.rows();
    let mut h = Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);

    let fro = h.frobenius_norm();
    if fro == 0.0 || n == 1 {
        let mut ev: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        return Ok(ev);
    }

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off += h[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-14 * fro {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let c = h[(p, q)];
                if c.norm() <= 1e-300 {
                    continue;
                }
                let (g11, g12, g21, g22) =
                    hermitian_rotation(h[(p, p)].re, h[(q, q)].re, c);
                // columns p, q
                for i in 0..n {
                    let hip = h[(i, p)];
                    let hiq = h[(i, q)];
                    h[(i, p)] = hip * g11 + hiq * g21;
                    h[(i, q)] = hip * g12 + hiq * g22;
                }
                // rows p, q
                for i in 0..n {
                    let hpi = h[(p, i)];
                    let hqi = h[(q, i)];
                    h[(p, i)] = g11.conj() * hpi + g21.conj() * hqi;
                    h[(q, i)] = g12.conj() * hpi + g22.conj() * hqi;
                }
            }
        }
    }

    let mut ev: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(ev)
}

/// Spectral norm (largest |eigenvalue|) of a Hermitian matrix.
pub fn hermitian_spectral_norm(m: &Mat) -> Result<f64> {
    let ev = hermitian_eigenvalues(m)?;
    Ok(ev.iter().fold(0.0f64, |acc, &x| acc.max(x.abs())))
}

pub struct Svd {
    /// Singular values, descending.
    pub values: Vec<f64>,
    pub u: Option<Mat>,
    pub v: Option<Mat>,
}

/// One-sided Jacobi SVD. For `rows < cols` the factorization runs on the
/// adjoint and U/V are swapped back.
pub fn svd(a: &Mat, want_vectors: bool) -> Result<Svd> {
    if !a.is_finite() {
        return Err(Error::NonFinite("svd input"));
    }
    if a.rows() < a.cols() {
        let s = svd(&a.adjoint(), want_vectors)?;
        return Ok(Svd { values: s.values, u: s.v, v: s.u });
    }
    let m = a.rows();
    let n = a.cols();
    // column-major working copy
    let mut cols: Vec<Vec<Cpx>> = (0..n).map(|j| a.col(j)).collect();
    let mut norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x.norm_sqr()).sum()).collect();
    let mut v: Option<Vec<Vec<Cpx>>> = if want_vectors {
        Some((0..n).map(|j| {
            let mut e = vec![Cpx::new(0.0, 0.0); n];
            e[j] = Cpx::new(1.0, 0.0);
            e
        }).collect())
    } else {
        None
    };

    let tol = 1e-14f64;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = 0usize;
        for i in 0..n.saturating_sub(1) {
            for j in i + 1..n {
                let (ni, nj) = (norms[i], norms[j]);
                if ni == 0.0 || nj == 0.0 {
                    continue;
                }
                let c = dot(&cols[i], &cols[j]);
                if c.norm() <= tol * (ni * nj).sqrt() {
                    continue;
                }
                rotated += 1;
                let (g11, g12, g21, g22) = hermitian_rotation(ni, nj, c);
                // g11, g12 are real; fold the norm update into the rotation pass
                let (c1, c2) = (g11.re, g12.re);
                let mut ni_new = 0.0f64;
                let mut nj_new = 0.0f64;
                {
                    let (lo, hi) = cols.split_at_mut(j);
                    let ci = &mut lo[i];
                    let cj = &mut hi[0];
                    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                        let xi = *x;
                        let yj = *y;
                        let nx = Cpx::new(
                            c1 * xi.re + g21.re * yj.re - g21.im * yj.im,
                            c1 * xi.im + g21.re * yj.im + g21.im * yj.re,
                        );
                        let ny = Cpx::new(
                            c2 * xi.re + g22.re * yj.re - g22.im * yj.im,
                            c2 * xi.im + g22.re * yj.im + g22.im * yj.re,
                        );
                        ni_new += nx.re * nx.re + nx.im * nx.im;
                        nj_new += ny.re * ny.re + ny.im * ny.im;
                        *x = nx;
                        *y = ny;
                    }
                }
                norms[i] = ni_new;
                norms[j] = nj_new;
                if let Some(vv) = v.as_mut() {
                    let (lo, hi) = vv.split_at_mut(j);
                    let vi = &mut lo[i];
                    let vj = &mut hi[0];
                    for (x, y) in vi.iter_mut().zip(vj.iter_mut()) {
                        let xi = *x;
                        let yj = *y;
                        *x = xi * g11 + yj * g21;
                        *y = xi * g12 + yj * g22;
                    }
                }
            }
        }
        if rotated == 0 {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());
    let values: Vec<f64> = order.iter().map(|&j| norms[j].sqrt()).collect();

    if !want_vectors {
        return Ok(Svd { values, u: None, v: None });
    }
    let mut u_mat = Mat::zeros(m, n);
    let mut v_mat = Mat::zeros(n, n);
    let vv = v.unwrap();
    for (slot, &j) in order.iter().enumerate() {
        let s = values[slot];
        if s > 0.0 {
            let inv = 1.0 / s;
            for i in 0..m {
                u_mat[(i, slot)] = cols[j][i] * inv;
            }
        }
        for i in 0..n {
            v_mat[(i, slot)] = vv[j][i];
        }
    }
    Ok(Svd { values, u: Some(u_mat), v: Some(v_mat) })
}

/// Singular values, descending. Satisfies ‖A‖_F² = Σ σ_i².
pub fn singular_values(a: &Mat) -> Result<Vec<f64>> {
    Ok(svd(a, false)?.values)
}

/// Largest singular value.
pub fn spectral_norm(a: &Mat) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c64, RandomStream, SequenceKind};

    fn random_mat(rows: usize, cols: usize, seed: u64) -> Mat {
        let mut s = RandomStream::new(seed);
        Mat::from_fn(rows, cols, |_, _| c64(s.gaussian(), s.gaussian()))
    }

    fn random_hermitian(n: usize, seed: u64) -> Mat {
        let a = random_mat(n, n, seed);
        a.add(&a.adjoint()).scaled(c64(0.5, 0.0))
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = Mat::diag(&[c64(5.0, 0.0), c64(-1.0, 0.0), c64(2.0, 0.0)]);
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert_eq!(ev.len(), 3);
        for (got, want) in ev.iter().zip([-1.0, 2.0, 5.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_identity() {
        let ev = hermitian_eigenvalues(&Mat::identity(3)).unwrap();
        for v in ev {
            assert!((v - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let m = random_hermitian(5, 11);
        let ev = hermitian_eigenvalues(&m).unwrap();
        let sum: f64 = ev.iter().sum();
        let tr = m.trace().re;
        assert!((sum - tr).abs() <= 1e-10 * tr.abs().max(1.0));
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = random_hermitian(4, 3);
        m[(0, 1)] += c64(1e-3, 0.0);
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn singular_values_of_diagonal() {
        let m = Mat::diag(&[c64(3.0, 0.0), c64(1.0, 0.0), c64(2.0, 0.0)]);
        let sv = singular_values(&m).unwrap();
        for (got, want) in sv.iter().zip([3.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_values_of_all_ones() {
        let m = Mat::from_fn(3, 3, |_, _| c64(1.0, 0.0));
        let sv = singular_values(&m).unwrap();
        assert!((sv[0] - 3.0).abs() < 1e-12);
        assert!(sv[1].abs() < 1e-12 && sv[2].abs() < 1e-12);
    }

    #[test]
    fn frobenius_identity() {
        let a = random_mat(6, 4, 5);
        let sv = singular_values(&a).unwrap();
        let sum_sq: f64 = sv.iter().map(|s| s * s).sum();
        let fro_sq = a.frobenius_norm().powi(2);
        assert!((sum_sq - fro_sq).abs() <= 1e-10 * fro_sq);
    }

    #[test]
    fn svd_matches_eigenvalues_of_gram() {
        let a = random_mat(8, 5, 17);
        let sv = singular_values(&a).unwrap();
        let gram = a.adjoint().mul(&a);
        let ev = hermitian_eigenvalues(&gram).unwrap();
        let mut from_eig: Vec<f64> = ev.iter().map(|e| e.max(0.0).sqrt()).collect();
        from_eig.reverse();
        for (s, e) in sv.iter().zip(from_eig) {
            assert!((s - e).abs() <= 1e-8 * s.max(1.0), "s={s} e={e}");
        }
    }

    #[test]
    fn svd_reconstructs_matrix() {
        let a = random_mat(7, 4, 23);
        let f = svd(&a, true).unwrap();
        let u = f.u.unwrap();
        let v = f.v.unwrap();
        let sigma = Mat::diag(&f.values.iter().map(|&s| c64(s, 0.0)).collect::<Vec<_>>());
        let back = u.mul(&sigma).mul(&v.adjoint());
        assert!(back.sub(&a).max_abs() < 1e-12 * a.max_abs().max(1.0));
    }

    #[test]
    fn wide_matrix_svd() {
        let a = random_mat(4, 9, 31);
        let sv = singular_values(&a).unwrap();
        let sv_t = singular_values(&a.adjoint()).unwrap();
        for (x, y) in sv.iter().zip(&sv_t) {
            assert!((x - y).abs() < 1e-10 * x.max(1.0));
        }
    }
}
