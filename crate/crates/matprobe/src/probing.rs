//! Forward and backward matrix probing. A probe draws random vectors
//! u₁,…,u_q, stacks the columns B_j·(probe input) into L and solves
//! Lc = (target side) in the least-squares sense; the recovered coefficients
//! expand the probed operator (forward) or its pseudoinverse (backward) in
//! the basis family. Every run reports the conditioning diagnostics that
//! theory says control recovery quality.

use std::io::Write;

use crate::basis::{gram_matrix, transformed_family, BasisFamily};
use crate::error::{Error, Result};
use crate::numerics::lstsq::{cholesky, least_squares};
use crate::numerics::{
    dft, dot, hermitian_eigenvalues, norm2, Cpx, Direction, Mat, RandomStream, SequenceKind,
};
use crate::operators::LinearOperator;
use crate::symbol::DiscreteSymbol;

/// Above this column count the least-squares solve goes through the normal
/// equations (the Gram matrix is needed for diagnostics anyway, and QR at
/// this size is not affordable on one core).
const QR_COLUMN_LIMIT: usize = 640;
/// Up to this size cond(L) uses exact Jacobi eigenvalues of the Gram matrix.
const EXACT_COND_LIMIT: usize = 320;

/// Projection applied to the probe vector in backward probing to remove
/// nullspace components of the probed operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NullspaceFilter {
    /// For invertible operators.
    Identity,
    /// For operators whose nullspace is the constants (periodic elliptic).
    SubtractMean { len: usize },
}

impl NullspaceFilter {
    pub fn apply(&self, u: &[Cpx]) -> Result<Vec<Cpx>> {
        match self {
            NullspaceFilter::Identity => Ok(u.to_vec()),
            NullspaceFilter::SubtractMean { len } => {
                if u.len() != *len {
                    return Err(Error::Dimension(format!(
                        "nullspace filter expects length {len}, got {}",
                        u.len()
                    )));
                }
                let mean: Cpx = u.iter().sum::<Cpx>() / u.len() as f64;
                Ok(u.iter().map(|x| x - mean).collect())
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ProbeConfig {
    /// Number of random probe vectors q.
    pub probes: usize,
    pub seed: u64,
    pub kind: SequenceKind,
    /// Also compute N = E[M] and the deviation ‖M−N‖/‖N‖ (costs a dense
    /// transformed-family assembly in backward mode).
    pub want_deviation: bool,
}

impl ProbeConfig {
    pub fn new(probes: usize, seed: u64, kind: SequenceKind) -> ProbeConfig {
        ProbeConfig { probes, seed, kind, want_deviation: false }
    }

    pub fn with_deviation(mut self) -> ProbeConfig {
        self.want_deviation = true;
        self
    }
}

#[derive(Clone, Debug)]
pub struct ProbeResult {
    /// Recovered expansion coefficients, one per family element.
    pub coefficients: Vec<Cpx>,
    /// cond(L) = √cond(L*L).
    pub cond_l: f64,
    /// ‖Lc − b‖ / ‖b‖ for the stacked system.
    pub relative_residual: f64,
    pub rank_deficient: bool,
    /// M = L*L.
    pub gram: Mat,
    /// N = E[M], when requested.
    pub expected_gram: Option<Mat>,
    /// ‖M − N‖ / ‖N‖ (spectral norms), when requested.
    pub deviation: Option<f64>,
    /// ℓ² norm of the stacked probe vector (enters the error bound).
    pub probe_norm: f64,
    /// Number of probe vectors the run used.
    pub probes: usize,
}

impl ProbeResult {
    /// CSV serialization: config echo in `#` comments, coefficient rows,
    /// diagnostics as trailing comments.
    pub fn write_csv<W: Write>(
        &self,
        w: &mut W,
        family_descriptor: &str,
        cfg: &ProbeConfig,
    ) -> Result<()> {
        writeln!(w, "# matprobe probe result")?;
        writeln!(w, "# family: {family_descriptor}")?;
        writeln!(w, "# q: {}", cfg.probes)?;
        writeln!(w, "# seed: {}", cfg.seed)?;
        writeln!(w, "# rng: {}", cfg.kind.name())?;
        writeln!(w, "index,re,im")?;
        for (i, c) in self.coefficients.iter().enumerate() {
            writeln!(w, "{i},{:.16e},{:.16e}", c.re, c.im)?;
        }
        writeln!(w, "# cond_L: {:.16e}", self.cond_l)?;
        writeln!(w, "# residual: {:.16e}", self.relative_residual)?;
        match self.deviation {
            Some(d) => writeln!(w, "# deviation: {d:.16e}")?,
            None => writeln!(w, "# deviation: n/a")?,
        }
        writeln!(w, "# rank_deficient: {}", self.rank_deficient)?;
        Ok(())
    }
}

fn validate(op: &dyn LinearOperator, family: &BasisFamily, cfg: &ProbeConfig) -> Result<()> {
    let n = family.grid().len();
    if op.len() != n {
        return Err(Error::Dimension(format!(
            "operator dimension {} does not match family grid size {n}",
            op.len()
        )));
    }
    if cfg.probes < 1 {
        return Err(Error::Validation("probe count q must be ≥ 1".into()));
    }
    let p = family.len();
    if n * cfg.probes < p {
        return Err(Error::Validation(format!(
            "underdetermined probe: n·q = {} < p = {p}; raise q",
            n * cfg.probes
        )));
    }
    Ok(())
}

/// Gram matrix M = L*L from the stacked columns.
fn gram_of_columns(columns: &[Vec<Cpx>]) -> Mat {
    let p = columns.len();
    let mut m = Mat::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let v = dot(&columns[a], &columns[b]);
            m[(a, b)] = v;
            m[(b, a)] = v.conj();
        }
    }
    m
}

/// cond(L) from M = L*L: exact eigenvalues for small p, power/inverse
/// iteration otherwise.
fn cond_from_gram(m: &Mat, chol: Option<&crate::numerics::lstsq::Cholesky>) -> Result<f64> {
    let p = m.rows();
    if p <= EXACT_COND_LIMIT {
        let ev = hermitian_eigenvalues(m)?;
        let (min, max) = (ev[0], ev[ev.len() - 1]);
        if min <= 0.0 {
            return Ok(f64::INFINITY);
        }
        return Ok((max / min).sqrt());
    }
    let start: Vec<Cpx> = (0..p)
        .map(|i| Cpx::new(1.0 + 0.01 * (i as f64).sin(), 0.0))
        .collect();
    let lambda_max = power_iteration(|v| m.mul_vec(v), &start, 300);
    let owned;
    let chol = match chol {
        Some(c) => c,
        None => match cholesky(m) {
            Some(c) => {
                owned = c;
                &owned
            }
            None => return Ok(f64::INFINITY),
        },
    };
    let lambda_min_inv = power_iteration(|v| chol.solve(v), &start, 300);
    if lambda_min_inv <= 0.0 || lambda_max <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((lambda_max * lambda_min_inv).sqrt())
}

fn power_iteration(matvec: impl Fn(&[Cpx]) -> Vec<Cpx>, start: &[Cpx], iters: usize) -> f64 {
    let mut v = start.to_vec();
    let mut norm = norm2(&v);
    if norm == 0.0 {
        return 0.0;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    let mut rayleigh = 0.0f64;
    for _ in 0..iters {
        let w = matvec(&v);
        let r = dot(&v, &w).re;
        norm = norm2(&w);
        if norm == 0.0 {
            return 0.0;
        }
        if (r - rayleigh).abs() <= 1e-12 * r.abs().max(1e-300) {
            return r;
        }
        rayleigh = r;
        v = w;
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    rayleigh
}

struct ProbeSystem {
    columns: Vec<Vec<Cpx>>,
    rhs: Vec<Cpx>,
    probe_norm: f64,
}

fn build_system(
    op: &dyn LinearOperator,
    family: &BasisFamily,
    cfg: &ProbeConfig,
    backward: Option<&NullspaceFilter>,
) -> Result<ProbeSystem> {
    let n = family.grid().len();
    let p = family.len();
    let q = cfg.probes;
    let shape = family.grid().shape();
    let mut columns: Vec<Vec<Cpx>> = vec![vec![Cpx::new(0.0, 0.0); n * q]; p];
    let mut rhs = vec![Cpx::new(0.0, 0.0); n * q];
    let mut probe_norm_sq = 0.0f64;
    for i in 0..q {
        let mut stream = RandomStream::substream(cfg.seed, i as u64);
        let u = stream.draw_sequence(n, cfg.kind);
        probe_norm_sq += u.iter().map(|x| x.norm_sqr()).sum::<f64>();
        let (col_source, rhs_block): (Vec<Cpx>, Vec<Cpx>) = match backward {
            None => (u.clone(), op.apply(&u)),
            Some(filter) => (op.apply(&u), filter.apply(&u)?),
        };
        let source_hat = dft(&col_source, &shape, Direction::Forward)?;
        for (j, col) in columns.iter_mut().enumerate() {
            let block = family.apply_element_from_spectrum(j, &source_hat)?;
            col[i * n..(i + 1) * n].copy_from_slice(&block);
        }
        rhs[i * n..(i + 1) * n].copy_from_slice(&rhs_block);
    }
    Ok(ProbeSystem { columns, rhs, probe_norm: probe_norm_sq.sqrt() })
}

fn solve_system(
    system: &ProbeSystem,
    family: &BasisFamily,
    op: &dyn LinearOperator,
    cfg: &ProbeConfig,
    backward: bool,
) -> Result<ProbeResult> {
    let p = system.columns.len();
    let rows = system.rhs.len();
    let gram = gram_of_columns(&system.columns);

    let (coefficients, rank_deficient, chol) = if p <= QR_COLUMN_LIMIT {
        let mut l = Mat::zeros(rows, p);
        for (j, col) in system.columns.iter().enumerate() {
            l.set_col(j, col);
        }
        let sol = least_squares(&l, &system.rhs)?;
        (sol.coefficients, sol.rank_deficient, None)
    } else {
        match cholesky(&gram) {
            Some(chol) => {
                let y: Vec<Cpx> =
                    system.columns.iter().map(|col| dot(col, &system.rhs)).collect();
                (chol.solve(&y), false, Some(chol))
            }
            None => {
                // numerically singular Gram: fall back to the pivoted QR path
                let mut l = Mat::zeros(rows, p);
                for (j, col) in system.columns.iter().enumerate() {
                    l.set_col(j, col);
                }
                let sol = least_squares(&l, &system.rhs)?;
                (sol.coefficients, sol.rank_deficient, None)
            }
        }
    };

    // residual through the stacked columns
    let mut fitted = vec![Cpx::new(0.0, 0.0); rows];
    for (c, col) in coefficients.iter().zip(&system.columns) {
        for (f, v) in fitted.iter_mut().zip(col) {
            *f += c * v;
        }
    }
    let diff: Vec<Cpx> = fitted.iter().zip(&system.rhs).map(|(a, b)| a - b).collect();
    let b_norm = norm2(&system.rhs);
    let relative_residual = if b_norm > 0.0 { norm2(&diff) / b_norm } else { 0.0 };

    let cond_l = cond_from_gram(&gram, chol.as_ref())?;

    let (expected_gram, deviation) = if cfg.want_deviation {
        let n_single = if backward {
            transformed_family(family, op)?.n_matrix
        } else {
            gram_matrix(family)?.n_matrix
        };
        let n_stacked = n_single.scaled(Cpx::new(cfg.probes as f64, 0.0));
        let diff = gram.sub(&n_stacked);
        let num = hermitian_eigenvalues(&diff)?
            .iter()
            .fold(0.0f64, |acc, &x| acc.max(x.abs()));
        let den = hermitian_eigenvalues(&n_stacked)?
            .iter()
            .fold(0.0f64, |acc, &x| acc.max(x.abs()));
        (Some(n_stacked), Some(if den > 0.0 { num / den } else { f64::INFINITY }))
    } else {
        (None, None)
    };

    Ok(ProbeResult {
        coefficients,
        cond_l,
        relative_residual,
        rank_deficient,
        gram,
        expected_gram,
        deviation,
        probe_norm: system.probe_norm,
        probes: cfg.probes,
    })
}

/// Probe A itself: columns B_j u_i against right-hand side A u_i.
pub fn forward_probe(
    op: &dyn LinearOperator,
    family: &BasisFamily,
    cfg: &ProbeConfig,
) -> Result<ProbeResult> {
    validate(op, family, cfg)?;
    let system = build_system(op, family, cfg, None)?;
    solve_system(&system, family, op, cfg, false)
}

/// Probe A⁺: draw u, compute v = Au, filter u onto nullspace(A)^⊥, and solve
/// for B_j v columns against the filtered u.
pub fn backward_probe(
    op: &dyn LinearOperator,
    filter: &NullspaceFilter,
    family: &BasisFamily,
    cfg: &ProbeConfig,
) -> Result<ProbeResult> {
    validate(op, family, cfg)?;
    let system = build_system(op, family, cfg, Some(filter))?;
    solve_system(&system, family, op, cfg, true)
}

/// The expansion Σ c_j B_j as an operator with an O(p·n log n) apply.
pub struct Expansion {
    family: BasisFamily,
    coefficients: Vec<Cpx>,
}

/// Bundle coefficients with their family.
pub fn reconstruct(family: &BasisFamily, coefficients: &[Cpx]) -> Result<Expansion> {
    if coefficients.len() != family.len() {
        return Err(Error::Dimension(format!(
            "coefficient count {} does not match family size {}",
            coefficients.len(),
            family.len()
        )));
    }
    Ok(Expansion { family: family.clone(), coefficients: coefficients.to_vec() })
}

impl Expansion {
    pub fn coefficients(&self) -> &[Cpx] {
        &self.coefficients
    }

    pub fn family(&self) -> &BasisFamily {
        &self.family
    }

    /// Symbol table of the expansion, Σ c_j e_j(x) g_j(ξ).
    pub fn symbol(&self) -> Result<DiscreteSymbol> {
        let n = self.family.grid().len();
        let mut values = Mat::zeros(n, n);
        for (idx, c) in self.coefficients.iter().enumerate() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let el = self.family.element(idx);
            let e = el.spatial_profile();
            let g = el.frequency_profile();
            for ix in 0..n {
                let row = values.row_mut(ix);
                let ce = c * e[ix];
                for (slot, gv) in row.iter_mut().zip(g) {
                    *slot += ce * gv;
                }
            }
        }
        DiscreteSymbol::new(self.family.grid(), values)
    }
}

impl LinearOperator for Expansion {
    fn apply(&self, u: &[Cpx]) -> Vec<Cpx> {
        let n = self.family.grid().len();
        assert_eq!(u.len(), n, "expansion apply: wrong vector length");
        let shape = self.family.grid().shape();
        let uh = dft(u, &shape, Direction::Forward).expect("length validated");
        let mut out = vec![Cpx::new(0.0, 0.0); n];
        for (idx, c) in self.coefficients.iter().enumerate() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let part = self
                .family
                .apply_element_from_spectrum(idx, &uh)
                .expect("element application is infallible at validated sizes");
            for (o, v) in out.iter_mut().zip(&part) {
                *o += c * v;
            }
        }
        out
    }

    fn len(&self) -> usize {
        self.family.grid().len()
    }

    /// Dense assembly through the symbol table: O(n² log n) instead of the
    /// O(p·n²·log n) column path.
    fn dense(&self) -> Result<Mat> {
        let n = self.family.grid().len();
        if n > crate::operators::DENSE_ASSEMBLY_LIMIT {
            return Err(Error::Capability(format!(
                "dense assembly of a {n}-dim expansion exceeds the desk-scale limit"
            )));
        }
        self.symbol()?.dense_spatial()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ErrorBoundReport {
    pub epsilon: f64,
    /// κ·‖M−N‖/‖N‖; the bound hypothesis requires t < 1.
    pub t: f64,
    pub kappa: f64,
    pub lambda: f64,
    /// ε·(1 + λ‖u‖√(κp/((1−t)·nq))).
    pub bound: f64,
    /// Dense ‖A − Σc_jB_j‖ (spectral).
    pub measured: f64,
    /// Bound hypothesis violated (t ≥ 1): no conclusion drawn.
    pub inconclusive: bool,
    pub within: bool,
}

/// Evaluate the reconstruction-error bound with its explicit constant and
/// compare against the measured dense error. Informative, not a gate: the
/// comparison allows an absolute floor of 1e-8·‖A‖ so the ε = 0 case is
/// meaningful in floating point.
pub fn error_bound_check(
    op: &dyn LinearOperator,
    family: &BasisFamily,
    result: &ProbeResult,
    epsilon: f64,
) -> Result<ErrorBoundReport> {
    let deviation = result.deviation.ok_or_else(|| {
        Error::Validation("error_bound_check needs a probe run with want_deviation".into())
    })?;
    let gd = gram_matrix(family)?;
    let kappa = gd.kappa;
    let lambda = gd.lambda;
    let t = kappa * deviation;

    let a_dense = op.dense()?;
    let c_dense = reconstruct(family, &result.coefficients)?.dense()?;
    let a_norm = crate::numerics::spectral::spectral_norm(&a_dense)?;
    let measured = crate::numerics::spectral::spectral_norm(&a_dense.sub(&c_dense))?;

    if t >= 1.0 || !t.is_finite() {
        return Ok(ErrorBoundReport {
            epsilon,
            t,
            kappa,
            lambda,
            bound: f64::INFINITY,
            measured,
            inconclusive: true,
            within: false,
        });
    }
    let p = family.len() as f64;
    let ambient = (family.grid().len() * result.probes) as f64;
    let bound = epsilon
        * (1.0
            + lambda * result.probe_norm * (kappa * p / ((1.0 - t) * ambient)).sqrt());
    let within = measured <= bound + 1e-8 * a_norm;
    Ok(ErrorBoundReport { epsilon, t, kappa, lambda, bound, measured, inconclusive: false, within })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::make_fourier_family;
    use crate::grid::Grid;
    use crate::numerics::{c64, singular_values};
    use crate::operators::DenseOperator;

    fn random_coeffs(p: usize, seed: u64) -> Vec<Cpx> {
        let mut s = RandomStream::new(seed);
        (0..p).map(|_| c64(s.gaussian(), s.gaussian())).collect()
    }

    #[test]
    fn recovers_single_element() {
        let grid = Grid::new_1d(20).unwrap();
        let family = make_fourier_family(grid, 3, 3, 0.0).unwrap();
        let mut d = vec![c64(0.0, 0.0); family.len()];
        d[0] = c64(1.0, 0.0);
        let a = reconstruct(&family, &d).unwrap();
        let cfg = ProbeConfig::new(1, 5, SequenceKind::Gaussian);
        let r = forward_probe(&a, &family, &cfg).unwrap();
        for (i, c) in r.coefficients.iter().enumerate() {
            let want = if i == 0 { 1.0 } else { 0.0 };
            assert!((c - c64(want, 0.0)).norm() < 1e-8, "i={i} c={c}");
        }
        assert!(r.relative_residual < 1e-10);
    }

    #[test]
    fn in_span_recovery_is_exact() {
        let grid = Grid::new_1d(50).unwrap();
        let family = make_fourier_family(grid, 3, 3, 0.0).unwrap();
        let d = random_coeffs(family.len(), 42);
        let a = reconstruct(&family, &d).unwrap();
        let cfg = ProbeConfig::new(1, 7, SequenceKind::Gaussian);
        let r = forward_probe(&a, &family, &cfg).unwrap();
        let err: f64 = r
            .coefficients
            .iter()
            .zip(&d)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale: f64 = d.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!(err / scale < 1e-8);
    }

    #[test]
    fn determinism_and_shared_first_probe() {
        let grid = Grid::new_1d(30).unwrap();
        let family = make_fourier_family(grid, 3, 3, 0.0).unwrap();
        let d = random_coeffs(family.len(), 1);
        let a = reconstruct(&family, &d).unwrap();
        let cfg = ProbeConfig::new(2, 99, SequenceKind::Rademacher);
        let r1 = forward_probe(&a, &family, &cfg).unwrap();
        let r2 = forward_probe(&a, &family, &cfg).unwrap();
        assert_eq!(r1.coefficients, r2.coefficients);
        assert_eq!(r1.cond_l, r2.cond_l);
        // q = 1 and q = 2 share their first probe vector by construction
        let mut s1 = RandomStream::substream(99, 0);
        let mut s2 = RandomStream::substream(99, 0);
        assert_eq!(
            s1.draw_sequence(10, SequenceKind::Rademacher),
            s2.draw_sequence(10, SequenceKind::Rademacher)
        );
    }

    #[test]
    fn cond_gram_is_cond_l_squared() {
        let grid = Grid::new_1d(40).unwrap();
        let family = make_fourier_family(grid, 3, 3, 0.0).unwrap();
        let d = random_coeffs(family.len(), 3);
        let a = reconstruct(&family, &d).unwrap();
        let cfg = ProbeConfig::new(1, 11, SequenceKind::Gaussian);
        let r = forward_probe(&a, &family, &cfg).unwrap();
        // independent route: SVD of the explicitly assembled L
        let n = grid.len();
        let mut stream = RandomStream::substream(11, 0);
        let u = stream.draw_sequence(n, SequenceKind::Gaussian);
        let uh = dft(&u, &grid.shape(), Direction::Forward).unwrap();
        let mut l = Mat::zeros(n, family.len());
        for j in 0..family.len() {
            l.set_col(j, &family.apply_element_from_spectrum(j, &uh).unwrap());
        }
        let sv = singular_values(&l).unwrap();
        let cond_l_direct = sv[0] / sv[sv.len() - 1];
        assert!(
            (r.cond_l - cond_l_direct).abs() <= 1e-6 * cond_l_direct,
            "{} vs {cond_l_direct}",
            r.cond_l
        );
    }

    #[test]
    fn gram_mean_approaches_expected() {
        let grid = Grid::new_1d(25).unwrap();
        let family = make_fourier_family(grid, 3, 3, 0.0).unwrap();
        let p = family.len();
        let n = grid.len() as f64;
        let d = random_coeffs(p, 8);
        let a = reconstruct(&family, &d).unwrap();
        let trials = 200;
        let mut mean = Mat::zeros(p, p);
        for t in 0..trials {
            let cfg = ProbeConfig::new(1, 10_000 + t as u64, SequenceKind::Gaussian);
            let r = forward_probe(&a, &family, &cfg).unwrap();
            mean = mean.add(&r.gram);
        }
        mean = mean.scaled(c64(1.0 / trials as f64, 0.0));
        for i in 0..p {
            for j in 0..p {
                if i == j {
                    assert!(
                        (mean[(i, j)].re - n).abs() <= 0.05 * n,
                        "diag {i}: {}",
                        mean[(i, j)].re
                    );
                } else {
                    assert!(
                        mean[(i, j)].norm() <= 5.0 * n / (trials as f64).sqrt(),
                        "off ({i},{j}): {}",
                        mean[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn underdetermined_probe_rejected() {
        let grid = Grid::new_1d(3).unwrap(); // n = 7
        let family = make_fourier_family(grid, 3, 3, 0.0).unwrap(); // p = 9
        let d = random_coeffs(family.len(), 2);
        let a = reconstruct(&family, &d).unwrap();
        let cfg = ProbeConfig::new(1, 1, SequenceKind::Gaussian);
        assert!(matches!(forward_probe(&a, &family, &cfg), Err(Error::Validation(_))));
        let cfg2 = ProbeConfig::new(2, 1, SequenceKind::Gaussian);
        assert!(forward_probe(&a, &family, &cfg2).is_ok());
    }

    #[test]
    fn backward_probe_scalar_inverse() {
        let grid = Grid::new_1d(10).unwrap();
        let n = grid.len();
        let family = make_fourier_family(grid, 1, 1, 0.0).unwrap();
        let two_i = DenseOperator::new(Mat::identity(n).scaled(c64(2.0, 0.0)), 0).unwrap();
        let cfg = ProbeConfig::new(1, 3, SequenceKind::Gaussian);
        let r = backward_probe(&two_i, &NullspaceFilter::Identity, &family, &cfg).unwrap();
        assert!((r.coefficients[0] - c64(0.5, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn backward_probe_recovers_in_span_inverse() {
        // invertible Fourier multiplier whose inverse is in the family span
        let grid = Grid::new_1d(15).unwrap();
        let family = make_fourier_family(grid, 1, 3, 0.0).unwrap();
        let d = vec![c64(0.15, 0.05), c64(1.0, 0.0), c64(-0.1, 0.1)];
        let inverse_target = reconstruct(&family, &d).unwrap();
        // A = (Σ d_k B_k)⁻¹ assembled densely
        let c_dense = inverse_target.dense().unwrap();
        let n = grid.len();
        let mut a_dense = Mat::zeros(n, n);
        for col in 0..n {
            let mut e = vec![c64(0.0, 0.0); n];
            e[col] = c64(1.0, 0.0);
            let sol = least_squares(&c_dense, &e).unwrap();
            a_dense.set_col(col, &sol.coefficients);
        }
        let a = DenseOperator::new(a_dense, 0).unwrap();
        let cfg = ProbeConfig::new(1, 21, SequenceKind::Gaussian);
        let r = backward_probe(&a, &NullspaceFilter::Identity, &family, &cfg).unwrap();
        for (got, want) in r.coefficients.iter().zip(&d) {
            assert!((got - want).norm() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn mean_filter_is_idempotent_projection() {
        let f = NullspaceFilter::SubtractMean { len: 64 };
        let mut s = RandomStream::new(17);
        let u = s.draw_sequence(64, SequenceKind::Gaussian);
        let once = f.apply(&u).unwrap();
        let mean: Cpx = once.iter().sum::<Cpx>() / 64.0;
        assert!(mean.norm() < 1e-14);
        let twice = f.apply(&once).unwrap();
        for (a, b) in twice.iter().zip(&once) {
            assert!((a - b).norm() < 1e-12);
        }
        let ones = vec![c64(1.0, 0.0); 64];
        assert!(norm2(&f.apply(&ones).unwrap()) < 1e-12);
    }

    #[test]
    fn reconstruct_dense_matches_element_sum() {
        let grid = Grid::new_1d(6).unwrap();
        let family = make_fourier_family(grid, 3, 3, 0.0).unwrap();
        let c = random_coeffs(family.len(), 31);
        let exp = reconstruct(&family, &c).unwrap();
        let dense = exp.dense().unwrap();
        let n = grid.len();
        let mut want = Mat::zeros(n, n);
        for (j, cj) in c.iter().enumerate() {
            want = want.add(&family.element(j).dense().unwrap().scaled(*cj));
        }
        assert!(dense.sub(&want).max_abs() < 1e-10 * want.max_abs());
    }

    #[test]
    fn reconstruct_action_matches_probed_operator() {
        let grid = Grid::new_1d(30).unwrap();
        let family = make_fourier_family(grid, 3, 3, 0.0).unwrap();
        let d = random_coeffs(family.len(), 4);
        let a = reconstruct(&family, &d).unwrap();
        let cfg = ProbeConfig::new(1, 9, SequenceKind::Gaussian);
        let r = forward_probe(&a, &family, &cfg).unwrap();
        let c = reconstruct(&family, &r.coefficients).unwrap();
        let mut s = RandomStream::new(77);
        for _ in 0..10 {
            let u = s.draw_sequence(grid.len(), SequenceKind::Gaussian);
            let av = a.apply(&u);
            let cv = c.apply(&u);
            let err: f64 =
                av.iter().zip(&cv).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            assert!(err / norm2(&av) < 1e-7);
        }
    }

    #[test]
    fn error_bound_in_span_case() {
        let grid = Grid::new_1d(25).unwrap();
        let family = make_fourier_family(grid, 3, 3, 0.0).unwrap();
        let d = random_coeffs(family.len(), 12);
        let a = reconstruct(&family, &d).unwrap();
        let cfg = ProbeConfig::new(1, 5, SequenceKind::Gaussian).with_deviation();
        let r = forward_probe(&a, &family, &cfg).unwrap();
        let report = error_bound_check(&a, &family, &r, 0.0).unwrap();
        assert!(!report.inconclusive);
        assert!(report.bound.abs() < 1e-12);
        assert!(report.measured <= 1e-8 * 10.0);
        assert!(report.within);
    }

    #[test]
    fn error_bound_perturbed_case() {
        let grid = Grid::new_1d(30).unwrap();
        let n = grid.len();
        let family = make_fourier_family(grid, 3, 3, 0.0).unwrap();
        let d = random_coeffs(family.len(), 13);
        let clean = reconstruct(&family, &d).unwrap().dense().unwrap();
        let mut s = RandomStream::new(14);
        let raw = Mat::from_fn(n, n, |_, _| c64(s.gaussian(), s.gaussian()));
        let spec = singular_values(&raw).unwrap()[0];
        let eps = 1e-3;
        let perturbed = clean.add(&raw.scaled(c64(eps / spec, 0.0)));
        let a = DenseOperator::new(perturbed, 0).unwrap();
        let cfg = ProbeConfig::new(1, 15, SequenceKind::Gaussian).with_deviation();
        let r = forward_probe(&a, &family, &cfg).unwrap();
        let report = error_bound_check(&a, &family, &r, eps).unwrap();
        assert!(!report.inconclusive, "t = {}", report.t);
        assert!(report.within, "measured {} > bound {}", report.measured, report.bound);
    }

    #[test]
    fn error_bound_inconclusive_when_p_near_n() {
        // p = 25 against n = 27 puts the deviation well above 1/κ
        let grid = Grid::new_1d(13).unwrap();
        let family = make_fourier_family(grid, 5, 5, 0.0).unwrap();
        let d = random_coeffs(family.len(), 20);
        let a = reconstruct(&family, &d).unwrap();
        let cfg = ProbeConfig::new(1, 2, SequenceKind::Gaussian).with_deviation();
        let r = forward_probe(&a, &family, &cfg).unwrap();
        let report = error_bound_check(&a, &family, &r, 0.0).unwrap();
        assert!(report.inconclusive, "t = {}", report.t);
    }

    #[test]
    fn probe_csv_round_trips_config_echo() {
        let grid = Grid::new_1d(10).unwrap();
        let family = make_fourier_family(grid, 1, 3, 0.0).unwrap();
        let d = random_coeffs(family.len(), 2);
        let a = reconstruct(&family, &d).unwrap();
        let cfg = ProbeConfig::new(1, 4, SequenceKind::Gaussian);
        let r = forward_probe(&a, &family, &cfg).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf, &family.descriptor(), &cfg).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# family: kind=fourier"));
        assert!(text.contains("# seed: 4"));
        assert!(text.lines().filter(|l| !l.starts_with('#')).count() == family.len() + 1);
    }
}
