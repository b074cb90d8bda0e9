//! Separable symbol basis families B_jk with symbol e_j(x)·g_k(ξ)·⟨ξ⟩^m.
//! The factorized form gives an O(n log n) apply (FFT, multiply, inverse FFT,
//! multiply) and a Gram matrix that splits into a Kronecker product of two
//! small Gram matrices, from which the condition numbers κ and λ that govern
//! probing are cheap to evaluate.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::numerics::{
    dft, dot, hermitian_eigenvalues, singular_values, unit_phase, Cpx, Direction, Mat,
};
use crate::operators::LinearOperator;
use crate::symbol::DiscreteSymbol;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FamilyKind {
    Fourier,
    Cheb1d,
    ChebDisk,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Fourier => "fourier",
            FamilyKind::Cheb1d => "cheb1d",
            FamilyKind::ChebDisk => "chebdisk",
        }
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fourier" => Ok(FamilyKind::Fourier),
            "cheb1d" => Ok(FamilyKind::Cheb1d),
            "chebdisk" => Ok(FamilyKind::ChebDisk),
            other => Err(Error::Parse(format!(
                "unknown family kind {other:?} (expected fourier|cheb1d|chebdisk)"
            ))),
        }
    }
}

/// Chebyshev polynomial T_k by the three-term recurrence.
pub fn chebyshev_t(k: usize, x: f64) -> f64 {
    let x = x.clamp(-1.0, 1.0);
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0;
            let mut cur = x;
            for _ in 2..=k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// One separable element: symbol e(x)·g(ξ) with the order weight already
/// folded into g.
#[derive(Clone, Debug)]
pub struct SeparableBasisElement {
    grid: Grid,
    spatial_label: [i64; 2],
    frequency_label: [i64; 2],
    order: f64,
    e: Vec<Cpx>,
    g: Vec<Cpx>,
}

impl SeparableBasisElement {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn spatial_label(&self) -> [i64; 2] {
        self.spatial_label
    }

    pub fn frequency_label(&self) -> [i64; 2] {
        self.frequency_label
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn spatial_profile(&self) -> &[Cpx] {
        &self.e
    }

    pub fn frequency_profile(&self) -> &[Cpx] {
        &self.g
    }

    /// Apply via the factorization: FFT, multiply by g, inverse FFT,
    /// multiply by e. O(n log n).
    pub fn apply(&self, u: &[Cpx]) -> Result<Vec<Cpx>> {
        if u.len() != self.grid.len() {
            return Err(Error::Dimension(format!(
                "basis_apply: vector length {} != grid size {}",
                u.len(),
                self.grid.len()
            )));
        }
        let uh = dft(u, &self.grid.shape(), Direction::Forward)?;
        self.apply_from_spectrum(&uh)
    }

    /// Same as `apply` with the forward transform of the input already known.
    pub fn apply_from_spectrum(&self, uhat: &[Cpx]) -> Result<Vec<Cpx>> {
        let weighted: Vec<Cpx> = self.g.iter().zip(uhat).map(|(g, u)| g * u).collect();
        let mut out = dft(&weighted, &self.grid.shape(), Direction::Inverse)?;
        for (o, e) in out.iter_mut().zip(&self.e) {
            *o *= e;
        }
        Ok(out)
    }

    pub fn symbol(&self) -> DiscreteSymbol {
        let n = self.grid.len();
        let values = Mat::from_fn(n, n, |ix, ixi| self.e[ix] * self.g[ixi]);
        DiscreteSymbol::new(self.grid, values).expect("element profiles are finite")
    }

    /// Dense spatial-basis assembly (columns are applications to canonical
    /// vectors).
    pub fn dense(&self) -> Result<Mat> {
        let n = self.grid.len();
        let mut m = Mat::zeros(n, n);
        let mut e_col = vec![Cpx::new(0.0, 0.0); n];
        for c in 0..n {
            e_col[c] = Cpx::new(1.0, 0.0);
            m.set_col(c, &self.apply(&e_col)?);
            e_col[c] = Cpx::new(0.0, 0.0);
        }
        Ok(m)
    }

    pub fn frobenius_norm(&self) -> f64 {
        let n = self.grid.len() as f64;
        let ee: f64 = self.e.iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
        let gg: f64 = self.g.iter().map(|v| v.norm_sqr()).sum();
        (ee * gg).sqrt()
    }

    fn modulus_is_constant(&self) -> bool {
        let mx = self.e.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        let mn = self.e.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        mx - mn <= 1e-12 * mx.max(1.0)
    }

    /// Spectral norm: exact max|e|·max|g| when |e| is constant (the factor
    /// F diag(e) F⁻¹ is then a multiple of a unitary), dense SVD otherwise.
    pub fn spectral_norm(&self) -> Result<f64> {
        let max_e = self.e.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        let max_g = self.g.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        if self.modulus_is_constant() {
            return Ok(max_e * max_g);
        }
        Ok(singular_values(&self.dense()?)?[0])
    }

    /// Weak condition number λ(B) = ‖B‖·√n / ‖B‖_F.
    pub fn weak_condition_number(&self) -> Result<f64> {
        let fro = self.frobenius_norm();
        if fro == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(self.spectral_norm()? * (self.grid.len() as f64).sqrt() / fro)
    }
}

/// Ordered family {B_jk}; element index is spatial-major, lexicographic in
/// the (j,k) labels — the ordering coefficient vectors are exchanged in.
#[derive(Clone, Debug)]
pub struct BasisFamily {
    grid: Grid,
    kind: FamilyKind,
    order: f64,
    normalized: bool,
    j_count: usize,
    k_count: usize,
    k_angular: usize,
    spatial: Vec<([i64; 2], Vec<Cpx>)>,
    frequency: Vec<([i64; 2], Vec<Cpx>)>,
}

impl BasisFamily {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn spatial_count(&self) -> usize {
        self.spatial.len()
    }

    pub fn frequency_count(&self) -> usize {
        self.frequency.len()
    }

    /// Number of elements p.
    pub fn len(&self) -> usize {
        self.spatial.len() * self.frequency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spatial.is_empty() || self.frequency.is_empty()
    }

    pub fn element(&self, idx: usize) -> SeparableBasisElement {
        let nf = self.frequency.len();
        let (sj, sk) = (idx / nf, idx % nf);
        SeparableBasisElement {
            grid: self.grid,
            spatial_label: self.spatial[sj].0,
            frequency_label: self.frequency[sk].0,
            order: self.order,
            e: self.spatial[sj].1.clone(),
            g: self.frequency[sk].1.clone(),
        }
    }

    /// Apply element `idx` to a vector whose forward transform is `uhat`,
    /// without materializing the element.
    pub fn apply_element_from_spectrum(&self, idx: usize, uhat: &[Cpx]) -> Result<Vec<Cpx>> {
        let nf = self.frequency.len();
        let (sj, sk) = (idx / nf, idx % nf);
        let g = &self.frequency[sk].1;
        let e = &self.spatial[sj].1;
        let weighted: Vec<Cpx> = g.iter().zip(uhat).map(|(gv, u)| gv * u).collect();
        let mut out = dft(&weighted, &self.grid.shape(), Direction::Inverse)?;
        for (o, ev) in out.iter_mut().zip(e) {
            *o *= ev;
        }
        Ok(out)
    }

    /// One-line description echoed into CSV headers.
    pub fn descriptor(&self) -> String {
        let mut s = format!(
            "kind={} J={} K={} order={}",
            self.kind.name(),
            self.j_count,
            self.k_count,
            self.order
        );
        if self.kind == FamilyKind::ChebDisk {
            s.push_str(&format!(" K1={} normalized={}", self.k_angular, self.normalized));
        }
        s
    }
}

fn fourier_spatial_profiles(grid: Grid, j: usize) -> Result<Vec<([i64; 2], Vec<Cpx>)>> {
    if j % 2 == 0 {
        return Err(Error::Validation(format!("spatial count J must be odd, got {j}")));
    }
    if j > grid.axis_len() {
        return Err(Error::Validation(format!(
            "spatial count J={j} exceeds grid axis length {}",
            grid.axis_len()
        )));
    }
    let half = (j as i64 - 1) / 2;
    let labels: Vec<[i64; 2]> = if grid.dim() == 1 {
        (-half..=half).map(|a| [a, 0]).collect()
    } else {
        let mut v = Vec::new();
        for a in -half..=half {
            for b in -half..=half {
                v.push([a, b]);
            }
        }
        v
    };
    let n = grid.len();
    Ok(labels
        .into_iter()
        .map(|lab| {
            let e: Vec<Cpx> = (0..n)
                .map(|ix| {
                    let x = grid.point(ix);
                    unit_phase(lab[0] as f64 * x[0] + lab[1] as f64 * x[1])
                })
                .collect();
            (lab, e)
        })
        .collect())
}

/// Fourier expansion in both x and ξ: e_j(x) = e^{2πi j·x} and
/// g_k(ξ) = e^{2πi k·φ(ξ)} with φ(ξ) = (ξ+ξ₀)/(2ξ₀+1) per axis, times the
/// order weight ⟨ξ⟩^m. κ = λ = 1 when m = 0.
pub fn make_fourier_family(grid: Grid, j: usize, k: usize, m: f64) -> Result<BasisFamily> {
    let spatial = fourier_spatial_profiles(grid, j)?;
    if k % 2 == 0 {
        return Err(Error::Validation(format!("frequency count K must be odd, got {k}")));
    }
    if k > grid.axis_len() {
        return Err(Error::Validation(format!(
            "frequency count K={k} exceeds grid axis length {}",
            grid.axis_len()
        )));
    }
    let half = (k as i64 - 1) / 2;
    let labels: Vec<[i64; 2]> = if grid.dim() == 1 {
        (-half..=half).map(|a| [a, 0]).collect()
    } else {
        let mut v = Vec::new();
        for a in -half..=half {
            for b in -half..=half {
                v.push([a, b]);
            }
        }
        v
    };
    let n = grid.len();
    let n1 = grid.axis_len() as f64;
    let band = grid.band() as f64;
    let frequency = labels
        .into_iter()
        .map(|lab| {
            let g: Vec<Cpx> = (0..n)
                .map(|ixi| {
                    let f = grid.frequency(ixi);
                    let phi0 = (f[0] as f64 + band) / n1;
                    let phi1 = (f[1] as f64 + band) / n1;
                    unit_phase(lab[0] as f64 * phi0 + lab[1] as f64 * phi1)
                        * grid.order_weight(ixi, m)
                })
                .collect();
            (lab, g)
        })
        .collect();
    Ok(BasisFamily {
        grid,
        kind: FamilyKind::Fourier,
        order: m,
        normalized: false,
        j_count: j,
        k_count: k,
        k_angular: 1,
        spatial,
        frequency,
    })
}

/// 1D Chebyshev frequency expansion: the k-th profile is T_{k-1}(ξ/ξ₀)
/// (radial degrees 0..K-1), e_j as in the Fourier family.
pub fn make_cheb1d_family(grid: Grid, j: usize, k: usize, m: f64) -> Result<BasisFamily> {
    if grid.dim() != 1 {
        return Err(Error::Validation("cheb1d family requires a 1-D grid".into()));
    }
    if k < 1 {
        return Err(Error::Validation("frequency count K must be ≥ 1".into()));
    }
    let spatial = fourier_spatial_profiles(grid, j)?;
    let n = grid.len();
    let band = grid.band() as f64;
    let frequency = (1..=k as i64)
        .map(|label| {
            let deg = (label - 1) as usize;
            let g: Vec<Cpx> = (0..n)
                .map(|ixi| {
                    let f = grid.frequency(ixi);
                    Cpx::new(chebyshev_t(deg, f[0] as f64 / band), 0.0)
                        * grid.order_weight(ixi, m)
                })
                .collect();
            ([label, 0], g)
        })
        .collect();
    Ok(BasisFamily {
        grid,
        kind: FamilyKind::Cheb1d,
        order: m,
        normalized: false,
        j_count: j,
        k_count: k,
        k_angular: 1,
        spatial,
        frequency,
    })
}

/// "Chebyshev on a disk" frequency expansion for 2D grids:
/// g_(k₁,k₂)(ξ) = e^{i k₁ arg ξ} T_{k₂-1}(φ(‖ξ‖)), φ(r) = √2·r/ξ₀ − 1, with
/// angular labels k₁ ∈ -(K₁-1)/2..(K₁-1)/2 and radial degrees 0..K-1.
/// Elements with k₁ ≠ 0 annihilate the DC mode (arg 0 is undefined there).
/// `normalized` rescales every g to unit ℓ² norm over Ξ.
pub fn make_chebdisk_family(
    grid: Grid,
    j: usize,
    k_angular: usize,
    k: usize,
    m: f64,
    normalized: bool,
) -> Result<BasisFamily> {
    if grid.dim() != 2 {
        return Err(Error::Validation("chebdisk family requires a 2-D grid".into()));
    }
    if k_angular % 2 == 0 {
        return Err(Error::Validation(format!("angular count K1 must be odd, got {k_angular}")));
    }
    if k < 1 {
        return Err(Error::Validation("radial count K must be ≥ 1".into()));
    }
    let spatial = fourier_spatial_profiles(grid, j)?;
    let n = grid.len();
    let band = grid.band() as f64;
    let half = (k_angular as i64 - 1) / 2;
    let mut frequency = Vec::with_capacity(k_angular * k);
    for k1 in -half..=half {
        for k2 in 1..=k as i64 {
            let deg = (k2 - 1) as usize;
            let mut g: Vec<Cpx> = (0..n)
                .map(|ixi| {
                    let f = grid.frequency(ixi);
                    let r = ((f[0] * f[0] + f[1] * f[1]) as f64).sqrt();
                    let angular = if r == 0.0 {
                        if k1 == 0 {
                            Cpx::new(1.0, 0.0)
                        } else {
                            Cpx::new(0.0, 0.0)
                        }
                    } else {
                        let theta = (f[1] as f64).atan2(f[0] as f64);
                        Cpx::new(0.0, k1 as f64 * theta).exp()
                    };
                    let phi = std::f64::consts::SQRT_2 * r / band - 1.0;
                    angular * chebyshev_t(deg, phi) * grid.order_weight(ixi, m)
                })
                .collect();
            if normalized {
                let nrm = g.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                if nrm > 0.0 {
                    for v in g.iter_mut() {
                        *v /= nrm;
                    }
                }
            }
            frequency.push(([k1, k2], g));
        }
    }
    Ok(BasisFamily {
        grid,
        kind: FamilyKind::ChebDisk,
        order: m,
        normalized,
        j_count: j,
        k_count: k,
        k_angular,
        spatial,
        frequency,
    })
}

/// Gram data and the two condition numbers of a family.
#[derive(Clone, Debug)]
pub struct GramDiagnostics {
    /// N_{jk} = ⟨B_j, B_k⟩ (Frobenius inner products), p×p.
    pub n_matrix: Mat,
    /// Ratio of extreme eigenvalues of N.
    pub kappa: f64,
    /// max_j λ(B_j).
    pub lambda: f64,
    pub lambda_per_element: Vec<f64>,
}

/// Assemble the Gram matrix through the separable factorization
/// ⟨B_jk, B_j'k'⟩ = ⟨e_j, e_j'⟩·⟨g_k, g_k'⟩ (spatial inner products averaged
/// over X, frequency ones summed over Ξ), then read κ off the two factor
/// spectra.
pub fn gram_matrix(family: &BasisFamily) -> Result<GramDiagnostics> {
    let n = family.grid.len() as f64;
    let sj = family.spatial.len();
    let sk = family.frequency.len();
    let e_gram = Mat::from_fn(sj, sj, |a, b| {
        dot(&family.spatial[a].1, &family.spatial[b].1) / n
    });
    let g_gram = Mat::from_fn(sk, sk, |a, b| {
        dot(&family.frequency[a].1, &family.frequency[b].1)
    });
    let n_matrix = e_gram.kron(&g_gram);

    let ev_e = hermitian_eigenvalues(&e_gram)?;
    let ev_g = hermitian_eigenvalues(&g_gram)?;
    let (min_e, max_e) = (ev_e[0], ev_e[ev_e.len() - 1]);
    let (min_g, max_g) = (ev_g[0], ev_g[ev_g.len() - 1]);
    let kappa = if min_e > 0.0 && min_g > 0.0 {
        (max_e * max_g) / (min_e * min_g)
    } else {
        f64::INFINITY
    };

    let p = family.len();
    let mut lambda_per_element = Vec::with_capacity(p);
    for idx in 0..p {
        lambda_per_element.push(family.element(idx).weak_condition_number()?);
    }
    let lambda = lambda_per_element.iter().cloned().fold(0.0f64, f64::max);
    Ok(GramDiagnostics { n_matrix, kappa, lambda, lambda_per_element })
}

/// Conditioning of the transformed family B_A = {B_j A} that governs
/// backward probing, plus the effective weak condition number in which the
/// numerical rank of A replaces the ambient dimension.
#[derive(Clone, Debug)]
pub struct TransformedDiagnostics {
    pub n_matrix: Mat,
    pub kappa: f64,
    pub lambda: f64,
    pub lambda_per_element: Vec<f64>,
    /// Numerical rank ñ of A (singular values above 1e-10·σ_max).
    pub rank: usize,
    /// (ñ/n)^{1/2}·λ(B_A).
    pub lambda_effective: f64,
}

pub fn transformed_family(
    family: &BasisFamily,
    op: &dyn LinearOperator,
) -> Result<TransformedDiagnostics> {
    let n = family.grid.len();
    if op.len() != n {
        return Err(Error::Dimension(format!(
            "transformed_family: operator size {} != grid size {n}",
            op.len()
        )));
    }
    let a_dense = op.dense()?;
    let sv_a = singular_values(&a_dense)?;
    let smax = sv_a.first().copied().unwrap_or(0.0);
    let rank = sv_a.iter().filter(|&&s| s > 1e-10 * smax).count();

    // forward transforms of A's columns, shared by every element
    let shape = family.grid.shape();
    let mut col_hats: Vec<Vec<Cpx>> = Vec::with_capacity(n);
    for c in 0..n {
        col_hats.push(dft(&a_dense.col(c), &shape, Direction::Forward)?);
    }

    let p = family.len();
    let mut dense_elems: Vec<Mat> = Vec::with_capacity(p);
    for idx in 0..p {
        let mut m = Mat::zeros(n, n);
        for (c, col_hat) in col_hats.iter().enumerate() {
            m.set_col(c, &family.apply_element_from_spectrum(idx, col_hat)?);
        }
        dense_elems.push(m);
    }

    let mut n_matrix = Mat::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let v = dense_elems[a].frobenius_inner(&dense_elems[b]);
            n_matrix[(a, b)] = v;
            n_matrix[(b, a)] = v.conj();
        }
    }
    let ev = hermitian_eigenvalues(&n_matrix)?;
    let kappa = if ev[0] > 0.0 { ev[ev.len() - 1] / ev[0] } else { f64::INFINITY };

    let mut lambda_per_element = Vec::with_capacity(p);
    for m in &dense_elems {
        let fro = m.frobenius_norm();
        if fro == 0.0 {
            lambda_per_element.push(f64::INFINITY);
            continue;
        }
        let spec = singular_values(m)?[0];
        lambda_per_element.push(spec * (n as f64).sqrt() / fro);
    }
    let lambda = lambda_per_element.iter().cloned().fold(0.0f64, f64::max);
    let lambda_effective = (rank as f64 / n as f64).sqrt() * lambda;
    Ok(TransformedDiagnostics {
        n_matrix,
        kappa,
        lambda,
        lambda_per_element,
        rank,
        lambda_effective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c64, norm2, RandomStream, SequenceKind};

    fn random_vec(n: usize, seed: u64) -> Vec<Cpx> {
        let mut s = RandomStream::new(seed);
        let re = s.draw_sequence(n, SequenceKind::Gaussian);
        let im = s.draw_sequence(n, SequenceKind::Gaussian);
        re.iter().zip(&im).map(|(a, b)| c64(a.re, b.re)).collect()
    }

    #[test]
    fn chebyshev_recurrence_matches_cosine_form() {
        for k in 0..12 {
            for i in 0..=20 {
                let x = -1.0 + i as f64 / 10.0;
                let want = (k as f64 * x.acos()).cos();
                assert!((chebyshev_t(k, x) - want).abs() < 1e-12, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn trivial_fourier_family_is_identity() {
        let grid = Grid::new_1d(3).unwrap();
        let fam = make_fourier_family(grid, 1, 1, 0.0).unwrap();
        assert_eq!(fam.len(), 1);
        let u = random_vec(grid.len(), 1);
        let v = fam.element(0).apply(&u).unwrap();
        for (a, b) in v.iter().zip(&u) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn element_apply_matches_symbol_apply() {
        let grid = Grid::new_1d(6).unwrap();
        let fam = make_fourier_family(grid, 3, 3, -1.0).unwrap();
        let u = random_vec(grid.len(), 9);
        for idx in [0usize, 4, 8] {
            let el = fam.element(idx);
            let fast = el.apply(&u).unwrap();
            let via_symbol = el.symbol().apply(&u).unwrap();
            let err: f64 = fast
                .iter()
                .zip(&via_symbol)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err / norm2(&via_symbol).max(1e-30) < 1e-10);
        }
    }

    #[test]
    fn element_apply_matches_dense() {
        let grid = Grid::new_2d(2).unwrap();
        let fam = make_chebdisk_family(grid, 3, 3, 2, 0.0, false).unwrap();
        let u = random_vec(grid.len(), 4);
        let el = fam.element(7);
        let fast = el.apply(&u).unwrap();
        let dense = el.dense().unwrap().mul_vec(&u);
        let err: f64 =
            fast.iter().zip(&dense).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err / norm2(&dense).max(1e-30) < 1e-10);
    }

    #[test]
    fn order_two_weight_acts_as_negative_laplacian_scale() {
        // e ≡ 1, g = ‖ξ‖² applied to e^{2πix} multiplies by 1
        let grid = Grid::new_1d(5).unwrap();
        let fam = make_fourier_family(grid, 1, 1, 2.0).unwrap();
        let el = fam.element(0);
        let n = grid.len();
        let u: Vec<Cpx> = (0..n).map(|i| unit_phase(i as f64 / n as f64)).collect();
        let v = el.apply(&u).unwrap();
        for (a, b) in v.iter().zip(&u) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn fourier_family_gram_is_scaled_identity() {
        let grid = Grid::new_1d(25).unwrap();
        let fam = make_fourier_family(grid, 5, 5, 0.0).unwrap();
        assert_eq!(fam.len(), 25);
        let gd = gram_matrix(&fam).unwrap();
        let n = grid.len() as f64;
        for a in 0..25 {
            for b in 0..25 {
                let want = if a == b { c64(n, 0.0) } else { c64(0.0, 0.0) };
                assert!(
                    (gd.n_matrix[(a, b)] - want).norm() < 1e-10 * n,
                    "({a},{b}) = {}",
                    gd.n_matrix[(a, b)]
                );
            }
        }
        assert!((gd.kappa - 1.0).abs() < 1e-10);
        assert!((gd.lambda - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gram_matches_brute_force_dense() {
        let grid = Grid::new_1d(4).unwrap();
        let fam = make_cheb1d_family(grid, 3, 2, 0.0).unwrap();
        let gd = gram_matrix(&fam).unwrap();
        let p = fam.len();
        for a in 0..p {
            for b in 0..p {
                let da = fam.element(a).dense().unwrap();
                let db = fam.element(b).dense().unwrap();
                let want = da.frobenius_inner(&db);
                assert!(
                    (gd.n_matrix[(a, b)] - want).norm() <= 1e-9 * want.norm().max(1.0),
                    "({a},{b}): {} vs {want}",
                    gd.n_matrix[(a, b)]
                );
            }
        }
    }

    #[test]
    fn cheb1d_parity_orthogonality() {
        // degree-1 (odd) against degree-2 (even): zero by ξ ↔ -ξ symmetry
        let grid = Grid::new_1d(10).unwrap();
        let fam = make_cheb1d_family(grid, 1, 3, 0.0).unwrap();
        let gd = gram_matrix(&fam).unwrap();
        assert!(gd.n_matrix[(1, 2)].norm() < 1e-12);
    }

    #[test]
    fn cheb1d_gram_entries_match_integral_form() {
        // ⟨g_k, g_k'⟩ ∝ (1-(a+b)²)⁻¹ + (1-(a-b)²)⁻¹ for degrees a+b even
        let grid = Grid::new_1d(200).unwrap(); // n = 401
        let fam = make_cheb1d_family(grid, 1, 5, 0.0).unwrap();
        let gd = gram_matrix(&fam).unwrap();
        let integral = |a: i64, b: i64| -> f64 {
            let s = (a + b) as f64;
            let d = (a - b) as f64;
            1.0 / (1.0 - s * s) + 1.0 / (1.0 - d * d)
        };
        // the table index of degree d is d itself (labels 1..K map to
        // degrees 0..K-1); compare against a common constant on
        // even-degree-sum pairs
        let base = gd.n_matrix[(1, 1)].re / integral(1, 1);
        for (da, db) in [(1usize, 3usize), (2, 2), (2, 4), (3, 3), (4, 4), (1, 1)] {
            let got = gd.n_matrix[(da, db)].re;
            let want = base * integral(da as i64, db as i64);
            assert!(
                (got - want).abs() <= 0.05 * want.abs().max(base * 0.1),
                "degrees ({da},{db}): {got} vs {want}"
            );
        }
    }

    #[test]
    fn cheb1d_lambda_values() {
        let grid = Grid::new_1d(200).unwrap(); // n = 401 ≥ 201
        let fam = make_cheb1d_family(grid, 1, 10, 0.0).unwrap();
        let gd = gram_matrix(&fam).unwrap();
        // label k maps to degree k-1: the degree-1 profile sits at index 1
        let sqrt3 = 3.0f64.sqrt();
        assert!((gd.lambda_per_element[1] - sqrt3).abs() <= 0.02 * sqrt3);
        // high-degree profiles approach √2
        let sqrt2 = 2.0f64.sqrt();
        let last = gd.lambda_per_element[9];
        assert!((last - sqrt2).abs() <= 0.05 * sqrt2, "λ(T₉)={last}");
        // the family maximum is the degree-1 value
        assert!((gd.lambda - gd.lambda_per_element[1]).abs() < 1e-12);
    }

    #[test]
    fn chebdisk_dc_handling() {
        let grid = Grid::new_2d(3).unwrap();
        let fam = make_chebdisk_family(grid, 1, 3, 1, 0.0, false).unwrap();
        let dc = grid.frequency_index([0, 0]);
        for idx in 0..fam.len() {
            let el = fam.element(idx);
            let g = el.frequency_profile();
            if el.frequency_label()[0] != 0 {
                assert_eq!(g[dc], c64(0.0, 0.0));
            } else {
                assert!((g[dc] - c64(1.0, 0.0)).norm() < 1e-12); // T₀(φ(0)) = 1
            }
        }
    }

    #[test]
    fn normalized_chebdisk_has_constant_diagonal() {
        let grid = Grid::new_2d(5).unwrap();
        let fam = make_chebdisk_family(grid, 3, 3, 3, 0.0, true).unwrap();
        let gd = gram_matrix(&fam).unwrap();
        let d0 = gd.n_matrix[(0, 0)].re;
        for i in 0..fam.len() {
            assert!((gd.n_matrix[(i, i)].re - d0).abs() < 1e-9 * d0);
        }
    }

    #[test]
    fn wrong_parameters_rejected() {
        let g1 = Grid::new_1d(3).unwrap();
        let g2 = Grid::new_2d(3).unwrap();
        assert!(make_cheb1d_family(g2, 1, 2, 0.0).is_err());
        assert!(make_chebdisk_family(g1, 1, 1, 2, 0.0, false).is_err());
        assert!(make_chebdisk_family(g2, 1, 2, 2, 0.0, false).is_err());
        assert!(make_fourier_family(g1, 2, 1, 0.0).is_err());
        assert!(make_fourier_family(g1, 3, 9, 0.0).is_err());
    }

    #[test]
    fn spectral_norm_bounds_sandwich() {
        // non-constant |e| exercises the dense SVD path; the min-max bounds
        // min|e|min|g| ≤ σ ≤ max|e|max|g| must sandwich it
        let grid = Grid::new_1d(4).unwrap();
        let fam = make_fourier_family(grid, 3, 3, 0.0).unwrap();
        let mut el = fam.element(2);
        for (i, v) in el.e.iter_mut().enumerate() {
            *v *= c64(1.0 + 0.3 * (i as f64 / 9.0), 0.0);
        }
        let lo = el.e.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min)
            * el.g.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        let hi = el.e.iter().map(|v| v.norm()).fold(0.0f64, f64::max)
            * el.g.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        let got = el.spectral_norm().unwrap();
        assert!(got >= lo - 1e-10 && got <= hi + 1e-10, "{lo} ≤ {got} ≤ {hi}");
    }
}
