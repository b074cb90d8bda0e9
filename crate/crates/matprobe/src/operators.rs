//! Reference operators probed by the experiments: variable-media elliptic
//! operators in 1D/2D and the space-variant Gaussian blur (foveation), plus
//! operator utilities (dense assembly, generalized condition number,
//! nullspace filters).

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::numerics::{dft, singular_values, unit_phase, Cpx, Direction, Mat};
use crate::probing::NullspaceFilter;
use crate::symbol::DiscreteSymbol;

/// Largest size for which dense assembly (n applications of the operator) is
/// permitted; beyond this the matrix-free path must be used.
pub const DENSE_ASSEMBLY_LIMIT: usize = 2500;

/// Black-box linear operator on grid functions.
pub trait LinearOperator {
    fn apply(&self, u: &[Cpx]) -> Vec<Cpx>;

    /// Input/output length n.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Declared nullspace dimension (not detected numerically).
    fn nullity(&self) -> usize {
        0
    }

    /// Dense spatial-basis assembly, built column-by-column from canonical
    /// basis vectors. Capability-gated at desk scale.
    fn dense(&self) -> Result<Mat> {
        dense_from_apply(self)
    }
}

pub fn dense_from_apply<O: LinearOperator + ?Sized>(op: &O) -> Result<Mat> {
    let n = op.len();
    if n > DENSE_ASSEMBLY_LIMIT {
        return Err(Error::Capability(format!(
            "dense assembly of a {n}-dim operator exceeds the desk-scale limit {DENSE_ASSEMBLY_LIMIT}; use the matrix-free apply"
        )));
    }
    let mut m = Mat::zeros(n, n);
    let mut e = vec![Cpx::new(0.0, 0.0); n];
    for c in 0..n {
        e[c] = Cpx::new(1.0, 0.0);
        m.set_col(c, &op.apply(&e));
        e[c] = Cpx::new(0.0, 0.0);
    }
    Ok(m)
}

/// A dense matrix acting as an operator, with a declared nullity.
pub struct DenseOperator {
    matrix: Mat,
    nullity: usize,
}

impl DenseOperator {
    pub fn new(matrix: Mat, nullity: usize) -> Result<DenseOperator> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::Dimension("DenseOperator requires a square matrix".into()));
        }
        Ok(DenseOperator { matrix, nullity })
    }
}

impl LinearOperator for DenseOperator {
    fn apply(&self, u: &[Cpx]) -> Vec<Cpx> {
        self.matrix.mul_vec(u)
    }
    fn len(&self) -> usize {
        self.matrix.rows()
    }
    fn nullity(&self) -> usize {
        self.nullity
    }
    fn dense(&self) -> Result<Mat> {
        Ok(self.matrix.clone())
    }
}

/// Variable media for the elliptic operators of the experiments.
#[derive(Clone, Copy, Debug)]
pub enum EllipticMedia {
    /// α(x) = 1 + 0.4·cos(4πx) + 0.2·cos(6πx).
    OneDim,
    /// α(x) = 1/T + cos²(πγx₁)·sin²(πγx₂); T is the contrast, γ the
    /// roughness (the bandwidth of α is 2γ+1).
    TwoDim { contrast: f64, roughness: u32 },
}

impl EllipticMedia {
    pub fn dim(&self) -> usize {
        match self {
            EllipticMedia::OneDim => 1,
            EllipticMedia::TwoDim { .. } => 2,
        }
    }

    /// Media samples over the grid points. Positive everywhere by
    /// construction; validated anyway.
    pub fn sample(&self, grid: Grid) -> Result<Vec<f64>> {
        if grid.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "media dimension {} does not match grid dimension {}",
                self.dim(),
                grid.dim()
            )));
        }
        let n = grid.len();
        let alpha: Vec<f64> = match *self {
            EllipticMedia::OneDim => (0..n)
                .map(|i| {
                    let x = grid.point(i)[0];
                    1.0 + 0.4 * (4.0 * std::f64::consts::PI * x).cos()
                        + 0.2 * (6.0 * std::f64::consts::PI * x).cos()
                })
                .collect(),
            EllipticMedia::TwoDim { contrast, roughness } => {
                if contrast <= 0.0 {
                    return Err(Error::Validation("contrast T must be positive".into()));
                }
                if roughness < 1 || 2 * roughness as i64 > grid.band() * 2 {
                    return Err(Error::Validation(format!(
                        "roughness γ={roughness} must satisfy 1 ≤ γ ≤ ξ₀ = {}",
                        grid.band()
                    )));
                }
                let g = roughness as f64;
                (0..n)
                    .map(|i| {
                        let x = grid.point(i);
                        let c = (std::f64::consts::PI * g * x[0]).cos();
                        let s = (std::f64::consts::PI * g * x[1]).sin();
                        1.0 / contrast + c * c * s * s
                    })
                    .collect()
            }
        };
        if alpha.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::Validation("media must be positive on the grid".into()));
        }
        Ok(alpha)
    }
}

/// Spectral partial derivative along `axis`: transform, multiply by 2πiξ,
/// transform back. Exact for band-limited grid functions.
pub fn spectral_partial(values: &[Cpx], grid: Grid, axis: usize) -> Result<Vec<Cpx>> {
    if axis >= grid.dim() {
        return Err(Error::Validation(format!(
            "axis {axis} out of range for a {}-D grid",
            grid.dim()
        )));
    }
    if values.len() != grid.len() {
        return Err(Error::Dimension("spectral_partial: length mismatch".into()));
    }
    let shape = grid.shape();
    let mut hat = dft(values, &shape, Direction::Forward)?;
    for (ixi, h) in hat.iter_mut().enumerate() {
        let f = grid.frequency(ixi);
        *h *= Cpx::new(0.0, 2.0 * std::f64::consts::PI * f[axis] as f64);
    }
    dft(&hat, &shape, Direction::Inverse)
}

/// −∇·α∇ discretized through its sampled symbol
/// a(x,ξ) = 4π²‖ξ‖²·α(x) − Σ_k 2πi ξ_k ∂_kα(x) (derivatives spectral).
/// Annihilates constants exactly; nullity declared 1.
pub struct EllipticOperator {
    grid: Grid,
    alpha: Vec<f64>,
    grad_alpha: Vec<Vec<Cpx>>,
}

pub fn elliptic_operator(media: EllipticMedia, grid: Grid) -> Result<EllipticOperator> {
    let alpha = media.sample(grid)?;
    let alpha_c: Vec<Cpx> = alpha.iter().map(|&a| Cpx::new(a, 0.0)).collect();
    let mut grad_alpha = Vec::with_capacity(grid.dim());
    for axis in 0..grid.dim() {
        grad_alpha.push(spectral_partial(&alpha_c, grid, axis)?);
    }
    Ok(EllipticOperator { grid, alpha, grad_alpha })
}

impl EllipticOperator {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn media_samples(&self) -> &[f64] {
        &self.alpha
    }

    pub fn media_gradient(&self) -> &[Vec<Cpx>] {
        &self.grad_alpha
    }
}

impl LinearOperator for EllipticOperator {
    fn apply(&self, u: &[Cpx]) -> Vec<Cpx> {
        let n = self.grid.len();
        assert_eq!(u.len(), n, "elliptic apply: wrong vector length");
        let shape = self.grid.shape();
        let uh = dft(u, &shape, Direction::Forward).expect("lengths validated");
        let four_pi_sq = 4.0 * std::f64::consts::PI.powi(2);
        let lap_hat: Vec<Cpx> = uh
            .iter()
            .enumerate()
            .map(|(ixi, v)| v * (four_pi_sq * self.grid.frequency_norm_sqr(ixi)))
            .collect();
        let lap = dft(&lap_hat, &shape, Direction::Inverse).expect("lengths validated");
        let mut out: Vec<Cpx> =
            lap.iter().zip(&self.alpha).map(|(l, &a)| l * a).collect();
        for axis in 0..self.grid.dim() {
            let d_hat: Vec<Cpx> = uh
                .iter()
                .enumerate()
                .map(|(ixi, v)| {
                    let f = self.grid.frequency(ixi);
                    v * Cpx::new(0.0, 2.0 * std::f64::consts::PI * f[axis] as f64)
                })
                .collect();
            let du = dft(&d_hat, &shape, Direction::Inverse).expect("lengths validated");
            for ((o, d), g) in out.iter_mut().zip(&du).zip(&self.grad_alpha[axis]) {
                *o -= g * d;
            }
        }
        out
    }

    fn len(&self) -> usize {
        self.grid.len()
    }

    fn nullity(&self) -> usize {
        1
    }
}

/// The exact discrete symbol of `elliptic_operator` for the same media.
pub fn elliptic_symbol(media: EllipticMedia, grid: Grid) -> Result<DiscreteSymbol> {
    let op = elliptic_operator(media, grid)?;
    let four_pi_sq = 4.0 * std::f64::consts::PI.powi(2);
    let two_pi = 2.0 * std::f64::consts::PI;
    let n = grid.len();
    let values = Mat::from_fn(n, n, |ix, ixi| {
        let r2 = grid.frequency_norm_sqr(ixi);
        let f = grid.frequency(ixi);
        let mut v = Cpx::new(four_pi_sq * r2 * op.alpha[ix], 0.0);
        for axis in 0..grid.dim() {
            v -= op.grad_alpha[axis][ix] * Cpx::new(0.0, two_pi * f[axis] as f64);
        }
        v
    });
    DiscreteSymbol::new(grid, values)
}

/// Width-field specification for the foveation blur: w(x)² = a‖x−x₀‖² + b.
#[derive(Clone, Copy, Debug)]
pub struct FoveationSpec {
    pub fixation: [f64; 2],
    pub width_sq_slope: f64,
    pub width_sq_floor: f64,
}

impl FoveationSpec {
    pub fn new(fixation: [f64; 2], width_sq_slope: f64, width_sq_floor: f64) -> Result<FoveationSpec> {
        if width_sq_floor <= 0.0 || width_sq_slope < 0.0 {
            return Err(Error::Validation(
                "foveation widths require b > 0 and a ≥ 0 in w² = a‖x−x₀‖² + b".into(),
            ));
        }
        Ok(FoveationSpec { fixation, width_sq_slope, width_sq_floor })
    }

    /// Solve a, b from the width at the fixation point and at a reference
    /// point.
    pub fn from_widths(
        fixation: [f64; 2],
        w_at_fixation: f64,
        reference: [f64; 2],
        w_at_reference: f64,
    ) -> Result<FoveationSpec> {
        let d2 = (reference[0] - fixation[0]).powi(2) + (reference[1] - fixation[1]).powi(2);
        if d2 == 0.0 || w_at_fixation <= 0.0 || w_at_reference < w_at_fixation {
            return Err(Error::Validation("inconsistent foveation width specification".into()));
        }
        let b = w_at_fixation * w_at_fixation;
        let a = (w_at_reference * w_at_reference - b) / d2;
        FoveationSpec::new(fixation, a, b)
    }

    /// The reference widths w(x₀) = 0.003, w(1,1) = 0.012 at band 100,
    /// rescaled so the symbol's decay across the band is grid-invariant:
    /// w(x₀) = 0.3/ξ₀ and w(1,1) = 1.2/ξ₀.
    pub fn reference_for_grid(grid: Grid) -> Result<FoveationSpec> {
        let band = grid.band() as f64;
        FoveationSpec::from_widths([0.5, 0.5], 0.3 / band, [1.0, 1.0], 1.2 / band)
    }

    pub fn width_sq(&self, x: [f64; 2]) -> f64 {
        let d2 = (x[0] - self.fixation[0]).powi(2) + (x[1] - self.fixation[1]).powi(2);
        self.width_sq_slope * d2 + self.width_sq_floor
    }
}

/// Space-variant Gaussian blur with symbol a(x,ξ) = exp(−2π²w(x)²‖ξ‖²).
/// Applied directly from the symbol (O(n·n₁²) using its separability in the
/// two frequency axes); the DC mode passes through exactly.
pub struct FoveationOperator {
    grid: Grid,
    width_sq: Vec<f64>,
    // phase[i*n1+t] = e^{2πi (t-ξ₀) i / n₁}
    phase: Vec<Cpx>,
}

pub fn foveation_operator(spec: FoveationSpec, grid: Grid) -> Result<FoveationOperator> {
    if grid.dim() != 2 {
        return Err(Error::Validation("foveation operator requires a 2-D grid".into()));
    }
    let n = grid.len();
    let width_sq: Vec<f64> = (0..n).map(|ix| spec.width_sq(grid.point(ix))).collect();
    let n1 = grid.axis_len();
    let band = grid.band();
    let mut phase = vec![Cpx::new(0.0, 0.0); n1 * n1];
    for i in 0..n1 {
        for t in 0..n1 {
            let xi = t as i64 - band;
            phase[i * n1 + t] = unit_phase(xi as f64 * i as f64 / n1 as f64);
        }
    }
    Ok(FoveationOperator { grid, width_sq, phase })
}

impl FoveationOperator {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Symbol value a(x,ξ) for a (flat) point/frequency index pair.
    pub fn symbol_value(&self, ix: usize, ixi: usize) -> f64 {
        let r2 = self.grid.frequency_norm_sqr(ixi);
        (-2.0 * std::f64::consts::PI.powi(2) * self.width_sq[ix] * r2).exp()
    }

    /// Dense symbol table; desk scale only.
    pub fn symbol(&self) -> Result<DiscreteSymbol> {
        let n = self.grid.len();
        if n > DENSE_ASSEMBLY_LIMIT {
            return Err(Error::Capability(format!(
                "materializing a {n}×{n} foveation symbol exceeds the desk-scale limit"
            )));
        }
        let values = Mat::from_fn(n, n, |ix, ixi| Cpx::new(self.symbol_value(ix, ixi), 0.0));
        DiscreteSymbol::new(self.grid, values)
    }
}

impl LinearOperator for FoveationOperator {
    fn apply(&self, u: &[Cpx]) -> Vec<Cpx> {
        let n = self.grid.len();
        assert_eq!(u.len(), n, "foveation apply: wrong vector length");
        let n1 = self.grid.axis_len();
        let band = self.grid.band();
        let shape = self.grid.shape();
        let uh = dft(u, &shape, Direction::Forward).expect("lengths validated");
        let c = 2.0 * std::f64::consts::PI.powi(2);
        let mut out = vec![Cpx::new(0.0, 0.0); n];
        let mut f1 = vec![Cpx::new(0.0, 0.0); n1];
        let mut f2 = vec![Cpx::new(0.0, 0.0); n1];
        let mut partial = vec![Cpx::new(0.0, 0.0); n1];
        for ix in 0..n {
            let (i1, i2) = (ix / n1, ix % n1);
            let w2 = self.width_sq[ix];
            for t in 0..n1 {
                let xi = (t as i64 - band) as f64;
                let damp = (-c * w2 * xi * xi).exp();
                f1[t] = self.phase[i1 * n1 + t] * damp;
                f2[t] = self.phase[i2 * n1 + t] * damp;
            }
            // Σ_{t1,t2} f1[t1] f2[t2] û[t1,t2]
            for t1 in 0..n1 {
                let row = &uh[t1 * n1..(t1 + 1) * n1];
                let mut acc = Cpx::new(0.0, 0.0);
                for (a, b) in row.iter().zip(&f2) {
                    acc += a * b;
                }
                partial[t1] = acc;
            }
            let mut acc = Cpx::new(0.0, 0.0);
            for (a, b) in partial.iter().zip(&f1) {
                acc += a * b;
            }
            out[ix] = acc;
        }
        out
    }

    fn len(&self) -> usize {
        self.grid.len()
    }
}

/// Generalized condition number σ_max / σ_{(nullity+1)-th smallest} from a
/// dense SVD, skipping the declared nullspace.
pub fn condition_number(op: &dyn LinearOperator, nullity: usize) -> Result<f64> {
    let n = op.len();
    if nullity >= n {
        return Err(Error::Validation(format!("nullity {nullity} must be < dimension {n}")));
    }
    let sv = singular_values(&op.dense()?)?;
    let denom = sv[sv.len() - 1 - nullity];
    if denom == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(sv[0] / denom)
}

/// Filter for operators whose nullspace is the constants: u ↦ u − mean(u).
pub fn mean_filter(grid: Grid) -> NullspaceFilter {
    NullspaceFilter::SubtractMean { len: grid.len() }
}
