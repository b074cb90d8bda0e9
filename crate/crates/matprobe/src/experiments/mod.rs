//! Experiment harness behind the `matprobe` CLI: each command reproduces one
//! of the paper-style studies as a CSV table (deviation scaling, tail
//! probabilities, Chebyshev condition growth, probe runs, preconditioner
//! sweeps, order correction, foveation accuracy). Every run is reproducible
//! from the spec echoed in its CSV header; Monte Carlo trial i always draws
//! from the stream derived from (seed, i) no matter how trials are ordered.

mod chebcond;
mod foveate;
mod ordercorrect;
mod precond;
mod probe_run;
mod statstudy;
mod tail;

pub use chebcond::{run_chebcond, ChebCondConfig};
pub use foveate::{run_foveate, FoveateConfig, FoveateOutput};
pub use ordercorrect::{run_ordercorrect, OrderCorrectConfig};
pub use precond::{run_precond2d, PrecondConfig};
pub use probe_run::{run_probe, ProbeCmdConfig, ProbeCmdOutput, ProbeMode};
pub use statstudy::{run_statstudy, StatStudyConfig, StatStudyMode};
pub use tail::{run_tail, TailConfig};

use crate::basis::{
    gram_matrix, make_cheb1d_family, make_chebdisk_family, make_fourier_family, BasisFamily,
    FamilyKind,
};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::numerics::{
    dft, dot, hermitian_eigenvalues, Cpx, Direction, Mat, RandomStream, SequenceKind,
};
use crate::operators::{
    elliptic_operator, foveation_operator, EllipticMedia, FoveationSpec, LinearOperator,
};
use crate::probing::NullspaceFilter;

/// Operator selector shared by the probe-style commands.
#[derive(Clone, Copy, Debug)]
pub enum OperatorSpec {
    Elliptic1d,
    Elliptic2d { contrast: f64, roughness: u32 },
    Foveation,
}

impl OperatorSpec {
    pub fn dim(&self) -> usize {
        match self {
            OperatorSpec::Elliptic1d => 1,
            _ => 2,
        }
    }

    pub fn nullity(&self) -> usize {
        match self {
            OperatorSpec::Foveation => 0,
            _ => 1,
        }
    }

    pub fn build(&self, grid: Grid) -> Result<Box<dyn LinearOperator>> {
        match *self {
            OperatorSpec::Elliptic1d => {
                Ok(Box::new(elliptic_operator(EllipticMedia::OneDim, grid)?))
            }
            OperatorSpec::Elliptic2d { contrast, roughness } => Ok(Box::new(
                elliptic_operator(EllipticMedia::TwoDim { contrast, roughness }, grid)?,
            )),
            OperatorSpec::Foveation => Ok(Box::new(foveation_operator(
                FoveationSpec::reference_for_grid(grid)?,
                grid,
            )?)),
        }
    }

    /// Nullspace filter backward probing needs for this operator.
    pub fn filter(&self, grid: Grid) -> NullspaceFilter {
        match self {
            OperatorSpec::Foveation => NullspaceFilter::Identity,
            _ => crate::operators::mean_filter(grid),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            OperatorSpec::Elliptic1d => "elliptic1d".into(),
            OperatorSpec::Elliptic2d { contrast, roughness } => {
                format!("elliptic2d T={contrast} gamma={roughness}")
            }
            OperatorSpec::Foveation => "foveation".into(),
        }
    }
}

/// Family selector shared by the probe-style commands.
#[derive(Clone, Copy, Debug)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub j: usize,
    pub k: usize,
    pub k_angular: usize,
    pub order: f64,
    pub normalized: bool,
}

impl FamilySpec {
    pub fn build(&self, grid: Grid) -> Result<BasisFamily> {
        match self.kind {
            FamilyKind::Fourier => make_fourier_family(grid, self.j, self.k, self.order),
            FamilyKind::Cheb1d => make_cheb1d_family(grid, self.j, self.k, self.order),
            FamilyKind::ChebDisk => make_chebdisk_family(
                grid,
                self.j,
                self.k_angular,
                self.k,
                self.order,
                self.normalized,
            ),
        }
    }
}

/// One Monte Carlo sample of the deviation ‖M−N‖/‖N‖ for a family, where
/// M = L*L comes from a single random probe and N is the family Gram matrix.
pub(crate) struct DeviationSampler {
    family: BasisFamily,
    expected: Mat,
    expected_norm: f64,
}

impl DeviationSampler {
    pub fn new(family: BasisFamily) -> Result<DeviationSampler> {
        let expected = gram_matrix(&family)?.n_matrix;
        let expected_norm = hermitian_eigenvalues(&expected)?
            .iter()
            .fold(0.0f64, |acc, &x| acc.max(x.abs()));
        Ok(DeviationSampler { family, expected, expected_norm })
    }

    pub fn sample(&self, stream: &mut RandomStream, kind: SequenceKind) -> Result<f64> {
        let grid = self.family.grid();
        let n = grid.len();
        let p = self.family.len();
        let u = stream.draw_sequence(n, kind);
        let uh = dft(&u, &grid.shape(), Direction::Forward)?;
        let mut cols: Vec<Vec<Cpx>> = Vec::with_capacity(p);
        for j in 0..p {
            cols.push(self.family.apply_element_from_spectrum(j, &uh)?);
        }
        let mut m = Mat::zeros(p, p);
        for a in 0..p {
            for b in a..p {
                let v = dot(&cols[a], &cols[b]);
                m[(a, b)] = v;
                m[(b, a)] = v.conj();
            }
        }
        let diff = m.sub(&self.expected);
        let num = hermitian_eigenvalues(&diff)?.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
        Ok(num / self.expected_norm)
    }
}

pub(crate) fn make_fourier_family_1d(grid: Grid, side: usize) -> Result<BasisFamily> {
    make_fourier_family(grid, side, side, 0.0)
}

pub(crate) fn odd_square_side(p: usize) -> Result<usize> {
    let side = (p as f64).sqrt().round() as usize;
    if side * side != p || side % 2 == 0 {
        return Err(Error::Validation(format!("p = {p} must be an odd square (p = J², J odd)")));
    }
    Ok(side)
}

pub(crate) fn round_up_to_odd(x: f64) -> usize {
    let mut n = x.round() as usize;
    if n % 2 == 0 {
        n += 1;
    }
    n.max(3)
}
