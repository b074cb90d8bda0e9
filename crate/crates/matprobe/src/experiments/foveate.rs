//! Forward probing of the foveation operator on an image: sweep the Fourier
//! family size J = K and tabulate the relative ℓ² error of the recovered
//! operator's action on the image, alongside the blurred reference and the
//! per-J approximations.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::io::pgm::{read_pgm, Image};
use crate::io::{Table, Value};
use crate::numerics::{norm2, Cpx, SequenceKind};
use crate::operators::{foveation_operator, FoveationSpec, LinearOperator};
use crate::probing::{forward_probe, reconstruct, ProbeConfig};

#[derive(Clone, Debug)]
pub struct FoveateConfig {
    pub image: PathBuf,
    pub j_list: Vec<usize>,
    pub q: usize,
    pub seed: u64,
    pub kind: SequenceKind,
}

pub struct FoveateOutput {
    pub table: Table,
    /// The reference A·z (blurred image).
    pub blurred: Image,
    /// One recovered C·z per J in the sweep.
    pub approximations: Vec<(usize, Image)>,
}

pub fn run_foveate(cfg: &FoveateConfig) -> Result<FoveateOutput> {
    let img = read_pgm(&cfg.image)?;
    if img.width != img.height {
        return Err(Error::Validation(format!(
            "foveation image must be square, got {}x{}",
            img.width, img.height
        )));
    }
    let grid = Grid::from_axis_len(2, img.width)?;
    let n = grid.len();
    let spec = FoveationSpec::reference_for_grid(grid)?;
    let op = foveation_operator(spec, grid)?;
    let z: Vec<Cpx> = img.pixels.iter().map(|&v| Cpx::new(v, 0.0)).collect();
    let az = op.apply(&z);
    let az_norm = norm2(&az);

    let mut table = Table::new(&["J", "p", "relative_error"]);
    table.comment("matprobe foveate".to_string());
    table.comment(format!(
        "image={} n1={} J={:?} q={} seed={} rng={} w_center={:.6e} w_corner={:.6e}",
        cfg.image.display(),
        img.width,
        cfg.j_list,
        cfg.q,
        cfg.seed,
        cfg.kind.name(),
        spec.width_sq([0.5, 0.5]).sqrt(),
        spec.width_sq([1.0, 1.0]).sqrt()
    ));

    let blurred = Image::new(img.width, img.height, az.iter().map(|v| v.re).collect())?;
    let mut approximations = Vec::new();
    for &j in &cfg.j_list {
        let family = crate::basis::make_fourier_family(grid, j, j, 0.0)?;
        let pcfg = ProbeConfig::new(cfg.q, cfg.seed, cfg.kind);
        let r = forward_probe(&op, &family, &pcfg)?;
        let c = reconstruct(&family, &r.coefficients)?;
        let cz = c.apply(&z);
        let err: f64 = cz
            .iter()
            .zip(&az)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / az_norm;
        table.push_row(vec![
            Value::Int(j as i64),
            Value::Int(family.len() as i64),
            Value::Float(err),
        ]);
        approximations.push((
            j,
            Image::new(img.width, img.height, cz.iter().map(|v| v.re).collect())?,
        ));
        debug_assert_eq!(cz.len(), n);
    }
    Ok(FoveateOutput { table, blurred, approximations })
}
