//! Single probe runs from the CLI: forward or backward, any reference
//! operator against any family, with the full ProbeResult serialization and
//! (backward, desk scale) the preconditioner quality metrics.

use crate::error::Result;
use crate::operators::LinearOperator;
use crate::grid::Grid;
use crate::numerics::singular_values;
use crate::probing::{backward_probe, forward_probe, reconstruct, ProbeConfig, ProbeResult};
use crate::numerics::SequenceKind;

use super::{FamilySpec, OperatorSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeMode {
    Forward,
    Backward,
}

#[derive(Clone, Debug)]
pub struct ProbeCmdConfig {
    pub mode: ProbeMode,
    pub op: OperatorSpec,
    pub family: FamilySpec,
    pub n1: usize,
    pub q: usize,
    pub seed: u64,
    pub kind: SequenceKind,
    pub want_deviation: bool,
}

pub struct ProbeCmdOutput {
    pub result: ProbeResult,
    /// Full CSV text (coefficients plus diagnostics footer).
    pub csv: String,
    pub cond_a: Option<f64>,
    pub cond_ca: Option<f64>,
}

pub fn run_probe(cfg: &ProbeCmdConfig) -> Result<ProbeCmdOutput> {
    let grid = Grid::from_axis_len(cfg.op.dim(), cfg.n1)?;
    let op = cfg.op.build(grid)?;
    let family = cfg.family.build(grid)?;
    let mut pcfg = ProbeConfig::new(cfg.q, cfg.seed, cfg.kind);
    if cfg.want_deviation {
        pcfg = pcfg.with_deviation();
    }
    let result = match cfg.mode {
        ProbeMode::Forward => forward_probe(op.as_ref(), &family, &pcfg)?,
        ProbeMode::Backward => {
            let filter = cfg.op.filter(grid);
            backward_probe(op.as_ref(), &filter, &family, &pcfg)?
        }
    };

    let mut buf = Vec::new();
    {
        use std::io::Write;
        writeln!(&mut buf, "# operator: {}", cfg.op.describe())?;
        writeln!(
            &mut buf,
            "# mode: {}",
            if cfg.mode == ProbeMode::Forward { "forward" } else { "backward" }
        )?;
    }
    result.write_csv(&mut buf, &family.descriptor(), &pcfg)?;

    // backward mode reports the Fig-4 preconditioner metric when the dense
    // path is affordable
    let (mut cond_a, mut cond_ca) = (None, None);
    if cfg.mode == ProbeMode::Backward {
        let a_dense = op.dense()?;
        let nullity = cfg.op.nullity();
        let sv_a = singular_values(&a_dense)?;
        let ca = reconstruct(&family, &result.coefficients)?.dense()?.mul(&a_dense);
        let sv_ca = singular_values(&ca)?;
        let cond = |sv: &[f64]| -> f64 {
            let denom = sv[sv.len() - 1 - nullity];
            if denom == 0.0 {
                f64::INFINITY
            } else {
                sv[0] / denom
            }
        };
        let ca_val = cond(&sv_ca);
        let a_val = cond(&sv_a);
        cond_a = Some(a_val);
        cond_ca = Some(ca_val);
        use std::io::Write;
        writeln!(&mut buf, "# cond_A: {a_val:.16e}")?;
        writeln!(&mut buf, "# cond_CA: {ca_val:.16e}")?;
        writeln!(&mut buf, "# cond_ratio: {:.16e}", ca_val / a_val)?;
    }

    Ok(ProbeCmdOutput {
        result,
        csv: String::from_utf8(buf).expect("CSV output is UTF-8"),
        cond_a,
        cond_ca,
    })
}
