//! Order-correction study: κ(B_A) and λ(B_A) of the transformed family
//! across the order weight m and the grid size. The minimum at the negated
//! operator order is what keeps backward probing well conditioned.

use crate::basis::transformed_family;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::io::{Table, Value};

use super::{FamilySpec, OperatorSpec};

#[derive(Clone, Debug)]
pub struct OrderCorrectConfig {
    pub orders: Vec<f64>,
    pub n1_list: Vec<usize>,
    pub op: OperatorSpec,
    pub family: FamilySpec,
}

pub fn run_ordercorrect(cfg: &OrderCorrectConfig) -> Result<Table> {
    if cfg.orders.is_empty() || cfg.n1_list.is_empty() {
        return Err(Error::Validation("ordercorrect needs m and n sweeps".into()));
    }
    let mut table =
        Table::new(&["m", "n1", "kappa", "lambda", "lambda_effective", "rank"]);
    table.comment("matprobe ordercorrect".to_string());
    table.comment(format!(
        "operator={} family_kind={} J={} K={} K1={} m={:?} n1={:?}",
        cfg.op.describe(),
        cfg.family.kind.name(),
        cfg.family.j,
        cfg.family.k,
        cfg.family.k_angular,
        cfg.orders,
        cfg.n1_list
    ));
    for &n1 in &cfg.n1_list {
        let grid = Grid::from_axis_len(cfg.op.dim(), n1)?;
        let op = cfg.op.build(grid)?;
        for &m in &cfg.orders {
            let mut spec = cfg.family;
            spec.order = m;
            let family = spec.build(grid)?;
            let diag = transformed_family(&family, op.as_ref())?;
            table.push_row(vec![
                Value::Float(m),
                Value::Int(n1 as i64),
                Value::Float(diag.kappa),
                Value::Float(diag.lambda),
                Value::Float(diag.lambda_effective),
                Value::Int(diag.rank as i64),
            ]);
        }
    }
    Ok(table)
}
