//! κ and λ of the Chebyshev families as the polynomial count K grows; in 2D
//! the normalized variant (unit-norm frequency profiles) is tabulated next
//! to the plain one.

use crate::basis::{gram_matrix, make_cheb1d_family, make_chebdisk_family};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::io::{linear_fit, Table, Value};

#[derive(Clone, Debug)]
pub struct ChebCondConfig {
    pub dim: usize,
    pub n1: usize,
    pub k_list: Vec<usize>,
    /// Spatial count J (the spatial factor is orthonormal, so κ does not
    /// depend on it; λ is per-element anyway).
    pub j: usize,
    /// Angular count K₁ for the 2D family.
    pub k_angular: usize,
}

pub fn run_chebcond(cfg: &ChebCondConfig) -> Result<Table> {
    if cfg.k_list.is_empty() {
        return Err(Error::Validation("chebcond needs at least one K".into()));
    }
    let grid = Grid::from_axis_len(cfg.dim, cfg.n1)?;
    let mut table = if cfg.dim == 1 {
        Table::new(&["K", "kappa", "lambda"])
    } else {
        Table::new(&["K", "kappa", "lambda", "kappa_normalized", "lambda_normalized"])
    };
    table.comment("matprobe chebcond".to_string());
    table.comment(format!(
        "dim={} n1={} J={} K1={} K={:?}",
        cfg.dim, cfg.n1, cfg.j, cfg.k_angular, cfg.k_list
    ));

    let mut log_k = Vec::new();
    let mut log_kappa = Vec::new();
    for &k in &cfg.k_list {
        if cfg.dim == 1 {
            let fam = make_cheb1d_family(grid, cfg.j, k, 0.0)?;
            let gd = gram_matrix(&fam)?;
            log_k.push((k as f64).ln());
            log_kappa.push(gd.kappa.ln());
            table.push_row(vec![
                Value::Int(k as i64),
                Value::Float(gd.kappa),
                Value::Float(gd.lambda),
            ]);
        } else {
            let fam = make_chebdisk_family(grid, cfg.j, cfg.k_angular, k, 0.0, false)?;
            let gd = gram_matrix(&fam)?;
            let fam_n = make_chebdisk_family(grid, cfg.j, cfg.k_angular, k, 0.0, true)?;
            let gd_n = gram_matrix(&fam_n)?;
            log_k.push((k as f64).ln());
            log_kappa.push(gd.kappa.ln());
            table.push_row(vec![
                Value::Int(k as i64),
                Value::Float(gd.kappa),
                Value::Float(gd.lambda),
                Value::Float(gd_n.kappa),
                Value::Float(gd_n.lambda),
            ]);
        }
    }
    if log_k.len() >= 2 {
        let (slope, _) = linear_fit(&log_k, &log_kappa);
        table.footer(format!("fit: kappa ~ K^{slope:.4} over K={:?}", cfg.k_list));
    }
    Ok(table)
}
