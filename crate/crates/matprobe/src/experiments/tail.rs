//! Empirical exceedance probabilities of the deviation ‖M−N‖/‖N‖ at a fixed
//! (p, n) point, plus an upper-tail log-linear fit reported for reference.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::io::{linear_fit, Table, Value};
use crate::numerics::{RandomStream, SequenceKind};

use super::DeviationSampler;

#[derive(Clone, Debug)]
pub struct TailConfig {
    pub n1: usize,
    pub j: usize,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    pub kind: SequenceKind,
    /// Exceedance thresholds; defaults to 0, 0.1, …, 6 when empty.
    pub thresholds: Vec<f64>,
}

pub fn default_thresholds() -> Vec<f64> {
    (0..=60).map(|i| i as f64 * 0.1).collect()
}

pub fn run_tail(cfg: &TailConfig) -> Result<Table> {
    if cfg.samples < 1 {
        return Err(Error::Validation("samples must be ≥ 1".into()));
    }
    let thresholds =
        if cfg.thresholds.is_empty() { default_thresholds() } else { cfg.thresholds.clone() };
    let grid = Grid::from_axis_len(1, cfg.n1)?;
    let family = crate::basis::make_fourier_family(grid, cfg.j, cfg.k, 0.0)?;
    let p = family.len();
    let sampler = DeviationSampler::new(family)?;

    let mut devs = Vec::with_capacity(cfg.samples);
    for t in 0..cfg.samples {
        let mut stream = RandomStream::substream(cfg.seed, t as u64);
        devs.push(sampler.sample(&mut stream, cfg.kind)?);
    }

    let mut table = Table::new(&["t", "count", "probability"]);
    table.comment("matprobe tail".to_string());
    table.comment(format!(
        "p={p} n={} samples={} seed={} rng={}",
        grid.len(),
        cfg.samples,
        cfg.seed,
        cfg.kind.name()
    ));
    let mut fit_t = Vec::new();
    let mut fit_logp = Vec::new();
    for &t in &thresholds {
        let count = devs.iter().filter(|&&d| d > t).count();
        let prob = count as f64 / cfg.samples as f64;
        if prob > 0.0 && prob <= 0.1 {
            fit_t.push(t);
            fit_logp.push(prob.ln());
        }
        table.push_row(vec![
            Value::Float(t),
            Value::Int(count as i64),
            Value::Float(prob),
        ]);
    }
    if fit_t.len() >= 2 {
        let (slope, intercept) = linear_fit(&fit_t, &fit_logp);
        table.footer(format!(
            "upper-tail fit (P ≤ 0.1): log P = {slope:.6} * t + {intercept:.6} over {} points",
            fit_t.len()
        ));
    } else {
        table.footer("upper-tail fit: not enough tail mass".to_string());
    }
    Ok(table)
}
