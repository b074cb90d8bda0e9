//! Deviation statistics E‖M−N‖/‖N‖ for 1D Fourier families: either across
//! the growth law n = p·logᶜp, or across n at fixed p to expose the
//! power-law decay.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::io::{linear_fit, mean_and_sd, Table, Value};
use crate::numerics::{RandomStream, SequenceKind};

use super::{make_fourier_family_1d, odd_square_side, round_up_to_odd, DeviationSampler};

#[derive(Clone, Debug)]
pub enum StatStudyMode {
    /// For each (p, c): n = round(p·lnᶜp), rounded up to odd.
    GrowthSweep { p_list: Vec<usize>, c_list: Vec<f64> },
    /// Fixed family (J, K); sweep the grid size and fit the log-log slope.
    SizeSweep { j: usize, k: usize, n_list: Vec<usize> },
}

#[derive(Clone, Debug)]
pub struct StatStudyConfig {
    pub mode: StatStudyMode,
    pub trials: usize,
    pub seed: u64,
    pub kind: SequenceKind,
}

pub fn run_statstudy(cfg: &StatStudyConfig) -> Result<Table> {
    if cfg.trials < 1 {
        return Err(Error::Validation("trials must be ≥ 1".into()));
    }
    match &cfg.mode {
        StatStudyMode::GrowthSweep { p_list, c_list } => growth_sweep(cfg, p_list, c_list),
        StatStudyMode::SizeSweep { j, k, n_list } => size_sweep(cfg, *j, *k, n_list),
    }
}

fn deviation_stats(
    sampler: &DeviationSampler,
    trials: usize,
    seed: u64,
    kind: SequenceKind,
) -> Result<(f64, Option<f64>)> {
    let mut devs = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut stream = RandomStream::substream(seed, t as u64);
        devs.push(sampler.sample(&mut stream, kind)?);
    }
    Ok(mean_and_sd(&devs))
}

fn growth_sweep(cfg: &StatStudyConfig, p_list: &[usize], c_list: &[f64]) -> Result<Table> {
    let mut table = Table::new(&["p", "c", "n", "n_raw", "mean", "sigma", "trials"]);
    table.comment("matprobe statstudy mode=growth".to_string());
    table.comment(format!(
        "p={:?} c={:?} trials={} seed={} rng={}",
        p_list,
        c_list,
        cfg.trials,
        cfg.seed,
        cfg.kind.name()
    ));
    for &p in p_list {
        let side = odd_square_side(p)?;
        for &c in c_list {
            let n_raw = p as f64 * (p as f64).ln().powf(c);
            let n1 = round_up_to_odd(n_raw);
            let grid = Grid::from_axis_len(1, n1)?;
            let family = make_fourier_family_1d(grid, side)?;
            let sampler = DeviationSampler::new(family)?;
            let (mean, sd) = deviation_stats(&sampler, cfg.trials, cfg.seed, cfg.kind)?;
            table.push_row(vec![
                Value::Int(p as i64),
                Value::Float(c),
                Value::Int(n1 as i64),
                Value::Float(n_raw),
                Value::Float(mean),
                sd.map_or(Value::Empty, Value::Float),
                Value::Int(cfg.trials as i64),
            ]);
        }
    }
    Ok(table)
}

fn size_sweep(cfg: &StatStudyConfig, j: usize, k: usize, n_list: &[usize]) -> Result<Table> {
    if n_list.len() < 2 {
        return Err(Error::Validation("size sweep needs at least two grid sizes".into()));
    }
    let p = j * k;
    let mut table = Table::new(&["p", "n", "mean", "sigma", "trials"]);
    table.comment("matprobe statstudy mode=size".to_string());
    table.comment(format!(
        "J={} K={} n={:?} trials={} seed={} rng={}",
        j,
        k,
        n_list,
        cfg.trials,
        cfg.seed,
        cfg.kind.name()
    ));
    let mut log_n = Vec::new();
    let mut log_mean = Vec::new();
    for &n1 in n_list {
        let grid = Grid::from_axis_len(1, n1)?;
        let family = crate::basis::make_fourier_family(grid, j, k, 0.0)?;
        let sampler = DeviationSampler::new(family)?;
        let (mean, sd) = deviation_stats(&sampler, cfg.trials, cfg.seed, cfg.kind)?;
        log_n.push((n1 as f64).ln());
        log_mean.push(mean.ln());
        table.push_row(vec![
            Value::Int(p as i64),
            Value::Int(n1 as i64),
            Value::Float(mean),
            sd.map_or(Value::Empty, Value::Float),
            Value::Int(cfg.trials as i64),
        ]);
    }
    let (slope, intercept) = linear_fit(&log_n, &log_mean);
    table.footer(format!(
        "fit: log(mean) = {slope:.6} * log(n) + {intercept:.6} over n={n_list:?}"
    ));
    Ok(table)
}
