//! `matprobe` — batch experiment harness. Every command emits a CSV table
//! whose `#` header echoes the full spec (including the seed), so rerunning
//! the same invocation reproduces the file byte for byte.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use matprobe::basis::FamilyKind;
use matprobe::error::{Error, Result};
use matprobe::experiments::{
    run_chebcond, run_foveate, run_ordercorrect, run_precond2d, run_probe, run_statstudy,
    run_tail, ChebCondConfig, FamilySpec, FoveateConfig, OperatorSpec, OrderCorrectConfig,
    PrecondConfig, ProbeCmdConfig, ProbeMode, StatStudyConfig, StatStudyMode, TailConfig,
};
use matprobe::io::pgm::write_pgm;
use matprobe::io::Table;
use matprobe::SequenceKind;

#[derive(Parser)]
#[command(
    name = "matprobe",
    version,
    about = "Matrix probing of operators with smooth pseudodifferential symbols: conditioning studies, probe runs and preconditioner experiments emitted as CSV."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Points per axis n1 (odd).
    #[arg(long = "grid")]
    grid: Option<usize>,
    /// Grid dimension (1 or 2).
    #[arg(long)]
    dim: Option<usize>,
    /// Basis family kind: fourier|cheb1d|chebdisk.
    #[arg(long)]
    family: Option<String>,
    /// Spatial count J (odd).
    #[arg(long = "J")]
    j: Option<usize>,
    /// Frequency count K.
    #[arg(long = "K")]
    k: Option<usize>,
    /// Angular count K1 for the chebdisk family (odd).
    #[arg(long = "K1")]
    k1: Option<usize>,
    /// Order weight exponent m.
    #[arg(long)]
    order: Option<f64>,
    /// Normalize frequency profiles to unit norm (chebdisk).
    #[arg(long)]
    normalized: bool,
    /// Number of probe vectors q.
    #[arg(long)]
    q: Option<usize>,
    /// Probe distribution: gaussian|rademacher.
    #[arg(long)]
    rng: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials (samples, for `tail`).
    #[arg(long)]
    trials: Option<usize>,
    /// Sweep values, e.g. --sweep p=9,25,49 (repeatable).
    #[arg(long = "sweep")]
    sweeps: Vec<String>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Mean deviation E‖M−N‖/‖N‖ across the growth law n = p·log^c p, or
    /// across n at fixed p (--sweep n=...).
    Statstudy(CommonArgs),
    /// Empirical exceedance P(‖M−N‖/‖N‖ > t) at a fixed (p, n) point.
    Tail(CommonArgs),
    /// κ and λ of the Chebyshev families against the polynomial count K.
    Chebcond(CommonArgs),
    /// One probe run (mode: forward|backward) against a reference operator.
    Probe {
        /// forward | backward
        mode: String,
        /// Operator: elliptic1d | elliptic2d | foveation.
        #[arg(long)]
        op: Option<String>,
        /// Contrast T for elliptic2d.
        #[arg(long = "T")]
        contrast: Option<f64>,
        /// Roughness γ for elliptic2d.
        #[arg(long)]
        gamma: Option<u32>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// cond(CA)/cond(A) sweep for backward-probed 2D elliptic operators.
    Precond2d(CommonArgs),
    /// κ(B_A), λ(B_A) of the transformed family across order weights m and
    /// grid sizes n.
    Ordercorrect {
        /// Operator: elliptic1d | elliptic2d | foveation.
        #[arg(long)]
        op: Option<String>,
        /// Contrast T for elliptic2d.
        #[arg(long = "T")]
        contrast: Option<f64>,
        /// Roughness γ for elliptic2d.
        #[arg(long)]
        gamma: Option<u32>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Forward-probe the foveation operator on a PGM image over a J sweep.
    Foveate {
        /// Square grayscale PGM image; the side length becomes the grid.
        #[arg(long)]
        image: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("matprobe: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Statstudy(common) => {
            let table = run_statstudy(&statstudy_config(&common)?)?;
            emit(&common.out, &table)
        }
        Command::Tail(common) => {
            let table = run_tail(&tail_config(&common)?)?;
            emit(&common.out, &table)
        }
        Command::Chebcond(common) => {
            let table = run_chebcond(&chebcond_config(&common)?)?;
            emit(&common.out, &table)
        }
        Command::Probe { mode, op, contrast, gamma, common } => {
            let mode = match mode.as_str() {
                "forward" => ProbeMode::Forward,
                "backward" => ProbeMode::Backward,
                other => {
                    return Err(Error::Validation(format!(
                        "probe mode must be forward|backward, got {other:?}"
                    )))
                }
            };
            let op = operator_spec(op.as_deref(), contrast, gamma)?;
            let default_order = if mode == ProbeMode::Backward { -2.0 } else { 0.0 };
            let cfg = ProbeCmdConfig {
                mode,
                op,
                family: family_spec(&common, default_order)?,
                n1: common.grid.unwrap_or(match op {
                    OperatorSpec::Elliptic1d => 201,
                    OperatorSpec::Elliptic2d { .. } => 21,
                    OperatorSpec::Foveation => 65,
                }),
                q: common.q.unwrap_or(1),
                seed: common.seed.unwrap_or(0),
                kind: rng_kind(&common)?,
                want_deviation: false,
            };
            let out = run_probe(&cfg)?;
            match &common.out {
                Some(path) => write_text(path, &out.csv),
                None => {
                    print!("{}", out.csv);
                    Ok(())
                }
            }
        }
        Command::Precond2d(common) => {
            let table = run_precond2d(&precond_config(&common)?)?;
            emit(&common.out, &table)
        }
        Command::Ordercorrect { op, contrast, gamma, common } => {
            let sweeps = parse_sweeps(&common.sweeps)?;
            let op = operator_spec(op.as_deref(), contrast, gamma)?;
            let cfg = OrderCorrectConfig {
                orders: sweep_floats(&sweeps, "m")?.unwrap_or(vec![0.0, -1.0, -2.0, -3.0]),
                n1_list: sweep_usizes(&sweeps, "n")?.unwrap_or(vec![101, 201]),
                op,
                family: family_spec(&common, 0.0)?,
            };
            let table = run_ordercorrect(&cfg)?;
            emit(&common.out, &table)
        }
        Command::Foveate { image, common } => {
            let sweeps = parse_sweeps(&common.sweeps)?;
            let out_path = common
                .out
                .clone()
                .ok_or_else(|| Error::Validation("foveate requires --out".into()))?;
            let cfg = FoveateConfig {
                image,
                j_list: sweep_usizes(&sweeps, "J")?.unwrap_or(vec![1, 3, 5, 7]),
                q: common.q.unwrap_or(1),
                seed: common.seed.unwrap_or(0),
                kind: rng_kind(&common)?,
            };
            let out = run_foveate(&cfg)?;
            out.table.save(&out_path)?;
            let stem = out_path.with_extension("");
            let base = stem.to_string_lossy().to_string();
            write_pgm(&PathBuf::from(format!("{base}_blurred.pgm")), &out.blurred)?;
            for (j, img) in &out.approximations {
                write_pgm(&PathBuf::from(format!("{base}_J{j}.pgm")), img)?;
            }
            Ok(())
        }
    }
}

fn emit(out: &Option<PathBuf>, table: &Table) -> Result<()> {
    match out {
        Some(path) => table.save(path),
        None => {
            print!("{}", table.to_csv_string());
            Ok(())
        }
    }
}

fn write_text(path: &PathBuf, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn rng_kind(common: &CommonArgs) -> Result<SequenceKind> {
    match common.rng.as_deref() {
        None => Ok(SequenceKind::Gaussian),
        Some(s) => SequenceKind::from_str(s),
    }
}

fn operator_spec(
    op: Option<&str>,
    contrast: Option<f64>,
    gamma: Option<u32>,
) -> Result<OperatorSpec> {
    match op.unwrap_or("elliptic1d") {
        "elliptic1d" => Ok(OperatorSpec::Elliptic1d),
        "elliptic2d" => Ok(OperatorSpec::Elliptic2d {
            contrast: contrast.unwrap_or(10.0),
            roughness: gamma.unwrap_or(2),
        }),
        "foveation" => Ok(OperatorSpec::Foveation),
        other => Err(Error::Validation(format!(
            "unknown operator {other:?} (expected elliptic1d|elliptic2d|foveation)"
        ))),
    }
}

fn family_spec(common: &CommonArgs, default_order: f64) -> Result<FamilySpec> {
    let kind = match common.family.as_deref() {
        None => FamilyKind::Fourier,
        Some(s) => FamilyKind::from_str(s)?,
    };
    Ok(FamilySpec {
        kind,
        j: common.j.unwrap_or(5),
        k: common.k.unwrap_or(5),
        k_angular: common.k1.unwrap_or(3),
        order: common.order.unwrap_or(default_order),
        normalized: common.normalized,
    })
}

fn parse_sweeps(args: &[String]) -> Result<BTreeMap<String, Vec<String>>> {
    let mut map = BTreeMap::new();
    for raw in args {
        let (key, values) = raw.split_once('=').ok_or_else(|| {
            Error::Validation(format!("bad --sweep {raw:?}; expected key=v1,v2,..."))
        })?;
        let vals: Vec<String> = values.split(',').map(|s| s.trim().to_string()).collect();
        if vals.is_empty() || vals.iter().any(|v| v.is_empty()) {
            return Err(Error::Validation(format!("bad --sweep values in {raw:?}")));
        }
        map.insert(key.trim().to_string(), vals);
    }
    Ok(map)
}

fn sweep_floats(map: &BTreeMap<String, Vec<String>>, key: &str) -> Result<Option<Vec<f64>>> {
    match map.get(key) {
        None => Ok(None),
        Some(vals) => vals
            .iter()
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Validation(format!("bad value {v:?} in sweep {key}")))
            })
            .collect::<Result<Vec<f64>>>()
            .map(Some),
    }
}

fn sweep_usizes(map: &BTreeMap<String, Vec<String>>, key: &str) -> Result<Option<Vec<usize>>> {
    match map.get(key) {
        None => Ok(None),
        Some(vals) => vals
            .iter()
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::Validation(format!("bad value {v:?} in sweep {key}")))
            })
            .collect::<Result<Vec<usize>>>()
            .map(Some),
    }
}

fn statstudy_config(common: &CommonArgs) -> Result<StatStudyConfig> {
    let sweeps = parse_sweeps(&common.sweeps)?;
    let mode = if let Some(n_list) = sweep_usizes(&sweeps, "n")? {
        StatStudyMode::SizeSweep { j: common.j.unwrap_or(5), k: common.k.unwrap_or(5), n_list }
    } else {
        let p_list = sweep_usizes(&sweeps, "p")?.ok_or_else(|| {
            Error::Validation(
                "statstudy needs --sweep p=... and --sweep c=... (or --sweep n=... for the size mode)".into(),
            )
        })?;
        let c_list = sweep_floats(&sweeps, "c")?.ok_or_else(|| {
            Error::Validation("statstudy growth mode needs --sweep c=...".into())
        })?;
        StatStudyMode::GrowthSweep { p_list, c_list }
    };
    Ok(StatStudyConfig {
        mode,
        trials: common.trials.unwrap_or(100),
        seed: common.seed.unwrap_or(0),
        kind: rng_kind(common)?,
    })
}

fn tail_config(common: &CommonArgs) -> Result<TailConfig> {
    let sweeps = parse_sweeps(&common.sweeps)?;
    Ok(TailConfig {
        n1: common.grid.unwrap_or(51),
        j: common.j.unwrap_or(5),
        k: common.k.unwrap_or(5),
        samples: common.trials.unwrap_or(10_000),
        seed: common.seed.unwrap_or(0),
        kind: rng_kind(common)?,
        thresholds: sweep_floats(&sweeps, "t")?.unwrap_or_default(),
    })
}

fn chebcond_config(common: &CommonArgs) -> Result<ChebCondConfig> {
    let sweeps = parse_sweeps(&common.sweeps)?;
    let dim = common.dim.unwrap_or(1);
    let k_list = sweep_usizes(&sweeps, "K")?
        .unwrap_or(if dim == 1 { vec![4, 8, 16] } else { vec![2, 3, 4, 5, 6, 7, 8] });
    Ok(ChebCondConfig {
        dim,
        n1: common.grid.unwrap_or(if dim == 1 { 1601 } else { 55 }),
        k_list,
        j: common.j.unwrap_or(1),
        k_angular: common.k1.unwrap_or(3),
    })
}

fn precond_config(common: &CommonArgs) -> Result<PrecondConfig> {
    let sweeps = parse_sweeps(&common.sweeps)?;
    let defaults = PrecondConfig::defaults();
    Ok(PrecondConfig {
        contrasts: sweep_floats(&sweeps, "T")?.unwrap_or(defaults.contrasts),
        roughnesses: sweep_usizes(&sweeps, "gamma")?
            .map(|v| v.into_iter().map(|x| x as u32).collect())
            .unwrap_or(defaults.roughnesses),
        j_list: sweep_usizes(&sweeps, "J")?.unwrap_or(defaults.j_list),
        n1: common.grid.unwrap_or(defaults.n1),
        trials: common.trials.unwrap_or(defaults.trials),
        q: common.q.unwrap_or(defaults.q),
        order: common.order.unwrap_or(defaults.order),
        seed: common.seed.unwrap_or(0),
        kind: rng_kind(common)?,
    })
}
