//! Command line for the relative growth laboratory. Every run is fully
//! determined by the argument vector plus the config file; records carry
//! no timestamps, so identical invocations emit identical bytes.
//!
//! Exit codes: 0 success, 1 verification gate failure, 2 domain or
//! numeric error, 3 parse or usage error.

// `!(x > 0.0)` guards also reject NaN; `x <= 0.0` would wave it through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{core_err, Failure, OutCtx};
use config::FileConfig;
use output::Format;
use relgrowth::{standard_catalog, CatalogPair, GridSpec};

#[derive(Parser)]
#[command(
    name = "relgrowth",
    version,
    about = "Relative growth indicators, integral transitions, and Nevanlinna tables"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate the six relative growth indicators for a scale pair
    Indicators(IndicatorsArgs),
    /// Convergence of the representation integral
    #[command(subcommand)]
    Integral(IntegralCmd),
    /// Proximity, counting, and characteristic rows for a model
    Nevanlinna(NevanlinnaArgs),
    /// Run the equivalence suite over the standard catalog
    Verify(VerifyArgs),
    /// List the scale grammar and the standard pairs
    Catalog(CatalogArgs),
}

#[derive(Subcommand)]
enum IntegralCmd {
    /// Verdict for a single exponent k
    Classify(ClassifyArgs),
    /// Bracket the critical exponent over a k range
    Transition(TransitionArgs),
}

#[derive(Args)]
struct CommonOut {
    /// Output format: json, csv, or table
    #[arg(long)]
    format: Option<String>,
    /// Flat key=value config file supplying defaults for unset flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the record to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Note the wall clock on the error stream (never inside the record)
    #[arg(long)]
    stamp: bool,
}

#[derive(Args)]
struct PairArgs {
    /// Comparison scale literal, e.g. "iter(m=1,n=0,a=1,c=1)"
    #[arg(long)]
    alpha: Option<String>,
    /// Subject scale literal, e.g. "sinlog"
    #[arg(long)]
    beta: Option<String>,
    /// Outer iterated-log depth (>= 1)
    #[arg(long)]
    p: Option<u32>,
    /// Inner iterated-log depth (>= 1)
    #[arg(long)]
    q: Option<u32>,
    /// Radius grid t0:h:J, anchored at iterated-exp depth q
    #[arg(long)]
    grid: Option<String>,
    /// Override the grid's iterated-exp depth
    #[arg(long)]
    q_anchor: Option<u32>,
}

#[derive(Args)]
struct IndicatorsArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Exponent A of (log^[q-1] r)^A in the integrand denominator
    #[arg(long = "A")]
    a_pow: Option<f64>,
    /// Integral exponent k to classify
    #[arg(long)]
    k: Option<f64>,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct TransitionArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Exponent A of (log^[q-1] r)^A in the integrand denominator
    #[arg(long = "A")]
    a_pow: Option<f64>,
    /// Search range lo:hi; lo must diverge, hi must converge
    #[arg(long)]
    krange: Option<String>,
    /// Bracket width target
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct NevanlinnaArgs {
    /// Function model literal, e.g. "rat(zeros=[];poles=[1,3];scale=1)"
    #[arg(long)]
    model: Option<String>,
    /// Comma-separated radii
    #[arg(long)]
    r: Option<String>,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated catalog pair names, or "all"
    #[arg(long)]
    pairs: Option<String>,
    /// Override every selected pair's estimate tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Bracket tolerance for the transition search
    #[arg(long)]
    transition_tol: Option<f64>,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct CatalogArgs {
    #[command(flatten)]
    out: CommonOut,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let benign = matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { 0 } else { 3 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, Failure> {
    match cli.cmd {
        Cmd::Indicators(args) => {
            let (cfg, ctx) = resolve_out(&args.out)?;
            let (alpha, beta, p, q, grid) = resolve_pair(&args.pair, &cfg)?;
            commands::cmd_indicators(&alpha, &beta, p, q, grid, &ctx)
        }
        Cmd::Integral(IntegralCmd::Classify(args)) => {
            let (cfg, ctx) = resolve_out(&args.out)?;
            let (alpha, beta, p, q, grid) = resolve_pair(&args.pair, &cfg)?;
            let a_pow = need(merged(args.a_pow, &cfg, "a")?, "A")?;
            let k = need(merged(args.k, &cfg, "k")?, "k")?;
            commands::cmd_classify(&alpha, &beta, p, q, a_pow, k, grid, &ctx)
        }
        Cmd::Integral(IntegralCmd::Transition(args)) => {
            let (cfg, ctx) = resolve_out(&args.out)?;
            let (alpha, beta, p, q, grid) = resolve_pair(&args.pair, &cfg)?;
            let a_pow = need(merged(args.a_pow, &cfg, "a")?, "A")?;
            let krange_s = need(merged_str(args.krange, &cfg, "krange"), "krange")?;
            let k_range = parse_krange(&krange_s)?;
            let tol = merged(args.tol, &cfg, "tol")?.unwrap_or(0.05);
            commands::cmd_transition(&alpha, &beta, p, q, a_pow, k_range, tol, grid, &ctx)
        }
        Cmd::Nevanlinna(args) => {
            let (cfg, ctx) = resolve_out(&args.out)?;
            let model = need(merged_str(args.model, &cfg, "model"), "model")?;
            let radii_s = need(merged_str(args.r, &cfg, "r"), "r")?;
            let radii = parse_radii(&radii_s)?;
            commands::cmd_nevanlinna(&model, &radii, &ctx)
        }
        Cmd::Verify(args) => {
            let (cfg, ctx) = resolve_out(&args.out)?;
            let names = merged_str(args.pairs, &cfg, "pairs").unwrap_or_else(|| "all".into());
            let tol_override = merged(args.tol, &cfg, "tol")?;
            let transition_tol =
                merged(args.transition_tol, &cfg, "transition_tol")?.unwrap_or(0.05);
            let mut pairs = select_pairs(&names)?;
            if let Some(t) = tol_override {
                if !(t > 0.0) {
                    return Err(Failure::Usage(format!("tolerance must be positive, got {t}")));
                }
                for p in &mut pairs {
                    p.tol = t;
                }
            }
            commands::cmd_verify(pairs, transition_tol, tol_override, &ctx)
        }
        Cmd::Catalog(args) => {
            let (_, ctx) = resolve_out(&args.out)?;
            commands::cmd_catalog(&ctx)
        }
    }
}

fn resolve_out(args: &CommonOut) -> Result<(FileConfig, OutCtx), Failure> {
    let cfg = match &args.config {
        Some(path) => FileConfig::load(path).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    let format_s = args
        .format
        .clone()
        .or_else(|| cfg.get("format").map(String::from))
        .unwrap_or_else(|| "table".into());
    let format = Format::parse(&format_s).map_err(Failure::Usage)?;
    let out = args.out.clone().or_else(|| cfg.get("out").map(PathBuf::from));
    Ok((
        cfg,
        OutCtx {
            format,
            out,
            stamp: args.stamp,
        },
    ))
}

fn resolve_pair(
    args: &PairArgs,
    cfg: &FileConfig,
) -> Result<(String, String, u32, u32, GridSpec), Failure> {
    let alpha = need(merged_str(args.alpha.clone(), cfg, "alpha"), "alpha")?;
    let beta = need(merged_str(args.beta.clone(), cfg, "beta"), "beta")?;
    let p = need(merged(args.p, cfg, "p")?, "p")?;
    let q = need(merged(args.q, cfg, "q")?, "q")?;
    let grid_s = merged_str(args.grid.clone(), cfg, "grid");
    let q_anchor = merged(args.q_anchor, cfg, "q_anchor")?;
    let grid = build_grid(q, grid_s.as_deref(), q_anchor)?;
    Ok((alpha, beta, p, q, grid))
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{flag} (no config value either)")))
}

fn merged_str(flag: Option<String>, cfg: &FileConfig, key: &str) -> Option<String> {
    flag.or_else(|| cfg.get(key).map(String::from))
}

fn merged<T: std::str::FromStr>(
    flag: Option<T>,
    cfg: &FileConfig,
    key: &str,
) -> Result<Option<T>, Failure> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get_parsed::<T>(key).map_err(Failure::Usage),
    }
}

fn build_grid(q: u32, grid: Option<&str>, q_anchor: Option<u32>) -> Result<GridSpec, Failure> {
    let base = GridSpec::default_for(q);
    let (t0, h, j) = match grid {
        None => (base.t0, base.h, base.j_count),
        Some(text) => {
            let parts: Vec<&str> = text.split(':').collect();
            if parts.len() != 3 {
                return Err(Failure::Usage(format!(
                    "grid must be t0:h:J, got {text:?}"
                )));
            }
            let t0 = parts[0]
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("bad grid t0 {:?}", parts[0])))?;
            let h = parts[1]
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("bad grid h {:?}", parts[1])))?;
            let j = parts[2]
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("bad grid J {:?}", parts[2])))?;
            (t0, h, j)
        }
    };
    GridSpec::new(q_anchor.unwrap_or(base.q_anchor), t0, h, j).map_err(core_err)
}

fn parse_krange(text: &str) -> Result<(f64, f64), Failure> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("krange must be lo:hi, got {text:?}")))?;
    let lo = lo
        .trim()
        .parse::<f64>()
        .map_err(|_| Failure::Usage(format!("bad krange low end {lo:?}")))?;
    let hi = hi
        .trim()
        .parse::<f64>()
        .map_err(|_| Failure::Usage(format!("bad krange high end {hi:?}")))?;
    Ok((lo, hi))
}

fn parse_radii(text: &str) -> Result<Vec<f64>, Failure> {
    let radii: Result<Vec<f64>, _> = text
        .split(',')
        .map(|tok| tok.trim().parse::<f64>())
        .collect();
    let radii = radii.map_err(|_| Failure::Usage(format!("bad radius list {text:?}")))?;
    if radii.is_empty() {
        return Err(Failure::Usage("radius list is empty".into()));
    }
    Ok(radii)
}

fn select_pairs(names: &str) -> Result<Vec<CatalogPair>, Failure> {
    let mut remaining = standard_catalog();
    if names == "all" {
        return Ok(remaining);
    }
    let mut selected = Vec::new();
    for name in names.split(',').map(str::trim) {
        let pos = remaining
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| {
                Failure::Usage(format!("unknown or repeated catalog pair {name:?}"))
            })?;
        selected.push(remaining.remove(pos));
    }
    Ok(selected)
}
