mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use bulging::bounds::{self, BoundParams};
use bulging::entropy::{self, census, fit_entropy};
use bulging::limitset::{svg_string, sweep_figure};
use bulging::{fmt_f64, Error};
use clap::{Args, Parser, Subcommand};

use config::{parse_grid, resolve_rep, Config, Split};
use output::{csv_field, Run};

#[derive(Debug)]
pub enum Failure {
    Domain(Error),
    Config(String),
    Budget(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(_) => Failure::Budget(e),
            e => Failure::Domain(e),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Domain(_) | Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Budget(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Domain(e) => write!(f, "error: {e}"),
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Budget(e) => write!(f, "budget exceeded: {e}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

/// Hilbert geometry, bulging deformations and entropy estimates for convex
/// projective surfaces.
#[derive(Parser)]
#[command(name = "bulging", version)]
struct Cli {
    /// JSON configuration; fields left out take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the quick property checks of every module.
    Verify {
        /// Same as --config.
        config_path: Option<PathBuf>,
    },
    /// Length census and growth-rate estimate.
    Census(CensusArgs),
    /// Entropy, trace and domain drift along a bulging parameter grid.
    Sweep(SweepArgs),
    /// Table of the combinatorial counting bound and its entropy limit.
    Bounds(BoundsArgs),
    /// SVG of the domains along a bulging grid.
    Render(RenderArgs),
}

#[derive(Args)]
struct RepArgs {
    /// pants:l1,l2,l3 | torus | genus2 | file:<path.json>
    #[arg(long)]
    rep: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    split: Split,
}

#[derive(Args)]
struct CensusArgs {
    #[command(flatten)]
    rep: RepArgs,
    #[arg(long)]
    max_word_len: Option<usize>,
    /// Identify each class with its inverse.
    #[arg(long)]
    unoriented: bool,
    #[arg(long)]
    window_fraction: Option<f64>,
    /// Also write the counting function as counts.csv.
    #[arg(long)]
    dump_counts: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    rep: RepArgs,
    /// Grid as start:stop:step or a comma list.
    #[arg(long, default_value = "0:12:2")]
    s: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t: f64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    g: u32,
    #[arg(long)]
    cr: f64,
    #[arg(long)]
    l: f64,
    #[arg(long, default_value_t = 0.0)]
    s_extra: f64,
    #[arg(long)]
    t_max: f64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    rep: RepArgs,
    #[arg(long, default_value = "0,2,4,8")]
    s: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t: f64,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

fn cmd_verify(cfg: &Config) -> Result<(), Failure> {
    let checks = verify::run(cfg)?;
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        println!("{:<width$}  {}  {}", c.name, if c.pass { "pass" } else { "FAIL" }, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(Failure::Domain(Error::InvalidArgument(format!("{failed} of {} checks failed", checks.len()))));
    }
    Ok(())
}

fn cmd_census(a: &CensusArgs, cfg: &Config) -> Result<(), Failure> {
    let rep = resolve_rep(a.rep.rep.as_deref(), a.rep.split, cfg)?;
    let l = a.max_word_len.unwrap_or(cfg.census.max_word_len);
    let wf = a.window_fraction.unwrap_or(cfg.census.window_fraction);
    let oriented = cfg.census.oriented && !a.unoriented;
    let c = census(&rep, l, oriented)?;
    let mut run = Run::new(&a.out_dir, "census", cfg.canonical())?;
    let mut csv = String::from("word,hilbert_length\n");
    for e in &c.entries {
        csv.push_str(&format!("{},{}\n", csv_field(&rep.word_string(&e.word)), fmt_f64(e.hilbert_length)));
    }
    run.write("census.csv", csv.as_bytes())?;
    if a.dump_counts {
        run.write("counts.csv", c.counts_csv().as_bytes())?;
    }
    let est = fit_entropy(&c, wf);
    let summary = serde_json::json!({
        "kind": c.kind,
        "max_word_len": c.max_word_len,
        "oriented": c.oriented,
        "entries": c.entries.len(),
        "skipped": c.skipped,
        "horizon": c.horizon,
        "estimate": est.as_ref().ok(),
        "estimate_error": est.as_ref().err().map(|e| e.to_string()),
    });
    run.write("estimate.json", (serde_json::to_string_pretty(&summary).expect("json") + "\n").as_bytes())?;
    run.finish()?;
    let e = est?;
    println!("h = {} ± {} over {} points", fmt_f64(e.h), fmt_f64(e.stderr), e.n_points);
    Ok(())
}

fn cmd_sweep(a: &SweepArgs, cfg: &Config) -> Result<(), Failure> {
    let rep = resolve_rep(a.rep.rep.as_deref(), a.rep.split, cfg)?;
    let grid = parse_grid(&a.s)?;
    let rows = entropy::sweep(&rep, &grid, a.t, &cfg.sweep)?;
    let mut run = Run::new(&a.out_dir, "sweep", cfg.canonical())?;
    let path = run.write("sweep.csv", entropy::sweep_csv(&rows).as_bytes())?;
    run.finish()?;
    println!("{} rows -> {}", rows.len(), path.display());
    Ok(())
}

fn cmd_bounds(a: &BoundsArgs, cfg: &Config) -> Result<(), Failure> {
    let p = BoundParams::new(a.g, a.cr, a.l, a.s_extra).map_err(|e| Failure::Config(e.to_string()))?;
    if !(a.t_max > a.cr + a.s_extra) {
        return Err(Failure::Config(format!("--t-max must exceed the crossing cost {}", a.cr + a.s_extra)));
    }
    let grid: Vec<f64> = bounds::doubling_grid(a.t_max, cfg.bounds.grid_points).into_iter().filter(|&t| bounds::max_crossings(t, &p) > 0).collect();
    let mut run = Run::new(&a.out_dir, "bounds", cfg.canonical())?;
    let mut csv = String::from("T,count_bound,log_bound_over_T\n");
    for &t in &grid {
        let n = bounds::count_bound(t, &p)?;
        csv.push_str(&format!("{},{},{}\n", fmt_f64(t), n, fmt_f64(bounds::log_bound_over_t(t, &p)?)));
    }
    run.write("bounds.csv", csv.as_bytes())?;
    let report = bounds::entropy_bound_report(&p, &grid, cfg.bounds.settle_tol);
    let json = match &report {
        Ok(r) => serde_json::json!({ "params": p, "report": r }),
        Err(e) => serde_json::json!({ "params": p, "error": e.to_string() }),
    };
    run.write("bounds_report.json", (serde_json::to_string_pretty(&json).expect("json") + "\n").as_bytes())?;
    run.finish()?;
    let r = report?;
    println!("entropy bound {} (M_s = {}, q_s = {})", fmt_f64(r.limit), r.m_s, r.q_s);
    Ok(())
}

fn cmd_render(a: &RenderArgs, cfg: &Config) -> Result<(), Failure> {
    let rep = resolve_rep(a.rep.rep.as_deref(), a.rep.split, cfg)?;
    let grid = parse_grid(&a.s)?;
    let (domains, overlays) = sweep_figure(&rep, &grid, a.t, a.depth.unwrap_or(cfg.render.depth))?;
    let dir = match a.out.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = a.out.file_name().ok_or_else(|| Failure::Config(format!("bad output path {}", a.out.display())))?;
    let mut run = Run::new(&dir, "render", cfg.canonical())?;
    run.write(&name.to_string_lossy(), svg_string(&domains, &overlays).as_bytes())?;
    run.finish()
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config_path = match &cli.cmd {
        Cmd::Verify { config_path: Some(p) } => Some(p.clone()),
        _ => cli.config.clone(),
    };
    let cfg = Config::load(config_path.as_deref())?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("--threads: {e}")))?;
    }
    match &cli.cmd {
        Cmd::Verify { .. } => cmd_verify(&cfg),
        Cmd::Census(a) => cmd_census(a, &cfg),
        Cmd::Sweep(a) => cmd_sweep(a, &cfg),
        Cmd::Bounds(a) => cmd_bounds(a, &cfg),
        Cmd::Render(a) => cmd_render(a, &cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
