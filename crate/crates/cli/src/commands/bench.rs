use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::Args;
use psurf::claws::hierarchy;
use psurf::pdebench::{
    drift_report, evolve_mkdv, evolve_sg, BenchError, DriftReport, FieldHistory, GridConfig, InitialCondition,
    RunConfig, TimeConfig,
};
use psurf::symcore::{parse_normal, EvolutionModel};
use serde::Serialize;
use serde_json::json;

use super::{emit, emit_json, input, load_model, parse_pair, CliError, Common, RunManifest};

/// Trivial densities integrate to zero up to this bound.
pub const TRIVIAL_TOL: f64 = 1e-10;

#[derive(Args, Clone, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: Common,
    /// Run configuration (TOML); flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Periodic box, `LxN` (length by grid points).
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Highest law order to track.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Sample the closed-form solution instead of evolving.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Solver {
    Mkdv,
    SineGordon,
}

/// Picks the evolver by comparing the model's flow with the ones we can
/// integrate.
fn solver_for(m: &EvolutionModel) -> Option<Solver> {
    let flow = m.evolution("q")?;
    if flow == &parse_normal("-6*q^2*q_x - q_xxx").ok()? {
        Some(Solver::Mkdv)
    } else if flow == &parse_normal("sin(u)/2").ok()? {
        Some(Solver::SineGordon)
    } else {
        None
    }
}

fn bench_error(e: BenchError) -> CliError {
    match e {
        BenchError::Unstable { .. } | BenchError::BlowUp { .. } => CliError::Numeric(e.into()),
        e => input(e),
    }
}

fn config(args: &BenchArgs, solution: Option<&str>) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            RunConfig::parse(&text).map_err(input)?
        }
        None => RunConfig {
            grid: GridConfig { length: 40.0, n: 512 },
            time: TimeConfig { t_max: 1.0, dt: 1e-3, save_every: 100 },
            initial: match solution {
                Some("sg-kink") => InitialCondition::SgKink { amplitude: 1.0 },
                Some("mkdv-soliton") => InitialCondition::MkdvSoliton { amplitude: 1.0 },
                _ => InitialCondition::Gaussian { amplitude: 1.0, width: 1.0 },
            },
            threshold: 1e-6,
            exact: false,
        },
    };
    if let Some(g) = &args.grid {
        let (length, n) = parse_pair::<f64, usize>(g).context("--grid")?;
        cfg.grid = GridConfig { length, n };
    }
    if let Some(t) = args.tmax {
        cfg.time.t_max = t;
    }
    if let Some(dt) = args.dt {
        cfg.time.dt = dt;
    }
    cfg.exact |= args.exact;
    if !(cfg.time.t_max >= 0.0 && cfg.time.dt > 0.0) {
        return Err(input(anyhow!("need t_max >= 0 and dt > 0")));
    }
    Ok(cfg)
}

fn history(cfg: &RunConfig, solver: Solver) -> Result<FieldHistory, CliError> {
    let grid = cfg.grid().map_err(input)?;
    if cfg.exact {
        let sol = cfg.initial.exact().ok_or_else(|| anyhow!("exact mode needs a closed-form initial condition"))?;
        return Ok(FieldHistory::from_exact(&sol, grid, &cfg.save_times()));
    }
    let (t, dt, every) = (cfg.time.t_max, cfg.time.dt, cfg.time.save_every);
    match solver {
        Solver::Mkdv => evolve_mkdv(grid, &cfg.initial.sample_q(&grid), t, dt, every),
        Solver::SineGordon => evolve_sg(grid, &cfg.initial.sample_u(&grid), t, dt, every),
    }
    .map_err(bench_error)
}

fn csv(meta: &RunManifest, report: &DriftReport) -> String {
    let mut out = meta.csv_comment();
    out.push('t');
    for e in &report.entries {
        let _ = write!(out, ",I_{}", e.n);
    }
    out.push('\n');
    for (i, t) in report.times.iter().enumerate() {
        let _ = write!(out, "{t:.6}");
        for e in &report.entries {
            let _ = write!(out, ",{:.12e}", e.values[i]);
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct BenchReport<'a> {
    meta: &'a RunManifest,
    passed: bool,
    report: &'a DriftReport,
}

pub fn run(args: &BenchArgs) -> Result<bool, CliError> {
    let model = load_model(&args.common.model)?;
    let m = model.file.evolution_model().map_err(input)?;
    let solver = solver_for(&m).ok_or_else(|| anyhow!("no numerical solver for this model's flow"))?;
    let cfg = config(args, model.file.solution.as_deref())?;
    let h = hierarchy(&model.file.qr, &m, args.n, false).map_err(input)?;
    let hist = history(&cfg, solver)?;
    let report = drift_report(&h.laws, &h.verified, &hist, cfg.threshold).map_err(bench_error)?;

    let mut passed = true;
    for e in &report.entries {
        let size = e.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if e.discrepancy {
            eprintln!("law {}: drift {:.2e} disagrees with exact verification ({})", e.n, e.drift, e.verified);
            passed = false;
        }
        if e.trivial && size >= TRIVIAL_TOL {
            eprintln!("law {}: trivial density integrates to {size:.2e}", e.n);
            passed = false;
        }
    }
    let meta = RunManifest::new("bench", &model, args.common.seed, json!({ "n": args.n, "config": cfg }));
    let out = args.common.out.as_deref();
    if out.is_some() {
        emit(out, "drift.csv", &csv(&meta, &report))?;
    }
    emit_json(out, "drift.json", &BenchReport { meta: &meta, passed, report: &report })?;
    if passed {
        let worst = report.entries.iter().filter(|e| !e.trivial).fold(0.0f64, |a, e| a.max(e.drift));
        eprintln!("{} laws within bounds; worst nontrivial drift {worst:.2e}", report.entries.len());
    }
    Ok(passed)
}
