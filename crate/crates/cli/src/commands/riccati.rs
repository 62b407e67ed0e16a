use anyhow::{anyhow, Context};
use clap::Args;
use psurf::pdebench::ExactSolution;
use psurf::riccati::{
    check_conservation_form, check_equivalences, check_theta_closed, EquivalenceReport, GridReport, GridSpec,
    GridStatus, PathSpec, RiccatiError, SolutionField,
};
use serde::Serialize;
use serde_json::json;

use super::{cell, emit, emit_json, input, load_model, parse_pair, CliError, Common, RunManifest};

pub const EQUIVALENCE_TOL: f64 = 1e-7;
pub const WRONSKIAN_TOL: f64 = 1e-8;

#[derive(Args, Clone, Debug)]
pub struct RiccatiArgs {
    #[command(flatten)]
    pub common: Common,
    /// Closed-form solution (`mkdv-soliton`, `sg-kink`); defaults to the model's.
    #[arg(long)]
    pub solution: Option<String>,
    /// Solution amplitude.
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Comma-separated spectral parameters.
    #[arg(long, default_value = "3", value_delimiter = ',')]
    pub eta: Vec<f64>,
    /// Finest finite-difference grid, `NXxNT` cells over [-10, 10] x [0, 1].
    #[arg(long, default_value = "512x64")]
    pub grid: String,
    /// Number of nested grids.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    /// RK4 steps along the x path for the equivalence checks.
    #[arg(long, default_value_t = 20000)]
    pub steps: usize,
    /// Initial angle for the equivalence checks.
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub phi0: f64,
}

#[derive(Serialize)]
struct Row {
    check: String,
    eta: f64,
    h: String,
    mismatch: String,
    order: String,
}

#[derive(Serialize)]
struct RiccatiReport {
    meta: RunManifest,
    passed: bool,
    equivalences: Vec<EquivalenceReport>,
    grids: Vec<GridReport>,
}

fn riccati_error(e: RiccatiError) -> CliError {
    match e {
        RiccatiError::NonFinite(_) | RiccatiError::BothChartsDiverged(_) => CliError::Numeric(e.into()),
        e => input(e),
    }
}

fn equivalence_rows(r: &EquivalenceReport, h: f64, rows: &mut Vec<Row>) {
    for (check, v) in [("equivalence.angle", r.angle), ("equivalence.linear", r.projective), ("wronskian", r.wronskian)] {
        rows.push(Row { check: check.into(), eta: r.eta, h: cell(h), mismatch: cell(v), order: String::new() });
    }
}

fn grid_rows(r: &GridReport, rows: &mut Vec<Row>) {
    if r.status == GridStatus::Pole {
        rows.push(Row {
            check: r.check.into(),
            eta: r.eta,
            h: String::new(),
            mismatch: "pole".into(),
            order: String::new(),
        });
    }
    for l in &r.levels {
        rows.push(Row {
            check: r.check.into(),
            eta: r.eta,
            h: cell(l.hx),
            mismatch: cell(l.mismatch),
            order: l.order.map(|o| format!("{o:.4}")).unwrap_or_default(),
        });
    }
}

pub fn run(args: &RiccatiArgs) -> Result<bool, CliError> {
    let model = load_model(&args.common.model)?;
    let name = args
        .solution
        .clone()
        .or_else(|| model.file.solution.clone())
        .ok_or_else(|| anyhow!("no --solution given and the model names none"))?;
    let sol = ExactSolution::from_name(&name, args.amplitude).ok_or_else(|| anyhow!("unknown solution `{name}`"))?;
    let (nx, nt) = parse_pair::<usize, usize>(&args.grid).context("--grid")?;
    let spec = GridSpec { nx, nt, levels: args.levels, ..GridSpec::default() };
    let m = model.file.evolution_model().map_err(input)?;

    let mut rows = Vec::new();
    let mut equivalences = Vec::new();
    let mut grids = Vec::new();
    // (ratio to tolerance, message) and (min order, message)
    let mut eq_failures: Vec<(f64, String)> = Vec::new();
    let mut grid_failures: Vec<(f64, String)> = Vec::new();
    for &eta in &args.eta {
        let cf = SolutionField::new(&model.file.qr, &m, sol.clone(), eta).map_err(riccati_error)?;
        let path = PathSpec::along_x(spec.t0, spec.x0, spec.x1, args.steps);
        let eq = check_equivalences(&cf, path, args.phi0).map_err(riccati_error)?;
        equivalence_rows(&eq, path.h().abs(), &mut rows);
        if !eq.passed(EQUIVALENCE_TOL, WRONSKIAN_TOL) {
            let worst = (eq.angle.max(eq.projective) / EQUIVALENCE_TOL).max(eq.wronskian / WRONSKIAN_TOL);
            eq_failures.push((
                worst,
                format!(
                    "equivalence at eta={eta}: angle {:.2e}, linear {:.2e}, wronskian {:.2e}",
                    eq.angle, eq.projective, eq.wronskian
                ),
            ));
        }
        equivalences.push(eq);

        let theta = check_theta_closed(&cf, &spec).map_err(riccati_error)?;
        let [g, gh] = check_conservation_form(&cf, &spec).map_err(riccati_error)?;
        for r in [theta, g, gh] {
            grid_rows(&r, &mut rows);
            match r.status {
                GridStatus::Converged | GridStatus::Exact => {}
                GridStatus::Pole => eprintln!("{} at eta={eta}: rows meet a pole, not applicable", r.check),
                GridStatus::NotConverged => {
                    let last = r.levels.last().map_or(f64::NAN, |l| l.mismatch);
                    let order = r.min_order().unwrap_or(f64::NAN);
                    grid_failures.push((
                        order,
                        format!("{} at eta={eta}: min order {order:.3}, final mismatch {last:.2e}", r.check),
                    ));
                }
            }
            grids.push(r);
        }
    }

    let meta = RunManifest::new(
        "riccati",
        &model,
        args.common.seed,
        json!({
            "solution": sol.name(),
            "amplitude": args.amplitude,
            "eta": args.eta,
            "grid": spec,
            "steps": args.steps,
            "phi0": args.phi0,
        }),
    );
    let mut w = csv::Writer::from_writer(meta.csv_comment().into_bytes());
    for r in &rows {
        w.serialize(r).map_err(input)?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| input(anyhow!("{e}")))?).map_err(input)?;
    let out = args.common.out.as_deref();
    emit(out, "riccati.csv", &text)?;
    let passed = eq_failures.is_empty() && grid_failures.is_empty();
    if out.is_some() {
        emit_json(out, "riccati.json", &RiccatiReport { meta, passed, equivalences, grids })?;
    }

    // Lowest order first, then the largest tolerance ratio.
    grid_failures.sort_by(|a, b| a.0.total_cmp(&b.0));
    eq_failures.sort_by(|a, b| b.0.total_cmp(&a.0));
    let failures: Vec<String> = grid_failures.into_iter().chain(eq_failures).map(|(_, f)| f).collect();
    if let Some((worst, rest)) = failures.split_first() {
        eprintln!("worst offender: {worst}");
        for f in rest {
            eprintln!("also failing: {f}");
        }
    }
    Ok(passed)
}
