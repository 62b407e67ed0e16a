use std::collections::BTreeMap;

use clap::Args;
use psurf::structure::check_all;
use psurf::symcore::parse_normal;
use psurf::symcore::probe::probe_max_abs;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{emit_json, input, load_model, CliError, Common, RunManifest};

const PROBES: usize = 32;

#[derive(Args, Clone, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct Residual {
    onshell_zero: bool,
    expression: String,
    /// Largest magnitude at seeded random jet values; only for nonzero residuals.
    #[serde(skip_serializing_if = "Option::is_none")]
    probe: Option<f64>,
}

#[derive(Serialize)]
struct CheckReport {
    meta: RunManifest,
    passed: bool,
    residuals: BTreeMap<String, Residual>,
}

pub fn run(args: &CheckArgs) -> Result<bool, CliError> {
    let model = load_model(&args.common.model)?;
    let m = match model.file.evolution_model() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("no evolution could be derived from [qr]: {e}");
            return Ok(false);
        }
    };
    let entries = check_all(&model.file.qr, model.file.f.as_ref(), &m).map_err(input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.common.seed);
    let mut residuals = BTreeMap::new();
    for e in &entries {
        let probe = if e.onshell_zero {
            None
        } else {
            eprintln!("residual {} is not zero on-shell: {}", e.name, e.expression);
            parse_normal(&e.expression).ok().map(|nf| probe_max_abs(&nf, &mut rng, PROBES))
        };
        residuals.insert(
            e.name.clone(),
            Residual { onshell_zero: e.onshell_zero, expression: e.expression.clone(), probe },
        );
    }
    let passed = entries.iter().all(|e| e.onshell_zero);
    let meta = RunManifest::new("check", &model, args.common.seed, json!({ "probes": PROBES }));
    emit_json(args.common.out.as_deref(), "check.json", &CheckReport { meta, passed, residuals })?;
    if passed {
        eprintln!("all {} residuals vanish on-shell", entries.len());
    }
    Ok(passed)
}
