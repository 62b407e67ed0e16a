use clap::Args;
use psurf::claws::{hierarchy, LawReport};
use psurf::structure::check_all;
use serde::Serialize;
use serde_json::json;

use super::{emit_json, input, load_model, CliError, Common, RunManifest};

#[derive(Args, Clone, Debug)]
pub struct LawsArgs {
    #[command(flatten)]
    pub common: Common,
    /// Highest order to generate.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Use the mirrored data (the Gamma-hat hierarchy).
    #[arg(long)]
    pub mirror: bool,
    /// Also print a table to stderr.
    #[arg(long)]
    pub table: bool,
}

#[derive(Serialize)]
struct LawsReport {
    meta: RunManifest,
    laws: Vec<LawReport>,
    cancelled: Vec<usize>,
}

pub fn run(args: &LawsArgs) -> Result<bool, CliError> {
    let model = load_model(&args.common.model)?;
    let m = match model.file.evolution_model() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("no evolution could be derived from [qr]: {e}");
            return Ok(false);
        }
    };
    let failing: Vec<String> = check_all(&model.file.qr, model.file.f.as_ref(), &m)
        .map_err(input)?
        .into_iter()
        .filter(|e| !e.onshell_zero)
        .map(|e| e.name)
        .collect();
    if !failing.is_empty() {
        eprintln!("structure check fails ({}); the hierarchy would be meaningless", failing.join(", "));
        return Ok(false);
    }
    let h = match hierarchy(&model.file.qr, &m, args.n, args.mirror) {
        Ok(h) => h,
        Err(e) => {
            eprintln!("hierarchy generation failed: {e}");
            return Ok(false);
        }
    };
    let laws = h.reports();
    if args.table {
        eprintln!("{:>3}  {:<8} {:<8} density", "n", "trivial", "verified");
        for l in &laws {
            eprintln!("{:>3}  {:<8} {:<8} {}", l.n, l.trivial, l.verified, l.density);
        }
    }
    for l in laws.iter().filter(|l| !l.verified) {
        eprintln!("law {} fails exact verification", l.n);
    }
    let meta = RunManifest::new("laws", &model, args.common.seed, json!({ "n": args.n, "mirror": args.mirror }));
    let passed = h.all_verified();
    emit_json(args.common.out.as_deref(), "laws.json", &LawsReport { meta, laws, cancelled: h.cancelled })?;
    Ok(passed)
}
