//! Subcommands and the plumbing they share: model loading, run manifests
//! and report output.

pub mod bench;
pub mod check;
pub mod laws;
pub mod riccati;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use psurf::structure::ModelFile;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Model file (TOML with [model] and [qr] sections).
    #[arg(long)]
    pub model: PathBuf,
    /// Directory for report files; reports go to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for randomized probe points, recorded in every report.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug)]
pub enum CliError {
    Input(anyhow::Error),
    Numeric(anyhow::Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "{e:#}"),
            CliError::Numeric(e) => write!(f, "numeric failure: {e:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Input(e)
    }
}

pub fn input(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Input(e.into())
}

pub struct LoadedModel {
    pub path: String,
    pub sha256: String,
    pub file: ModelFile,
}

pub fn load_model(path: &Path) -> Result<LoadedModel, CliError> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let text = String::from_utf8(bytes.clone()).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let file = ModelFile::parse(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(LoadedModel {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
        file,
    })
}

/// Everything needed to reproduce a report.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub model: String,
    pub model_sha256: String,
    pub seed: u64,
    pub params: Value,
}

impl RunManifest {
    pub fn new(command: &'static str, model: &LoadedModel, seed: u64, params: Value) -> Self {
        RunManifest {
            tool: "psurf",
            version: env!("CARGO_PKG_VERSION"),
            command,
            model: model.path.clone(),
            model_sha256: model.sha256.clone(),
            seed,
            params,
        }
    }

    /// Header lines for CSV reports.
    pub fn csv_comment(&self) -> String {
        format!(
            "# {} {} {} model={} sha256={} seed={}\n",
            self.tool, self.version, self.command, self.model, self.model_sha256, self.seed
        )
    }
}

/// Rounds a float to 12 significant digits so reports are stable text.
pub fn fixed(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Floats formatted for CSV cells.
pub fn cell(x: f64) -> String {
    format!("{x:.6e}")
}

fn fix_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(fixed(x)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(xs) => Value::Array(xs.into_iter().map(fix_floats).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, fix_floats(v))).collect()),
        v => v,
    }
}

/// Writes `out/name`, or stdout when no directory is given.
pub fn emit(out: Option<&Path>, name: &str, text: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let path = dir.join(name);
            fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).context("cannot write to stdout")?;
        }
    }
    Ok(())
}

pub fn emit_json(out: Option<&Path>, name: &str, value: &impl Serialize) -> Result<(), CliError> {
    let v = fix_floats(serde_json::to_value(value).context("cannot serialize report")?);
    let mut text = serde_json::to_string_pretty(&v).context("cannot serialize report")?;
    text.push('\n');
    emit(out, name, &text)
}

/// Parses `AxB`.
pub fn parse_pair<A: std::str::FromStr, B: std::str::FromStr>(text: &str) -> anyhow::Result<(A, B)> {
    let (a, b) = text
        .split_once(['x', 'X'])
        .with_context(|| format!("expected AxB, got `{text}`"))?;
    let a = a.trim().parse().ok().with_context(|| format!("bad first component in `{text}`"))?;
    let b = b.trim().parse().ok().with_context(|| format!("bad second component in `{text}`"))?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_and_rounding() {
        assert_eq!(parse_pair::<f64, usize>("40x512").unwrap(), (40.0, 512));
        assert!(parse_pair::<f64, usize>("40,512").is_err());
        assert_eq!(fixed(0.1 + 0.2), 0.3);
        let v = fix_floats(serde_json::json!({"a": [1.0000000000000002, 3], "b": 2}));
        assert_eq!(v, serde_json::json!({"a": [1.0, 3], "b": 2}));
    }
}
