//! TOML model files.
//!
//! ```toml
//! [model]
//! name = "mkdv"
//! field = "q"
//! equation = "q_t + 6*q^2*q_x + q_xxx = 0"   # informational
//! solution = "mkdv-soliton"                   # optional
//! evolution = { q = "-6*q^2*q_x - q_xxx" }    # derived from [qr] when absent
//! constraints = { r = "-q" }                  # keys are jets: r, u_x, D[u,2]
//!
//! [qr]
//! q = "q"
//! r = "-q"
//! A = "-1/2*eta^3 - eta*q^2"
//! B = "..."
//! C = "..."
//!
//! [f]   # optional raw table, f11 .. f32
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use super::{derive_evolution, FTable, QRModel, StructureError};
use crate::symcore::{parse, EvolutionModel, Expr, Generator, NormalForm, SymError};

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed model file: {0}")]
    Toml(String),
    #[error("in `{key}`: {source}")]
    Expr { key: String, source: SymError },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    model: RawModel,
    qr: RawQr,
    f: Option<RawF>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    name: Option<String>,
    field: Option<String>,
    equation: Option<String>,
    solution: Option<String>,
    #[serde(default)]
    evolution: BTreeMap<String, String>,
    #[serde(default)]
    constraints: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQr {
    q: String,
    r: String,
    #[serde(rename = "A")]
    a: String,
    #[serde(rename = "B")]
    b: String,
    #[serde(rename = "C")]
    c: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawF {
    f11: String,
    f12: String,
    f21: String,
    f22: String,
    f31: String,
    f32: String,
}

/// A parsed model file.
#[derive(Clone, Debug)]
pub struct ModelFile {
    pub name: Option<String>,
    pub field: String,
    pub equation: Option<String>,
    pub solution: Option<String>,
    /// Constraints only.
    pub base: EvolutionModel,
    /// Constraints plus the stated evolution, when one is given.
    pub stated: Option<EvolutionModel>,
    pub qr: QRModel,
    pub f: Option<FTable>,
}

fn expr(key: &str, text: &str) -> Result<NormalForm, ModelFileError> {
    parse(text)
        .map_err(SymError::from)
        .and_then(|e| e.normalize())
        .map_err(|source| ModelFileError::Expr { key: key.to_string(), source })
}

fn jet_key(key: &str) -> Result<(String, u32), ModelFileError> {
    match parse(key) {
        Ok(Expr::Gen(Generator::Jet { field, order })) => Ok((field.to_string(), order)),
        _ => Err(ModelFileError::Invalid(format!("constraint key `{key}` is not a jet"))),
    }
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<Self, ModelFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| ModelFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ModelFileError> {
        let raw: RawFile = toml::from_str(text).map_err(|e| ModelFileError::Toml(e.to_string()))?;
        let field = raw.model.field.unwrap_or_else(|| "q".to_string());

        let mut base = EvolutionModel::new();
        for (k, v) in &raw.model.constraints {
            let (f, order) = jet_key(k)?;
            let key = format!("model.constraints.{k}");
            let v = expr(&key, v)?;
            base = base
                .with_constraint(&f, order, v)
                .map_err(|source| ModelFileError::Expr { key, source })?;
        }

        let stated = if raw.model.evolution.is_empty() {
            None
        } else {
            let mut m = base.clone();
            for (f, v) in &raw.model.evolution {
                let e = expr(&format!("model.evolution.{f}"), v)?;
                m = m
                    .with_evolution(f, e)
                    .map_err(|source| ModelFileError::Expr { key: format!("model.evolution.{f}"), source })?;
            }
            Some(m)
        };

        let qr = QRModel {
            q: expr("qr.q", &raw.qr.q)?,
            r: expr("qr.r", &raw.qr.r)?,
            a: expr("qr.A", &raw.qr.a)?,
            b: expr("qr.B", &raw.qr.b)?,
            c: expr("qr.C", &raw.qr.c)?,
        };
        let f = match raw.f {
            None => None,
            Some(t) => Some(FTable::new([
                [expr("f.f11", &t.f11)?, expr("f.f12", &t.f12)?],
                [expr("f.f21", &t.f21)?, expr("f.f22", &t.f22)?],
                [expr("f.f31", &t.f31)?, expr("f.f32", &t.f32)?],
            ])),
        };
        Ok(ModelFile {
            name: raw.model.name,
            field,
            equation: raw.model.equation,
            solution: raw.model.solution,
            base,
            stated,
            qr,
            f,
        })
    }

    /// The stated evolution model, or one derived from the `[qr]` data.
    pub fn evolution_model(&self) -> Result<EvolutionModel, StructureError> {
        match &self.stated {
            Some(m) => Ok(m.clone()),
            None => derive_evolution(&self.qr, &self.base),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_normal;

    const SG: &str = r#"
[model]
name = "sine-gordon"
constraints = { u_x = "2*q", r = "-q" }

[qr]
q = "u_x/2"
r = "-u_x/2"
A = "cos(u)/(2*eta)"
B = "-sin(u)/(2*eta)"
C = "-sin(u)/(2*eta)"
"#;

    #[test]
    fn derives_when_no_evolution_is_stated() {
        let mf = ModelFile::parse(SG).unwrap();
        assert!(mf.stated.is_none());
        let m = mf.evolution_model().unwrap();
        assert_eq!(m.evolution("q").unwrap(), &parse_normal("sin(u)/2").unwrap());
    }

    #[test]
    fn reports_the_offending_key() {
        let bad = SG.replace("cos(u)/(2*eta)", "cos(u)/(2*eta");
        match ModelFile::parse(&bad) {
            Err(ModelFileError::Expr { key, .. }) => assert_eq!(key, "qr.A"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(ModelFile::parse("[model]\n"), Err(ModelFileError::Toml(_))));
    }

    #[test]
    fn rejects_non_jet_constraint_keys() {
        let bad = SG.replace("u_x = ", "\"sin(u)\" = ");
        assert!(matches!(ModelFile::parse(&bad), Err(ModelFileError::Invalid(_))));
    }
}
