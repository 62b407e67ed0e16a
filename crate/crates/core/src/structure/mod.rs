//! Structure equations for one-form data describing pseudospherical
//! surfaces (Gaussian curvature fixed at -1).
//!
//! One-forms are given either as an [`FTable`] (`omega_a = f_a1 dx + f_a2 dt`,
//! with `omega_3 = omega_12`) or in the spectral [`QRModel`] coordinates
//! `(q, r, A, B, C)`. Every check returns exact residuals: normal forms
//! that vanish once the evolution equation is imposed.
//!
//! The angle `phi` is never solved for. Its equations
//! `phi_x = f31 + f11 sin(phi) + f21 cos(phi)` and
//! `phi_t = f32 + f12 sin(phi) + f22 cos(phi)` are appended to the
//! evolution model as a constraint and an evolution for the field `phi`.

mod model_file;

pub use model_file::{ModelFile, ModelFileError};

use serde::Serialize;
use thiserror::Error;

use crate::symcore::{rat, EvolutionModel, Generator, NormalForm, SymError};

/// Name of the auxiliary angle field.
pub const PHI: &str = "phi";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("the q entry must reduce to a single field, got `{0}`")]
    NotAField(String),
    #[error("derived evolution for `{field}` still depends on eta: {expr}")]
    EtaDependent { field: String, expr: String },
    #[error("the q_t and r_t equations disagree on-shell; r_t residual is {0}")]
    Inconsistent(String),
    #[error("field name `phi` is reserved for the angle variable")]
    PhiInUse,
}

/// `(q, r, A, B, C)` with the spectral parameter appearing as `eta`.
#[derive(Clone, Debug, PartialEq)]
pub struct QRModel {
    pub q: NormalForm,
    pub r: NormalForm,
    pub a: NormalForm,
    pub b: NormalForm,
    pub c: NormalForm,
}

impl QRModel {
    pub fn parse(q: &str, r: &str, a: &str, b: &str, c: &str) -> Result<Self, SymError> {
        use crate::symcore::parse_normal;
        Ok(QRModel {
            q: parse_normal(q)?,
            r: parse_normal(r)?,
            a: parse_normal(a)?,
            b: parse_normal(b)?,
            c: parse_normal(c)?,
        })
    }

    /// Data whose `Gamma` equations are the `Gamma-hat` equations of `self`:
    /// `q <-> r`, `B <-> C`, `A -> -A`, all under `eta -> -eta`.
    pub fn mirror(&self) -> QRModel {
        let flip = |e: &NormalForm| e.negate_generator(&Generator::Eta);
        QRModel {
            q: flip(&self.r),
            r: flip(&self.q),
            a: -flip(&self.a),
            b: flip(&self.c),
            c: flip(&self.b),
        }
    }
}

/// `f[a][b]` holds `f_{a+1, b+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FTable {
    pub f: [[NormalForm; 2]; 3],
}

impl FTable {
    pub fn new(f: [[NormalForm; 2]; 3]) -> Self {
        FTable { f }
    }

    /// One-based accessor matching the usual `f_{alpha beta}` labels.
    pub fn get(&self, alpha: usize, beta: usize) -> &NormalForm {
        &self.f[alpha - 1][beta - 1]
    }

    pub fn get_mut(&mut self, alpha: usize, beta: usize) -> &mut NormalForm {
        &mut self.f[alpha - 1][beta - 1]
    }
}

/// The three structure-equation residuals, in order.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureResidual {
    pub residuals: [NormalForm; 3],
}

impl StructureResidual {
    pub fn all_zero(&self) -> bool {
        self.residuals.iter().all(NormalForm::is_zero)
    }
}

/// `f11 = -eta, f12 = -2A, f21 = r + q, f22 = C + B, f31 = r - q, f32 = C - B`.
pub fn qr_to_f(qr: &QRModel) -> FTable {
    FTable::new([
        [-NormalForm::eta(), qr.a.scale(&rat(-2, 1))],
        [&qr.r + &qr.q, &qr.c + &qr.b],
        [&qr.r - &qr.q, &qr.c - &qr.b],
    ])
}

/// Residuals of the coefficient system with `K = -1`:
///
/// ```text
/// -f11_t + f12_x - (f31 f22 - f21 f32)
/// -f21_t + f22_x - (f11 f32 - f12 f31)
/// -f31_t + f32_x - (f11 f22 - f12 f21)
/// ```
pub fn residuals_f(ft: &FTable, m: &EvolutionModel) -> Result<StructureResidual, SymError> {
    let f = |a, b| ft.get(a, b);
    let cross = |a1, b1, a2, b2, a3, b3, a4, b4| &(f(a1, b1) * f(a2, b2)) - &(f(a3, b3) * f(a4, b4));
    let row = |alpha: usize, quad: NormalForm| -> Result<NormalForm, SymError> {
        let lhs = &m.total_dx(f(alpha, 2))? - &m.total_dt(f(alpha, 1))?;
        m.reduce(&(&lhs - &quad))
    };
    Ok(StructureResidual {
        residuals: [
            row(1, cross(3, 1, 2, 2, 2, 1, 3, 2))?,
            row(2, cross(1, 1, 3, 2, 1, 2, 3, 1))?,
            row(3, cross(1, 1, 2, 2, 1, 2, 2, 1))?,
        ],
    })
}

/// `A_x - (qC - rB)`; involves no time derivative.
pub fn qr_identity_residual(qr: &QRModel, m: &EvolutionModel) -> Result<NormalForm, SymError> {
    let rhs = &(&qr.q * &qr.c) - &(&qr.r * &qr.b);
    m.reduce(&(&m.total_dx(&qr.a)? - &rhs))
}

fn q_flow(qr: &QRModel, m: &EvolutionModel) -> Result<NormalForm, SymError> {
    let eta = NormalForm::eta();
    let two_a_q = (&qr.a * &qr.q).scale(&rat(2, 1));
    m.reduce(&(&(&m.total_dx(&qr.b)? + &two_a_q) - &(&eta * &qr.b)))
}

fn r_flow(qr: &QRModel, m: &EvolutionModel) -> Result<NormalForm, SymError> {
    let eta = NormalForm::eta();
    let two_a_r = (&qr.a * &qr.r).scale(&rat(2, 1));
    m.reduce(&(&(&m.total_dx(&qr.c)? - &two_a_r) + &(&eta * &qr.c)))
}

/// Residuals `A_x - (qC - rB)`, `q_t - (B_x + 2Aq - eta B)`,
/// `r_t - (C_x - 2Ar + eta C)`, with time derivatives taken on-shell.
pub fn residuals_qr(qr: &QRModel, m: &EvolutionModel) -> Result<StructureResidual, SymError> {
    Ok(StructureResidual {
        residuals: [
            qr_identity_residual(qr, m)?,
            m.reduce(&(&m.total_dt(&qr.q)? - &q_flow(qr, m)?))?,
            m.reduce(&(&m.total_dt(&qr.r)? - &r_flow(qr, m)?))?,
        ],
    })
}

fn as_field(e: &NormalForm) -> Option<String> {
    match e.as_generator()? {
        Generator::Jet { field, order: 0 } => Some(field.to_string()),
        _ => None,
    }
}

/// Reads the evolution equation off the `q_t` equation of the coefficient
/// system.
///
/// `base` supplies constraints only (for example `u_x -> 2q`). The q entry
/// must reduce to a bare field `f`; the result adds `f_t = B_x + 2Aq - eta B`,
/// which must be free of `eta`. If `r` reduces to a second free field its
/// flow is derived the same way; otherwise the `r_t` equation must hold
/// on-shell.
pub fn derive_evolution(qr: &QRModel, base: &EvolutionModel) -> Result<EvolutionModel, StructureError> {
    let q = base.reduce(&qr.q)?;
    let field = as_field(&q).ok_or_else(|| StructureError::NotAField(q.to_string()))?;
    let eq = q_flow(qr, base)?;
    if eq.contains(&Generator::Eta) {
        return Err(StructureError::EtaDependent { field, expr: eq.to_string() });
    }
    let m = base.clone().with_evolution(&field, eq)?;

    let r = base.reduce(&qr.r)?;
    if let Some(g) = as_field(&r).filter(|g| *g != field && m.evolution(g).is_none()) {
        let er = r_flow(qr, &m)?;
        if er.contains(&Generator::Eta) {
            return Err(StructureError::EtaDependent { field: g, expr: er.to_string() });
        }
        return Ok(m.with_evolution(&g, er)?);
    }
    let res = m.reduce(&(&m.total_dt(&r)? - &r_flow(qr, &m)?))?;
    if !res.is_zero() {
        return Err(StructureError::Inconsistent(res.to_string()));
    }
    Ok(m)
}

/// The angle equations `(phi_x, phi_t)` as functions of `phi`.
pub fn phi_system(ft: &FTable) -> (NormalForm, NormalForm) {
    let s = NormalForm::generator(Generator::sin(PHI));
    let c = NormalForm::generator(Generator::cos(PHI));
    let side = |beta| &(ft.get(3, beta) + &(ft.get(1, beta) * &s)) + &(ft.get(2, beta) * &c);
    (side(1), side(2))
}

/// `m` extended by `phi_x = X` (constraint) and `phi_t = T` (evolution).
pub fn with_phi(ft: &FTable, m: &EvolutionModel) -> Result<EvolutionModel, StructureError> {
    let phi = crate::symcore::Symbol::new(PHI);
    let used = m.evolutions().any(|(f, _)| *f == phi) || m.constraints().any(|(f, _, _)| *f == phi);
    if used {
        return Err(StructureError::PhiInUse);
    }
    let (x, t) = phi_system(ft);
    Ok(m.clone()
        .with_constraint(PHI, 1, m.reduce(&x)?)?
        .with_evolution(PHI, t)?)
}

/// `phi_xt - phi_tx = D_t X - D_x T` in the extended model.
pub fn phi_compatibility(ft: &FTable, m: &EvolutionModel) -> Result<NormalForm, StructureError> {
    let mp = with_phi(ft, m)?;
    let (x, t) = phi_system(ft);
    Ok(mp.reduce(&(&mp.total_dt(&x)? - &mp.total_dx(&t)?))?)
}

/// `dx^dt` coefficients of `d theta_1` and `d Phi`, where
/// `theta_1 = (f11 cos phi - f21 sin phi) dx + (f12 cos phi - f22 sin phi) dt`
/// and `Phi = omega_12 - d phi + sin(phi) omega_1 + cos(phi) omega_2`.
pub fn closedness_residuals(ft: &FTable, m: &EvolutionModel) -> Result<(NormalForm, NormalForm), StructureError> {
    let mp = with_phi(ft, m)?;
    let s = NormalForm::generator(Generator::sin(PHI));
    let c = NormalForm::generator(Generator::cos(PHI));
    let p = &(ft.get(1, 1) * &c) - &(ft.get(2, 1) * &s);
    let q = &(ft.get(1, 2) * &c) - &(ft.get(2, 2) * &s);
    let theta = mp.reduce(&(&mp.total_dx(&q)? - &mp.total_dt(&p)?))?;
    // d(d phi) = 0, so only the omega part of Phi contributes.
    let (x, t) = phi_system(ft);
    let big_phi = mp.reduce(&(&mp.total_dx(&t)? - &mp.total_dt(&x)?))?;
    Ok((theta, big_phi))
}

/// One named entry of a structure report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub name: String,
    pub onshell_zero: bool,
    pub expression: String,
}

impl ResidualEntry {
    fn new(name: &str, e: &NormalForm) -> Self {
        ResidualEntry {
            name: name.to_string(),
            onshell_zero: e.is_zero(),
            expression: e.to_string(),
        }
    }
}

/// Runs every structure check. The f-table defaults to `qr_to_f(qr)`.
pub fn check_all(qr: &QRModel, ft: Option<&FTable>, m: &EvolutionModel) -> Result<Vec<ResidualEntry>, StructureError> {
    let derived;
    let ft = match ft {
        Some(ft) => ft,
        None => {
            derived = qr_to_f(qr);
            &derived
        }
    };
    let mut out = Vec::new();
    for (i, e) in residuals_qr(qr, m)?.residuals.iter().enumerate() {
        out.push(ResidualEntry::new(&format!("qr.{}", i + 1), e));
    }
    for (i, e) in residuals_f(ft, m)?.residuals.iter().enumerate() {
        out.push(ResidualEntry::new(&format!("f.{}", i + 1), e));
    }
    out.push(ResidualEntry::new("phi_compatibility", &phi_compatibility(ft, m)?));
    let (theta, big_phi) = closedness_residuals(ft, m)?;
    out.push(ResidualEntry::new("closedness.theta1", &theta));
    out.push(ResidualEntry::new("closedness.Phi", &big_phi));
    Ok(out)
}
