//! Conservation-law hierarchy from the Riccati series.
//!
//! Writing `q Gamma = sum_n g_n eta^-n`, the x-part of the Riccati equation
//! yields the recursion
//!
//! ```text
//! g_1 = q r
//! g_{n+1} = -sum_{k=1}^{n-1} g_k g_{n-k} - q D_x(g_n / q)
//! ```
//!
//! and the conservation form `(q Gamma)_t = (A + B Gamma)_x` gives, power by
//! power in `eta`, `D_t g_n = D_x F_n` with
//! `F_n = A_{-n} + sum_j B_j g_{n+j} / q` (`A_k`, `B_j` the Laurent
//! coefficients of `A` and `B`). Non-negative powers carry no density and
//! must be x-constant on-shell.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::structure::QRModel;
use crate::symcore::{EvolutionModel, Generator, LaurentSeries, NormalForm, SymError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClawError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("q reduces to zero; the series q*Gamma is undefined")]
    ZeroQ,
    #[error("unmatched positive power eta^{power}: coefficient {coefficient} is not x-constant on-shell")]
    UnmatchedPositivePower { power: i64, coefficient: String },
    #[error("density is not polynomial in jets: {0}")]
    NonPolynomial(String),
}

/// `g_1 .. g_N` together with the reduced `q` and the model used for `D_x`.
#[derive(Clone, Debug)]
pub struct GSequence {
    q: NormalForm,
    terms: Vec<NormalForm>,
    model: EvolutionModel,
}

impl GSequence {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `g_n`, one-based.
    pub fn get(&self, n: usize) -> &NormalForm {
        &self.terms[n - 1]
    }

    pub fn terms(&self) -> &[NormalForm] {
        &self.terms
    }

    pub fn q(&self) -> &NormalForm {
        &self.q
    }

    /// `g_{n+1} + sum_{k=1}^{n-1} g_k g_{n-k} + q D_x(g_n/q)` for `1 <= n < N`.
    pub fn recursion_residual(&self, n: usize) -> Result<NormalForm, SymError> {
        let next = next_term(&self.q, &self.terms[..n], &self.model)?;
        Ok(self.get(n + 1) - &next)
    }

    /// `eta S - q r + S^2 + q D_x(S / q)` for the truncation
    /// `S = sum_{n<=N} g_n eta^-n`. Its `eta^-m` coefficients vanish for
    /// `0 <= m < N`.
    pub fn series_residual(&self, r: &NormalForm) -> Result<NormalForm, SymError> {
        let m = &self.model;
        let eta = NormalForm::eta();
        let mut s = NormalForm::zero();
        for (i, g) in self.terms.iter().enumerate() {
            s = &s + &(g * &eta.pow(-(i as i64 + 1))?);
        }
        let qr = m.reduce(&(&self.q * r))?;
        let dx = &self.q * &m.total_dx(&s.try_div(&self.q)?)?;
        m.reduce(&(&(&(&(&eta * &s) - &qr) + &(&s * &s)) + &dx))
    }
}

fn next_term(q: &NormalForm, g: &[NormalForm], m: &EvolutionModel) -> Result<NormalForm, SymError> {
    let n = g.len();
    let mut acc = -(q * &m.total_dx(&g[n - 1].try_div(q)?)?);
    for k in 1..n {
        acc = &acc - &(&g[k - 1] * &g[n - k - 1]);
    }
    m.reduce(&acc)
}

/// `g_1 .. g_N` for the data `qr` with constraints from `m`.
pub fn g_sequence(qr: &QRModel, m: &EvolutionModel, count: usize) -> Result<GSequence, ClawError> {
    let q = m.reduce(&qr.q)?;
    if q.is_zero() {
        return Err(ClawError::ZeroQ);
    }
    let mut terms = Vec::with_capacity(count);
    if count > 0 {
        terms.push(m.reduce(&(&q * &qr.r))?);
    }
    while terms.len() < count {
        let g = next_term(&q, &terms, m)?;
        terms.push(g);
    }
    Ok(GSequence { q, terms, model: m.clone() })
}

/// `D_t(density) = D_x(flux)` on-shell.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservationLaw {
    pub order: usize,
    pub density: NormalForm,
    pub flux: NormalForm,
    /// Density is a total x-derivative.
    pub trivial: bool,
}

/// Laws obtained by eta-matching, plus the orders whose flux carries no
/// series contribution (both sides reduce to the seed data alone).
#[derive(Clone, Debug)]
pub struct FluxSequence {
    pub laws: Vec<ConservationLaw>,
    pub cancelled: Vec<usize>,
}

/// Number of `g` terms [`flux_sequence`] needs to produce `n` laws.
pub fn terms_needed(qr: &QRModel, n: usize) -> Result<usize, ClawError> {
    let b = LaurentSeries::of(&qr.b)?;
    let top = b.max_power().unwrap_or(0).max(0) as usize;
    Ok(n + top)
}

/// Matches powers of `eta` in the conservation form for orders
/// `1..=gs.len() - j_max`, where `j_max` is the top power of `eta` in `B`.
/// Triviality flags are left `false`; see [`euler_trivial`].
pub fn flux_sequence(qr: &QRModel, gs: &GSequence, m: &EvolutionModel) -> Result<FluxSequence, ClawError> {
    let a = LaurentSeries::of(&m.reduce(&qr.a)?)?;
    let b = LaurentSeries::of(&m.reduce(&qr.b)?)?;
    let q = gs.q();
    let big_n = gs.len() as i64;
    let g_over_q = |k: i64| -> Result<Option<NormalForm>, SymError> {
        if k < 1 || k > big_n {
            return Ok(None);
        }
        gs.get(k as usize).try_div(q).map(Some)
    };

    // eta^k, k >= 0: no density on the left, so the coefficient must be
    // x-constant.
    let top = a.max_power().unwrap_or(0).max(b.max_power().unwrap_or(0) - 1);
    for k in 0..=top.max(0) {
        let mut c = a.coeff(k);
        for (j, bj) in b.powers() {
            if let Some(t) = g_over_q(j - k)? {
                c = &c + &(bj * &t);
            }
        }
        if !m.total_dx(&c)?.is_zero() {
            return Err(ClawError::UnmatchedPositivePower { power: k, coefficient: m.reduce(&c)?.to_string() });
        }
    }

    let j_max = b.max_power().unwrap_or(0).max(0);
    let mut laws = Vec::new();
    let mut cancelled = Vec::new();
    for n in 1..=(big_n - j_max) {
        let mut flux = a.coeff(-n);
        let mut from_series = false;
        for (j, bj) in b.powers() {
            if let Some(t) = g_over_q(n + j)? {
                flux = &flux + &(bj * &t);
                from_series = true;
            }
        }
        if !from_series {
            cancelled.push(n as usize);
            continue;
        }
        laws.push(ConservationLaw {
            order: n as usize,
            density: gs.get(n as usize).clone(),
            flux: m.reduce(&flux)?,
            trivial: false,
        });
    }
    Ok(FluxSequence { laws, cancelled })
}

/// Exact on-shell test of `D_t(density) - D_x(flux) = 0`.
pub fn verify(law: &ConservationLaw, m: &EvolutionModel) -> Result<bool, SymError> {
    let r = &m.total_dt(&law.density)? - &m.total_dx(&law.flux)?;
    Ok(m.reduce(&r)?.is_zero())
}

/// Euler operator `sum_k (-D_x)^k d/d(f_k)` applied for every jet field `f`
/// of a polynomial density. True iff the density is a total x-derivative.
pub fn euler_trivial(density: &NormalForm, m: &EvolutionModel) -> Result<bool, ClawError> {
    let d = m.reduce(density)?;
    let non_poly = !d.is_polynomial()
        || d.generators().iter().any(|g| !matches!(g, Generator::Jet { .. }));
    if non_poly {
        return Err(ClawError::NonPolynomial(d.to_string()));
    }
    let num = d.numerator();
    let mut fields: Vec<_> = d.generators().iter().filter_map(|g| g.field().cloned()).collect();
    fields.dedup();
    for f in fields {
        let top = d
            .generators()
            .iter()
            .filter_map(|g| match g {
                Generator::Jet { field, order } if *field == f => Some(*order),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let mut total = NormalForm::zero();
        for k in (0..=top).rev() {
            // Horner form of sum_k (-D_x)^k P_k.
            let pk = NormalForm::from_poly(num.partial(&Generator::Jet { field: f.clone(), order: k }));
            total = &pk - &m.total_dx(&total)?;
        }
        if !total.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Serializable summary of one law.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawReport {
    pub n: usize,
    pub density: String,
    pub flux: String,
    pub trivial: bool,
    pub verified: bool,
}

/// A generated and checked hierarchy.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub g: GSequence,
    pub laws: Vec<ConservationLaw>,
    pub verified: Vec<bool>,
    pub cancelled: Vec<usize>,
}

impl Hierarchy {
    pub fn reports(&self) -> Vec<LawReport> {
        self.laws
            .iter()
            .zip(&self.verified)
            .map(|(l, v)| LawReport {
                n: l.order,
                density: l.density.to_string(),
                flux: l.flux.to_string(),
                trivial: l.trivial,
                verified: *v,
            })
            .collect()
    }

    pub fn all_verified(&self) -> bool {
        self.verified.iter().all(|v| *v)
    }
}

/// Generates orders `1..=n` (minus cancelled ones), then verifies each law
/// and tests its density for triviality in parallel. With `mirror`, the
/// `Gamma-hat` hierarchy is produced from the mirrored data instead.
pub fn hierarchy(qr: &QRModel, m: &EvolutionModel, n: usize, mirror: bool) -> Result<Hierarchy, ClawError> {
    let data = if mirror { qr.mirror() } else { qr.clone() };
    if n == 0 {
        return Ok(Hierarchy {
            g: GSequence { q: m.reduce(&data.q)?, terms: Vec::new(), model: m.clone() },
            laws: Vec::new(),
            verified: Vec::new(),
            cancelled: Vec::new(),
        });
    }
    let g = g_sequence(&data, m, terms_needed(&data, n)?)?;
    let FluxSequence { laws, cancelled } = flux_sequence(&data, &g, m)?;
    let checked: Vec<(ConservationLaw, bool)> = laws
        .into_par_iter()
        .filter(|l| l.order <= n)
        .map(|mut l| -> Result<_, ClawError> {
            let ok = verify(&l, m)?;
            l.trivial = euler_trivial(&l.density, m)?;
            Ok((l, ok))
        })
        .collect::<Result<_, _>>()?;
    let (laws, verified) = checked.into_iter().unzip();
    Ok(Hierarchy {
        g,
        laws,
        verified,
        cancelled: cancelled.into_iter().filter(|k| *k <= n).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_normal;

    fn mkdv() -> (QRModel, EvolutionModel) {
        let qr = QRModel::parse(
            "q",
            "-q",
            "-1/2*eta^3 - eta*q^2",
            "-q_xx - eta*q_x - eta^2*q - 2*q^3",
            "q_xx - eta*q_x + eta^2*q + 2*q^3",
        )
        .unwrap();
        let m = EvolutionModel::new()
            .with_evolution("q", parse_normal("-6*q^2*q_x - q_xxx").unwrap())
            .unwrap();
        (qr, m)
    }

    #[test]
    fn first_terms_for_mkdv() {
        let (qr, m) = mkdv();
        let gs = g_sequence(&qr, &m, 4).unwrap();
        assert_eq!(gs.get(1), &parse_normal("-q^2").unwrap());
        assert_eq!(gs.get(2), &parse_normal("q*q_x").unwrap());
        assert_eq!(gs.get(3), &parse_normal("-q^4 - q*q_xx").unwrap());
        assert_eq!(gs.get(4), &parse_normal("5*q^3*q_x + q*q_xxx").unwrap());
        for n in 1..4 {
            assert!(gs.recursion_residual(n).unwrap().is_zero());
        }
    }

    #[test]
    fn zero_q_is_rejected() {
        let qr = QRModel::parse("0", "1", "0", "0", "0").unwrap();
        assert!(matches!(g_sequence(&qr, &EvolutionModel::new(), 2), Err(ClawError::ZeroQ)));
    }

    #[test]
    fn mkdv_first_law_matches_closed_form() {
        let (qr, m) = mkdv();
        let gs = g_sequence(&qr, &m, 3).unwrap();
        let fs = flux_sequence(&qr, &gs, &m).unwrap();
        assert_eq!(fs.laws.len(), 1);
        let expect = parse_normal("-((q_xx/q + 2*q^2)*(-q^2) + q_x/q*(q*q_x) + (-q^4 - q*q_xx))").unwrap();
        assert_eq!(fs.laws[0].flux, expect);
        assert!(verify(&fs.laws[0], &m).unwrap());
    }

    #[test]
    fn wrong_flux_fails_verification() {
        let (_, m) = mkdv();
        let law = ConservationLaw { order: 0, density: NormalForm::jet("q", 0), flux: NormalForm::zero(), trivial: false };
        assert!(!verify(&law, &m).unwrap());
    }

    #[test]
    fn euler_examples() {
        let m = EvolutionModel::new();
        assert!(euler_trivial(&parse_normal("q*q_x").unwrap(), &m).unwrap());
        assert!(!euler_trivial(&parse_normal("-q^2").unwrap(), &m).unwrap());
        assert!(euler_trivial(&parse_normal("5*q^3*q_x + q*q_xxx").unwrap(), &m).unwrap());
        assert!(matches!(euler_trivial(&parse_normal("q_x/q").unwrap(), &m), Err(ClawError::NonPolynomial(_))));
        assert!(euler_trivial(&parse_normal("r*q_x + q*r_x").unwrap(), &m).unwrap());
        assert!(!euler_trivial(&parse_normal("r*q_x").unwrap(), &m).unwrap());
    }

    #[test]
    fn inconsistent_data_leaves_positive_powers() {
        let (mut qr, m) = mkdv();
        qr.a = parse_normal("-1/2*eta^3 - eta*q^2 + q_x").unwrap();
        let gs = g_sequence(&qr, &m, 4).unwrap();
        assert!(matches!(
            flux_sequence(&qr, &gs, &m),
            Err(ClawError::UnmatchedPositivePower { power: 0, .. })
        ));
    }

    #[test]
    fn empty_hierarchy() {
        let (qr, m) = mkdv();
        let h = hierarchy(&qr, &m, 0, false).unwrap();
        assert!(h.laws.is_empty() && h.all_verified());
    }
}
