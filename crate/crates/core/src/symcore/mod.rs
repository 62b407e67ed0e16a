//! Exact symbolic engine over jet space.
//!
//! Expressions are parsed from a small text DSL into an [`Expr`] tree and
//! brought to a canonical [`NormalForm`] (a reduced fraction of polynomials
//! over the rationals). Total derivatives, on-shell reduction against an
//! [`EvolutionModel`], eta-Laurent expansion and floating evaluation all
//! operate on normal forms.

mod compiled;
mod expr;
mod gcd;
mod generator;
mod laurent;
mod model;
mod normal;
mod parser;
mod poly;
pub mod probe;

pub use compiled::CompiledExpr;
pub use expr::Expr;
pub use gcd::gcd;
pub use generator::{Generator, Monomial, Symbol};
pub use laurent::{laurent_eta, LaurentSeries};
pub use model::EvolutionModel;
pub use normal::NormalForm;
pub use parser::{parse, parse_normal, parse_with, ParseError, DEFAULT_FIELDS};
pub use poly::{rat, rational_to_f64, Poly, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("division by an expression that normalizes to zero")]
    DivisionByZero,
    #[error("numeric division by zero during evaluation")]
    NumericDivisionByZero,
    #[error("no value assigned to generator `{0}`")]
    Unassigned(String),
    #[error("model has no evolution equation for field `{0}`")]
    NoEvolution(String),
    #[error("t-derivative of `{0}` is not determined by the model (nonlocal in x)")]
    NonlocalTimeDerivative(String),
    #[error("t-derivative `{0}` cannot be normalized without a model")]
    TimeJetWithoutModel(String),
    #[error("expression is not a finite Laurent polynomial in eta: {0}")]
    NotLaurentFinite(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("internal invariant violated: {0}")]
    Internal(&'static str),
}

/// Total x-derivative (see [`EvolutionModel::total_dx`]).
pub fn total_dx(e: &NormalForm, m: &EvolutionModel) -> Result<NormalForm, SymError> {
    m.total_dx(e)
}

/// Total t-derivative with every time jet eliminated through the model.
pub fn total_dt_onshell(e: &NormalForm, m: &EvolutionModel) -> Result<NormalForm, SymError> {
    m.total_dt(e)
}

/// Exact test: does `e` vanish once constraints are applied and every
/// t-derivative is eliminated via the evolution equations?
pub fn is_zero_onshell(e: &Expr, m: &EvolutionModel) -> Result<bool, SymError> {
    Ok(e.normalize_in(m)?.is_zero())
}

/// Canonical normal form of an expression tree.
pub fn normalize(e: &Expr) -> Result<NormalForm, SymError> {
    e.normalize()
}
