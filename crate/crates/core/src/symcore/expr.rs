use std::fmt;

use num_traits::{One, Signed};

use super::generator::{Generator, Symbol};
use super::model::EvolutionModel;
use super::normal::NormalForm;
use super::poly::Rational;
use super::SymError;

/// Expression tree as written in the model DSL.
#[derive(Clone, PartialEq, Debug)]
pub enum Expr {
    Const(Rational),
    Gen(Generator),
    /// `D_t D_x^k field`; only meaningful relative to an evolution model.
    TimeJet { field: Symbol, x_order: u32 },
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
    Quotient(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(Rational::from_integer(n.into()))
    }

    pub fn jet(field: &str, order: u32) -> Expr {
        Expr::Gen(Generator::jet(field, order))
    }

    pub fn normalize(&self) -> Result<NormalForm, SymError> {
        self.fold(&mut |g| Ok(NormalForm::generator(g.clone())), &mut |f, k| {
            Err(SymError::TimeJetWithoutModel(format!("D_t D_x^{k} {f}")))
        })
    }

    /// Normal form after constraint substitution and on-shell elimination
    /// of every t-derivative.
    pub fn normalize_in(&self, m: &EvolutionModel) -> Result<NormalForm, SymError> {
        self.fold(&mut |g| m.reduce_generator(g), &mut |f, k| {
            m.total_dt(&m.reduce_generator(&Generator::Jet {
                field: f.clone(),
                order: k,
            })?)
        })
    }

    fn fold<G, T>(&self, gen: &mut G, time: &mut T) -> Result<NormalForm, SymError>
    where
        G: FnMut(&Generator) -> Result<NormalForm, SymError>,
        T: FnMut(&Symbol, u32) -> Result<NormalForm, SymError>,
    {
        Ok(match self {
            Expr::Const(c) => NormalForm::constant(c.clone()),
            Expr::Gen(g) => gen(g)?,
            Expr::TimeJet { field, x_order } => time(field, *x_order)?,
            Expr::Sum(xs) => {
                let mut acc = NormalForm::zero();
                for x in xs {
                    acc = &acc + &x.fold(gen, time)?;
                }
                acc
            }
            Expr::Product(xs) => {
                let mut acc = NormalForm::one();
                for x in xs {
                    acc = &acc * &x.fold(gen, time)?;
                }
                acc
            }
            Expr::Neg(x) => -x.fold(gen, time)?,
            Expr::Pow(b, e) => b.fold(gen, time)?.pow(*e)?,
            Expr::Quotient(a, b) => a.fold(gen, time)?.try_div(&b.fold(gen, time)?)?,
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Sum(_) => 1,
            Expr::Neg(_) => 2,
            Expr::Product(_) | Expr::Quotient(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if !c.is_integer() || c.is_negative() => 3,
            Expr::Const(_) | Expr::Gen(_) | Expr::TimeJet { .. } => 5,
        }
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_integer() {
                    write!(f, "{}", c.numer())
                } else {
                    write!(f, "{}/{}", c.numer(), c.denom())
                }
            }
            Expr::Gen(g) => write!(f, "{g}"),
            Expr::TimeJet { field, x_order } => {
                write!(f, "{field}_")?;
                for _ in 0..*x_order {
                    f.write_str("x")?;
                }
                f.write_str("t")
            }
            Expr::Sum(xs) => {
                if xs.is_empty() {
                    return f.write_str("0");
                }
                for (i, x) in xs.iter().enumerate() {
                    match (i, x) {
                        (0, _) => write_wrapped(f, x, 2)?,
                        (_, Expr::Neg(inner)) => {
                            f.write_str(" - ")?;
                            write_wrapped(f, inner, 3)?;
                        }
                        _ => {
                            f.write_str(" + ")?;
                            write_wrapped(f, x, 2)?;
                        }
                    }
                }
                Ok(())
            }
            Expr::Product(xs) => {
                if xs.is_empty() {
                    return f.write_str("1");
                }
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                        // `a*1/2` would reparse as `(a*1)/2`; keep fractions atomic.
                        write_wrapped(f, x, 4)?;
                    } else {
                        write_wrapped(f, x, 3)?;
                    }
                }
                Ok(())
            }
            Expr::Neg(x) => {
                f.write_str("-")?;
                write_wrapped(f, x, 3)
            }
            Expr::Pow(b, e) => {
                write_wrapped(f, b, 5)?;
                if *e < 0 {
                    write!(f, "^({e})")
                } else {
                    write!(f, "^{e}")
                }
            }
            Expr::Quotient(a, b) => {
                write_wrapped(f, a, 3)?;
                f.write_str("/")?;
                write_wrapped(f, b, 4)
            }
        }
    }
}

impl From<&NormalForm> for Expr {
    fn from(nf: &NormalForm) -> Expr {
        fn poly_expr(p: &super::poly::Poly) -> Expr {
            let mut terms = Vec::new();
            for (m, c) in p.terms().rev() {
                let mut factors = Vec::new();
                let a = c.abs();
                if !a.is_one() || m.is_one() {
                    factors.push(Expr::Const(a));
                }
                for (g, e) in m.factors() {
                    if *e == 1 {
                        factors.push(Expr::Gen(g.clone()));
                    } else {
                        factors.push(Expr::Pow(Box::new(Expr::Gen(g.clone())), *e as i64));
                    }
                }
                let t = if factors.len() == 1 {
                    factors.pop().unwrap()
                } else {
                    Expr::Product(factors)
                };
                terms.push(if c.is_negative() { Expr::Neg(Box::new(t)) } else { t });
            }
            match terms.len() {
                0 => Expr::int(0),
                1 => terms.pop().unwrap(),
                _ => Expr::Sum(terms),
            }
        }
        let n = poly_expr(nf.numerator());
        if nf.is_polynomial() {
            n
        } else {
            Expr::Quotient(Box::new(n), Box::new(poly_expr(nf.denominator())))
        }
    }
}
