//! Canonical reduced fractions over the jet-space polynomial ring.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::gcd::{gcd, gcd_many};
use super::generator::Generator;
use super::poly::{Poly, Rational};
use super::SymError;

/// Reduced fraction `num / den`.
///
/// Invariants: `den` is cosine-free with leading coefficient one, the
/// numerator has cosine exponents at most one, and the cosine-free
/// components of `num` share no common factor with `den`. Zero is `0/1`.
/// Two values are equal exactly when their normal forms are identical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NormalForm {
    num: Poly,
    den: Poly,
}

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        NormalForm::from_poly(Poly::one())
    }

    pub fn integer(n: i64) -> Self {
        NormalForm::from_poly(Poly::integer(n))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        NormalForm::constant(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn constant(c: Rational) -> Self {
        NormalForm::from_poly(Poly::constant(c))
    }

    pub fn generator(g: Generator) -> Self {
        NormalForm::from_poly(Poly::var(g))
    }

    pub fn jet(field: &str, order: u32) -> Self {
        NormalForm::generator(Generator::jet(field, order))
    }

    pub fn eta() -> Self {
        NormalForm::generator(Generator::Eta)
    }

    pub fn from_poly(p: Poly) -> Self {
        NormalForm {
            num: p,
            den: Poly::one(),
        }
    }

    /// Builds the canonical form of `num / den`.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self, SymError> {
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        let (mut num, mut den) = (num, den);
        // Rationalize cosines out of the denominator with conjugates.
        while let Some(c) = den.generators().into_iter().find(Generator::is_cos) {
            let conj = den.negate_generator(&c);
            num = &num * &conj;
            den = &den * &conj;
            if den.is_zero() {
                return Err(SymError::DivisionByZero);
            }
        }
        if num.is_zero() {
            return Ok(NormalForm::zero());
        }
        if let Some(c) = den.constant_value() {
            return Ok(NormalForm {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            });
        }
        let g = if num.has_cos() {
            let parts = num.split_cos();
            let mut all: Vec<&Poly> = parts.values().collect();
            all.push(&den);
            gcd_many(all)
        } else {
            gcd(&num, &den)
        };
        if !g.is_one() {
            num = num.div_exact(&g).ok_or(SymError::Internal("gcd does not divide numerator"))?;
            den = den.div_exact(&g).ok_or(SymError::Internal("gcd does not divide denominator"))?;
        }
        let lc = den.leading_coeff().recip();
        Ok(NormalForm {
            num: num.scale(&lc),
            den: den.scale(&lc),
        })
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn as_generator(&self) -> Option<Generator> {
        if !self.den.is_one() {
            return None;
        }
        let (m, c) = self.num.as_monomial()?;
        match m.factors() {
            [(g, 1)] if c.is_one() => Some(g.clone()),
            _ => None,
        }
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        let mut s = self.num.generators();
        s.extend(self.den.generators());
        s
    }

    pub fn contains(&self, g: &Generator) -> bool {
        self.num.contains(g) || self.den.contains(g)
    }

    pub fn recip(&self) -> Result<Self, SymError> {
        NormalForm::from_parts(self.den.clone(), self.num.clone())
    }

    pub fn try_div(&self, rhs: &NormalForm) -> Result<Self, SymError> {
        if rhs.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        NormalForm::from_parts(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn pow(&self, e: i64) -> Result<Self, SymError> {
        if e >= 0 {
            Ok(NormalForm::from_parts(self.num.pow(e as u32), self.den.pow(e as u32))?)
        } else {
            self.recip()?.pow(-e)
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return NormalForm::zero();
        }
        NormalForm {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Substitutes `g -> -g` for a single generator.
    pub fn negate_generator(&self, g: &Generator) -> Self {
        NormalForm::from_parts(self.num.negate_generator(g), self.den.negate_generator(g))
            .expect("negation keeps the denominator nonzero")
    }

    /// Replaces each generator by a normal form (simultaneous substitution).
    pub fn substitute<F>(&self, mut value: F) -> Result<Self, SymError>
    where
        F: FnMut(&Generator) -> Result<NormalForm, SymError>,
    {
        let mut cache: std::collections::HashMap<Generator, NormalForm> = Default::default();
        let mut err = None;
        let mut lookup = |g: &Generator| -> NormalForm {
            if let Some(v) = cache.get(g) {
                return v.clone();
            }
            match value(g) {
                Ok(v) => {
                    cache.insert(g.clone(), v.clone());
                    v
                }
                Err(e) => {
                    err.get_or_insert(e);
                    NormalForm::zero()
                }
            }
        };
        let num = self
            .num
            .map_terms(|c| NormalForm::constant(c.clone()), &mut lookup);
        let den = self
            .den
            .map_terms(|c| NormalForm::constant(c.clone()), &mut lookup);
        if let Some(e) = err {
            return Err(e);
        }
        num.try_div(&den)
    }

    /// Derivation extending `rule` on generators via the quotient and
    /// Leibniz rules.
    pub fn derive<F>(&self, mut rule: F) -> Result<Self, SymError>
    where
        F: FnMut(&Generator) -> Result<NormalForm, SymError>,
    {
        let mut dnum = NormalForm::zero();
        let mut dden = NormalForm::zero();
        for g in self.generators() {
            let dg = rule(&g)?;
            if dg.is_zero() {
                continue;
            }
            let pn = self.num.partial(&g);
            if !pn.is_zero() {
                dnum = &dnum + &(&NormalForm::from_poly(pn) * &dg);
            }
            let pd = self.den.partial(&g);
            if !pd.is_zero() {
                dden = &dden + &(&NormalForm::from_poly(pd) * &dg);
            }
        }
        let den = NormalForm::from_poly(self.den.clone());
        if dden.is_zero() {
            return dnum.try_div(&den);
        }
        let num = NormalForm::from_poly(self.num.clone());
        let top = &(&dnum * &den) - &(&num * &dden);
        top.try_div(&(&den * &den))
    }

    pub fn evaluate<F>(&self, mut value: F) -> Result<f64, SymError>
    where
        F: FnMut(&Generator) -> Option<f64>,
    {
        let mut missing = None;
        let mut v = |g: &Generator| {
            let r = value(g);
            if r.is_none() {
                missing.get_or_insert_with(|| g.clone());
            }
            r
        };
        let n = self.num.evaluate(&mut v);
        let d = self.den.evaluate(&mut v);
        match (n, d) {
            (Some(n), Some(d)) => {
                if d == 0.0 {
                    Err(SymError::NumericDivisionByZero)
                } else {
                    Ok(n / d)
                }
            }
            _ => Err(SymError::Unassigned(
                missing.map(|g| g.to_string()).unwrap_or_default(),
            )),
        }
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num = if self.num.num_terms() > 1 {
            format!("({})", self.num)
        } else {
            self.num.to_string()
        };
        if self.den.num_terms() > 1 || self.den.as_monomial().is_some_and(|(_, c)| !c.is_one()) {
            write!(f, "{num}/({})", self.den)
        } else {
            let d = self.den.to_string();
            if d.contains('*') || d.contains('^') {
                write!(f, "{num}/({d})")
            } else {
                write!(f, "{num}/{d}")
            }
        }
    }
}

impl fmt::Debug for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NormalForm({self})")
    }
}

impl Add for &NormalForm {
    type Output = NormalForm;
    fn add(self, rhs: &NormalForm) -> NormalForm {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return NormalForm::from_parts(&self.num + &rhs.num, self.den.clone())
                .expect("nonzero denominator");
        }
        let g = gcd(&self.den, &rhs.den);
        let (l, r) = if g.is_one() {
            (rhs.den.clone(), self.den.clone())
        } else {
            (
                rhs.den.div_exact(&g).expect("gcd divides"),
                self.den.div_exact(&g).expect("gcd divides"),
            )
        };
        let num = &(&self.num * &l) + &(&rhs.num * &r);
        NormalForm::from_parts(num, &self.den * &l).expect("nonzero denominator")
    }
}

impl Sub for &NormalForm {
    type Output = NormalForm;
    fn sub(self, rhs: &NormalForm) -> NormalForm {
        self + &(-rhs)
    }
}

impl Neg for &NormalForm {
    type Output = NormalForm;
    fn neg(self) -> NormalForm {
        NormalForm {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &NormalForm {
    type Output = NormalForm;
    fn mul(self, rhs: &NormalForm) -> NormalForm {
        if self.is_zero() || rhs.is_zero() {
            return NormalForm::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return NormalForm::from_poly(&self.num * &rhs.num);
        }
        NormalForm::from_parts(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("product of nonzero denominators")
    }
}

/// Panics on division by zero; use [`NormalForm::try_div`] otherwise.
impl Div for &NormalForm {
    type Output = NormalForm;
    fn div(self, rhs: &NormalForm) -> NormalForm {
        self.try_div(rhs).expect("division by zero")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for NormalForm {
            type Output = NormalForm;
            fn $m(self, rhs: NormalForm) -> NormalForm { (&self).$m(&rhs) }
        }
        impl $tr<&NormalForm> for NormalForm {
            type Output = NormalForm;
            fn $m(self, rhs: &NormalForm) -> NormalForm { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for NormalForm {
    type Output = NormalForm;
    fn neg(self) -> NormalForm {
        -&self
    }
}

impl std::iter::Sum for NormalForm {
    fn sum<I: Iterator<Item = NormalForm>>(iter: I) -> Self {
        iter.fold(NormalForm::zero(), |a, b| &a + &b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(k: u32) -> NormalForm {
        NormalForm::jet("q", k)
    }

    #[test]
    fn commutativity_cancels() {
        let e = &(&q(0) * &q(1)) - &(&q(1) * &q(0));
        assert!(e.is_zero());
        assert_eq!(e.denominator(), &Poly::one());
    }

    #[test]
    fn pythagorean_identity() {
        let s = NormalForm::generator(Generator::sin("u"));
        let c = NormalForm::generator(Generator::cos("u"));
        let e = &(&(&c * &c) + &(&s * &s)) - &NormalForm::one();
        assert!(e.is_zero());
    }

    #[test]
    fn gcd_cancellation() {
        let num = &(&q(0) * &q(0)) - &(&q(1) * &q(1));
        let den = &q(0) - &q(1);
        assert_eq!(&num / &den, &q(0) + &q(1));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let z = &q(0) - &q(0);
        assert_eq!(q(1).try_div(&z), Err(SymError::DivisionByZero));
    }

    #[test]
    fn cosine_denominator_is_rationalized() {
        let c = NormalForm::generator(Generator::cos("u"));
        let s = NormalForm::generator(Generator::sin("u"));
        let r = &NormalForm::one() / &c;
        assert!(!r.denominator().has_cos());
        // 1/cos * cos = 1
        assert_eq!(&r * &c, NormalForm::one());
        // sin/cos - sin*cos/(1 - sin^2) = 0
        let t = &s / &c;
        let other = &(&s * &c) / &(&NormalForm::one() - &(&s * &s));
        assert_eq!(t, other);
    }

    #[test]
    fn quotient_rule_derivation() {
        // d/dq (q_x / q) with dq = q_x, dq_x = q_xx
        let e = &q(1) / &q(0);
        let d = e
            .derive(|g| match g {
                Generator::Jet { field, order } => Ok(NormalForm::jet(field.as_str(), order + 1)),
                _ => Ok(NormalForm::zero()),
            })
            .unwrap();
        let expect = &(&q(2) / &q(0)) - &(&(&q(1) * &q(1)) / &(&q(0) * &q(0)));
        assert_eq!(d, expect);
    }
}
