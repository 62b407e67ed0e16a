//! Sparse multivariate polynomials over exact rationals.
//!
//! Multiplication works in the quotient ring where `cos(p)^2 = 1 - sin(p)^2`,
//! so every stored monomial has cosine exponent at most one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::generator::{Generator, Monomial};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::term(c, Monomial::one())
    }

    pub fn integer(n: i64) -> Self {
        Poly::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn var(g: Generator) -> Self {
        Poly::term(Rational::one(), Monomial::var(g))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The constant value, if the polynomial has no generators.
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Leading term in graded lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn as_monomial(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        self.terms
            .keys()
            .flat_map(|m| m.generators().cloned())
            .collect()
    }

    pub fn contains(&self, g: &Generator) -> bool {
        self.terms.keys().any(|m| m.exponent(g) > 0)
    }

    pub fn has_cos(&self) -> bool {
        self.terms.keys().any(|m| m.generators().any(Generator::is_cos))
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul_term(&self, c: &Rational, m: &Monomial) -> Poly {
        let mut out = Poly::zero();
        for (n, k) in &self.terms {
            out.add_term(n.mul(m), k * c);
        }
        out.reduce_trig()
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Rewrites `cos(p)^k` with `k >= 2` via `cos^2 = 1 - sin^2`.
    fn reduce_trig(self) -> Poly {
        let needs = self
            .terms
            .keys()
            .any(|m| m.factors().iter().any(|(g, e)| g.is_cos() && *e >= 2));
        if !needs {
            return self;
        }
        let mut out = Poly::zero();
        for (m, c) in self.terms {
            let mut factor = Poly::one();
            let mut kept = Vec::new();
            for (g, e) in m.factors() {
                if let (Generator::Cos(p), true) = (g, *e >= 2) {
                    let one_minus_s2 =
                        &Poly::one() - &Poly::term(Rational::one(), Monomial::power(Generator::Sin(p.clone()), 2));
                    factor = &factor * &one_minus_s2.pow(e / 2);
                    if e % 2 == 1 {
                        kept.push((g.clone(), 1));
                    }
                } else {
                    kept.push((g.clone(), *e));
                }
            }
            let rest = Monomial::from_pairs(kept);
            for (n, k) in factor.terms {
                out.add_term(n.mul(&rest), &k * &c);
            }
        }
        out
    }

    pub fn degree_in(&self, g: &Generator) -> u32 {
        self.terms.keys().map(|m| m.exponent(g)).max().unwrap_or(0)
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `g`.
    pub fn coefficients_in(&self, g: &Generator) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(g) as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(g);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn coefficient_in(&self, g: &Generator, d: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(g);
            if e == d {
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    ///
    /// Only valid when `d` has no cosine generator (the quotient ring
    /// reduction does not commute with leading-term division otherwise).
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (dm, dc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let m = rm.div(&dm)?;
            let c = &rc / &dc;
            rem = &rem - &d.mul_term(&c, &m);
            quot.add_term(m, c);
        }
        Some(quot)
    }

    /// Partial derivative with respect to a generator.
    pub fn partial(&self, g: &Generator) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(g);
            if e == 0 {
                continue;
            }
            let (_, rest) = m.split_off(g);
            let nm = rest.mul(&Monomial::power(g.clone(), e - 1));
            out.add_term(nm, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Maps `g -> -g`.
    pub fn negate_generator(&self, g: &Generator) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    if m.exponent(g) % 2 == 1 {
                        (m.clone(), -c)
                    } else {
                        (m.clone(), c.clone())
                    }
                })
                .collect(),
        }
    }

    /// Splits into components over the cosine part of each monomial:
    /// `self = sum_k cos_part_k * component_k` with cosine-free components.
    pub fn split_cos(&self) -> BTreeMap<Monomial, Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (cos, rest): (Vec<_>, Vec<_>) =
                m.factors().iter().cloned().partition(|(g, _)| g.is_cos());
            out.entry(Monomial::from_pairs(cos))
                .or_default()
                .add_term(Monomial::from_pairs(rest), c.clone());
        }
        out
    }

    /// Minimum exponent of each generator over all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |acc, m| acc.gcd(m))
    }

    pub fn evaluate<F>(&self, mut value: F) -> Option<f64>
    where
        F: FnMut(&Generator) -> Option<f64>,
    {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = rational_to_f64(c);
            for (g, e) in m.factors() {
                t *= value(g)?.powi(*e as i32);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Sum of `c * prod value(g)^e` where values are arbitrary ring elements.
    pub fn map_terms<T, F, G>(&self, mut lift: G, mut value: F) -> T
    where
        T: Clone + Add<Output = T> + Mul<Output = T>,
        F: FnMut(&Generator) -> T,
        G: FnMut(&Rational) -> T,
    {
        let mut acc = lift(&Rational::zero());
        for (m, c) in &self.terms {
            let mut t = lift(c);
            for (g, e) in m.factors() {
                let v = value(g);
                for _ in 0..*e {
                    t = t * v.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Multiplies through by the least common denominator of the coefficients
    /// and divides by the integer content, keeping the leading sign positive.
    pub fn primitive_integer(&self) -> Poly {
        use num_integer::Integer;
        if self.is_zero() {
            return Poly::zero();
        }
        let lcm = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let gcd = self
            .terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(&(c.numer() * (&lcm / c.denom()))));
        let mut f = Rational::new(lcm, gcd);
        if self.leading_coeff().is_negative() {
            f = -f;
        }
        self.scale(&f)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading_coeff().recip())
    }
}

pub fn rational_to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (n, k) in &rhs.terms {
                out.add_term(m.mul(n), c * k);
            }
        }
        out.reduce_trig()
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

fn write_coeff_monomial(
    f: &mut fmt::Formatter<'_>,
    c: &Rational,
    m: &Monomial,
    first: bool,
) -> fmt::Result {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            f.write_str("-")?;
        }
    } else {
        f.write_str(if neg { " - " } else { " + " })?;
    }
    let mut parts = Vec::new();
    if !a.is_one() || m.is_one() {
        parts.push(a.to_string());
    }
    for (g, e) in m.factors() {
        if *e == 1 {
            parts.push(g.to_string());
        } else {
            parts.push(format!("{g}^{e}"));
        }
    }
    f.write_str(&parts.join("*"))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            write_coeff_monomial(f, c, m, i == 0)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
