use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// Interned field or potential name (`q`, `r`, `u`, `phi`, ...).
///
/// Ordered by its text so canonical forms never depend on creation order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// A polynomial variable of the jet-space ring.
///
/// The derived ordering (jets by field then order, then `eta`, then the
/// trigonometric generators) is the variable ordering of the graded
/// lexicographic monomial order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Generator {
    /// `k`-th x-derivative of a field; order 0 is the field itself.
    Jet { field: Symbol, order: u32 },
    /// The spectral parameter.
    Eta,
    Sin(Symbol),
    Cos(Symbol),
}

impl Generator {
    pub fn jet(field: &str, order: u32) -> Self {
        Generator::Jet {
            field: Symbol::new(field),
            order,
        }
    }

    pub fn sin(potential: &str) -> Self {
        Generator::Sin(Symbol::new(potential))
    }

    pub fn cos(potential: &str) -> Self {
        Generator::Cos(Symbol::new(potential))
    }

    pub fn is_cos(&self) -> bool {
        matches!(self, Generator::Cos(_))
    }

    /// The field this generator depends on, if any.
    pub fn field(&self) -> Option<&Symbol> {
        match self {
            Generator::Jet { field, .. } | Generator::Sin(field) | Generator::Cos(field) => {
                Some(field)
            }
            Generator::Eta => None,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Jet { field, order } if *order <= 4 => {
                write!(f, "{field}")?;
                if *order > 0 {
                    f.write_str("_")?;
                    for _ in 0..*order {
                        f.write_str("x")?;
                    }
                }
                Ok(())
            }
            Generator::Jet { field, order } => write!(f, "D[{field},{order}]"),
            Generator::Eta => f.write_str("eta"),
            Generator::Sin(p) => write!(f, "sin({p})"),
            Generator::Cos(p) => write!(f, "cos({p})"),
        }
    }
}

/// Power product of generators, stored sparsely and sorted by generator.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(Generator, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(g: Generator) -> Self {
        Monomial(vec![(g, 1)])
    }

    pub fn power(g: Generator, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(g, e)])
        }
    }

    /// Builds from arbitrary `(generator, exponent)` pairs, merging repeats.
    pub fn from_pairs(mut pairs: Vec<(Generator, u32)>) -> Self {
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Generator, u32)> = Vec::with_capacity(pairs.len());
        for (g, e) in pairs {
            match out.last_mut() {
                Some((lg, le)) if *lg == g => *le += e,
                _ => out.push((g, e)),
            }
        }
        out.retain(|(_, e)| *e > 0);
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, g: &Generator) -> u32 {
        self.0
            .binary_search_by(|(h, _)| h.cmp(g))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> &[(Generator, u32)] {
        &self.0
    }

    pub fn generators(&self) -> impl Iterator<Item = &Generator> {
        self.0.iter().map(|(g, _)| g)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (g, e) in &self.0 {
            let mut d = 0;
            if j < other.0.len() {
                match other.0[j].0.cmp(g) {
                    Ordering::Less => return None,
                    Ordering::Equal => {
                        d = other.0[j].1;
                        j += 1;
                    }
                    Ordering::Greater => {}
                }
            }
            if d > *e {
                return None;
            }
            if e - d > 0 {
                out.push((g.clone(), e - d));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Greatest common divisor of two monomials (componentwise minimum).
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let out = self
            .0
            .iter()
            .filter_map(|(g, e)| {
                let f = other.exponent(g);
                (f > 0).then(|| (g.clone(), (*e).min(f)))
            })
            .collect();
        Monomial(out)
    }

    /// Removes `g` entirely, returning its exponent and the remaining monomial.
    pub fn split_off(&self, g: &Generator) -> (u32, Monomial) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(h, f)| {
                if h == g {
                    e = *f;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (e, Monomial(rest))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            match a.0.cmp(&b.0) {
                // `self` has positive exponent on an earlier generator.
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match a.1.cmp(&b.1) {
                    Ordering::Equal => {}
                    ord => return ord,
                },
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
