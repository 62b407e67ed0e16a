//! Multivariate polynomial gcd over the rationals.
//!
//! Recursive primitive polynomial remainder sequences, with fast paths for
//! monomial arguments (the common case: denominators are powers of `q` and
//! `eta`). Inputs must be cosine-free; the caller splits cosine parts off.

use super::generator::{Generator, Monomial};
use super::poly::{Poly, Rational};
use num_traits::One;

/// Monic greatest common divisor. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    debug_assert!(!a.has_cos() && !b.has_cos());
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.num_terms() == 1 || b.num_terms() == 1 {
        return monomial_gcd(a, b);
    }
    if a == b {
        return a.monic();
    }
    // Monomial contents split off cheaply.
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mono = Poly::term(Rational::one(), ma.gcd(&mb));
    let a = strip_monomial(a, &ma);
    let b = strip_monomial(b, &mb);
    if a.div_exact(&b).is_some() {
        return (&mono * &b).monic();
    }
    if b.div_exact(&a).is_some() {
        return (&mono * &a).monic();
    }
    (&mono * &gcd_recursive(&a, &b)).monic()
}

pub fn gcd_many<'a, I: IntoIterator<Item = &'a Poly>>(polys: I) -> Poly {
    let mut acc = Poly::zero();
    for p in polys {
        acc = gcd(&acc, p);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn strip_monomial(p: &Poly, m: &Monomial) -> Poly {
    if m.is_one() {
        return p.clone();
    }
    let mut out = Poly::zero();
    for (n, c) in p.terms() {
        out = &out + &Poly::term(c.clone(), n.div(m).expect("content divides every term"));
    }
    out
}

fn monomial_gcd(a: &Poly, b: &Poly) -> Poly {
    let ca = a.monomial_content();
    let cb = b.monomial_content();
    Poly::term(Rational::one(), ca.gcd(&cb))
}

fn gcd_recursive(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.num_terms() == 1 || b.num_terms() == 1 {
        return monomial_gcd(a, b);
    }
    let ga = a.generators();
    let gb = b.generators();
    let Some(x) = ga.intersection(&gb).next().cloned() else {
        // No shared variable: the gcd lives in the contents.
        let x = ga.iter().next().unwrap().clone();
        return gcd_recursive(&content(a, &x), b);
    };
    if !ga.is_subset(&gb) {
        let y = ga.difference(&gb).next().unwrap().clone();
        return gcd_recursive(&content(a, &y), b);
    }
    if !gb.is_subset(&ga) {
        let y = gb.difference(&ga).next().unwrap().clone();
        return gcd_recursive(a, &content(b, &y));
    }
    let ca = content(a, &x);
    let cb = content(b, &x);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd_recursive(&ca, &cb);
    let g = primitive_prs(pa, pb, &x);
    (&c * &g).monic()
}

/// Content of `p` viewed as a polynomial in `x` (gcd of its coefficients).
fn content(p: &Poly, x: &Generator) -> Poly {
    let mut acc = Poly::zero();
    for c in p.coefficients_in(x) {
        if c.is_zero() {
            continue;
        }
        acc = gcd_recursive(&acc, &c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn primitive_part(p: &Poly, x: &Generator) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    let c = content(p, x);
    p.div_exact(&c).expect("content divides").primitive_integer()
}

/// Sparse pseudo-remainder of `a` by `b` in the variable `x`.
fn pseudo_remainder(a: &Poly, b: &Poly, x: &Generator) -> Poly {
    let db = b.degree_in(x);
    let lcb = b.coefficient_in(x, db);
    let mut r = a.clone();
    while !r.is_zero() && r.contains(x) && r.degree_in(x) >= db {
        let dr = r.degree_in(x);
        let lcr = r.coefficient_in(x, dr);
        let shift = Poly::term(Rational::one(), Monomial::power(x.clone(), dr - db));
        r = &(&r * &lcb) - &(&(&lcr * &shift) * b);
    }
    r
}

fn primitive_prs(a: Poly, b: Poly, x: &Generator) -> Poly {
    let (mut a, mut b) = if a.degree_in(x) >= b.degree_in(x) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        if b.is_zero() {
            return primitive_part(&a, x);
        }
        if !b.contains(x) {
            // b is a nonzero x-free polynomial and both inputs are primitive.
            return Poly::one();
        }
        let r = pseudo_remainder(&a, &b, x);
        a = b;
        b = primitive_part(&r, x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(f: &str, k: u32) -> Poly {
        Poly::var(Generator::jet(f, k))
    }

    #[test]
    fn difference_of_squares() {
        let (q, qx) = (v("q", 0), v("q", 1));
        let a = &(&q * &q) - &(&qx * &qx);
        let b = &q - &qx;
        let g = gcd(&a, &b);
        assert_eq!(g, b.monic());
    }

    #[test]
    fn shared_nontrivial_factor() {
        let (q, qx, e) = (v("q", 0), v("q", 1), Poly::var(Generator::Eta));
        let f = &(&q * &e) + &Poly::integer(1);
        let a = &f * &(&qx + &q);
        let b = &f * &(&qx - &e);
        assert_eq!(gcd(&a, &b), f.monic());
        assert_eq!(gcd(&(&qx + &q), &(&qx - &e)), Poly::one());
    }

    #[test]
    fn monomial_fast_path() {
        let (q, qx) = (v("q", 0), v("q", 1));
        let a = &(&q.pow(3) * &qx) + &(&q.pow(2) * &qx.pow(2));
        let b = &q.pow(2) * &Poly::var(Generator::Eta);
        assert_eq!(gcd(&a, &b), q.pow(2));
    }

    #[test]
    fn content_in_other_variables() {
        let (q, qx, qxx) = (v("q", 0), v("q", 1), v("q", 2));
        let f = &q + &qxx;
        let a = &f * &(&qx.pow(2) + &Poly::integer(2));
        let b = &f * &(&(&q * &qx) + &Poly::integer(1));
        assert_eq!(gcd(&a, &b), f.monic());
    }
}
