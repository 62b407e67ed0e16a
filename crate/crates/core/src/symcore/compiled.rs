use super::generator::Generator;
use super::normal::NormalForm;
use super::poly::{rational_to_f64, Poly};
use super::SymError;

type Term = (f64, Vec<(usize, i32)>);

/// A normal form lowered to floating point for fast repeated evaluation.
///
/// Values are supplied positionally, aligned with [`CompiledExpr::variables`].
#[derive(Clone, Debug)]
pub struct CompiledExpr {
    vars: Vec<Generator>,
    num: Vec<Term>,
    den: Vec<Term>,
}

impl CompiledExpr {
    pub fn new(nf: &NormalForm) -> Self {
        let vars: Vec<Generator> = nf.generators().into_iter().collect();
        let lower = |p: &Poly| -> Vec<Term> {
            p.terms()
                .map(|(m, c)| {
                    let f = m
                        .factors()
                        .iter()
                        .map(|(g, e)| (vars.binary_search(g).expect("collected above"), *e as i32))
                        .collect();
                    (rational_to_f64(c), f)
                })
                .collect()
        };
        let num = lower(nf.numerator());
        let den = if nf.is_polynomial() { Vec::new() } else { lower(nf.denominator()) };
        CompiledExpr { vars, num, den }
    }

    pub fn variables(&self) -> &[Generator] {
        &self.vars
    }

    fn sum(terms: &[Term], values: &[f64]) -> f64 {
        terms
            .iter()
            .map(|(c, f)| f.iter().fold(*c, |acc, (i, e)| acc * values[*i].powi(*e)))
            .sum()
    }

    /// Evaluates with `values[i]` bound to `variables()[i]`.
    pub fn eval(&self, values: &[f64]) -> f64 {
        let n = Self::sum(&self.num, values);
        if self.den.is_empty() {
            n
        } else {
            n / Self::sum(&self.den, values)
        }
    }

    pub fn eval_with<F>(&self, mut value: F) -> Result<f64, SymError>
    where
        F: FnMut(&Generator) -> Option<f64>,
    {
        let vals = self
            .vars
            .iter()
            .map(|g| value(g).ok_or_else(|| SymError::Unassigned(g.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let d = if self.den.is_empty() { 1.0 } else { Self::sum(&self.den, &vals) };
        if d == 0.0 {
            return Err(SymError::NumericDivisionByZero);
        }
        Ok(Self::sum(&self.num, &vals) / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_normal;

    #[test]
    fn matches_exact_evaluation() {
        let nf = parse_normal("(q*q_x - 3/2*eta^2)/(q + 2)").unwrap();
        let c = CompiledExpr::new(&nf);
        let val = |g: &Generator| match g {
            Generator::Eta => Some(3.0),
            Generator::Jet { order: 0, .. } => Some(2.0),
            Generator::Jet { .. } => Some(-1.0),
            _ => None,
        };
        let a = c.eval_with(val).unwrap();
        let b = nf.evaluate(val).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!((a - (-2.0 - 13.5) / 4.0).abs() < 1e-14);
    }
}
