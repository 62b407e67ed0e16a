use crate::pdebench::ExactSolution;
use crate::structure::QRModel;
use crate::symcore::{CompiledExpr, EvolutionModel, Generator, NormalForm};

use super::RiccatiError;

/// `q, r, A, B, C` at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Coeffs {
    pub q: f64,
    pub r: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Coeffs {
    pub fn is_finite(&self) -> bool {
        [self.q, self.r, self.a, self.b, self.c].iter().all(|v| v.is_finite())
    }
}

/// Coefficients of the linear problem with `eta` fixed to a number.
pub trait CoefficientField: Sync {
    fn eta(&self) -> f64;
    fn coeffs(&self, x: f64, t: f64) -> Coeffs;
}

/// A model's `q, r, A, B, C` evaluated on an exact solution.
#[derive(Clone, Debug)]
pub struct SolutionField {
    eta: f64,
    solution: ExactSolution,
    exprs: [CompiledExpr; 5],
    max_jet: u32,
}

impl SolutionField {
    /// Each entry is reduced by `model` first, so constrained jets such as
    /// `u_x` are expressed in the fields the solution provides.
    pub fn new(qr: &QRModel, model: &EvolutionModel, solution: ExactSolution, eta: f64) -> Result<Self, RiccatiError> {
        let reduce = |e: &NormalForm| -> Result<CompiledExpr, RiccatiError> { Ok(CompiledExpr::new(&model.reduce(e)?)) };
        let exprs = [reduce(&qr.q)?, reduce(&qr.r)?, reduce(&qr.a)?, reduce(&qr.b)?, reduce(&qr.c)?];
        let probe = solution.sample(0.0, 0.0, crate::pdebench::MAX_JET);
        let mut max_jet = 0;
        for g in exprs.iter().flat_map(|e| e.variables()) {
            match g {
                Generator::Eta => {}
                Generator::Jet { order, .. } if *order <= crate::pdebench::MAX_JET && probe.value(g).is_some() => {
                    max_jet = max_jet.max(*order)
                }
                g if probe.value(g).is_some() => {}
                g => return Err(RiccatiError::Unsupported(g.to_string())),
            }
        }
        Ok(SolutionField { eta, solution, exprs, max_jet })
    }

    pub fn solution(&self) -> &ExactSolution {
        &self.solution
    }
}

impl CoefficientField for SolutionField {
    fn eta(&self) -> f64 {
        self.eta
    }

    fn coeffs(&self, x: f64, t: f64) -> Coeffs {
        let s = self.solution.sample(x, t, self.max_jet);
        let eval = |e: &CompiledExpr| {
            e.eval_with(|g| match g {
                Generator::Eta => Some(self.eta),
                g => s.value(g),
            })
            .unwrap_or(f64::NAN)
        };
        Coeffs {
            q: eval(&self.exprs[0]),
            r: eval(&self.exprs[1]),
            a: eval(&self.exprs[2]),
            b: eval(&self.exprs[3]),
            c: eval(&self.exprs[4]),
        }
    }
}

/// The same coefficients everywhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantField {
    pub eta: f64,
    pub coeffs: Coeffs,
}

impl CoefficientField for ConstantField {
    fn eta(&self) -> f64 {
        self.eta
    }

    fn coeffs(&self, _x: f64, _t: f64) -> Coeffs {
        self.coeffs
    }
}

/// `B` shifted by a constant; breaks the zero-curvature condition.
#[derive(Clone, Debug)]
pub struct PerturbedB<F> {
    pub inner: F,
    pub delta: f64,
}

impl<F: CoefficientField> CoefficientField for PerturbedB<F> {
    fn eta(&self) -> f64 {
        self.inner.eta()
    }

    fn coeffs(&self, x: f64, t: f64) -> Coeffs {
        let mut c = self.inner.coeffs(x, t);
        c.b += self.delta;
        c
    }
}

impl<F: CoefficientField + ?Sized> CoefficientField for &F {
    fn eta(&self) -> f64 {
        (**self).eta()
    }

    fn coeffs(&self, x: f64, t: f64) -> Coeffs {
        (**self).coeffs(x, t)
    }
}
