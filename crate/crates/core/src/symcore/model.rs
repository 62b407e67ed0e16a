use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::generator::{Generator, Symbol};
use super::normal::NormalForm;
use super::SymError;

/// Evolution equations `f_t = E_f` plus substitution constraints.
///
/// A constraint `jet(f, k) -> v` replaces the `k`-th x-jet of `f` and, by
/// prolongation, every higher jet (`jet(f, k + j) -> D_x^j v`). Constraint
/// values may not mention constrained jets, so one substitution pass is
/// always final. Time derivatives are never stored: they are eliminated
/// through the evolution equations and their x-prolongations.
#[derive(Clone, Default, PartialEq)]
pub struct EvolutionModel {
    evolutions: BTreeMap<Symbol, NormalForm>,
    constraints: BTreeMap<Symbol, (u32, NormalForm)>,
}

impl EvolutionModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_constraint(mut self, field: &str, order: u32, value: NormalForm) -> Result<Self, SymError> {
        let f = Symbol::new(field);
        if value.generators().iter().any(|g| self.constrains(g)) {
            return Err(SymError::InvalidModel(format!(
                "constraint value for {} mentions a constrained jet",
                Generator::jet(field, order)
            )));
        }
        if self.constraints.contains_key(&f) {
            return Err(SymError::InvalidModel(format!("field `{field}` is constrained twice")));
        }
        if order == 0 && self.evolutions.contains_key(&f) {
            return Err(SymError::InvalidModel(format!("field `{field}` has an evolution and cannot be eliminated")));
        }
        self.constraints.insert(f, (order, value));
        let clash = self
            .constraints
            .values()
            .map(|(_, v)| v)
            .chain(self.evolutions.values())
            .any(|v| v.generators().iter().any(|g| self.constrains(g)));
        if clash {
            return Err(SymError::InvalidModel(format!(
                "constraint on `{field}` conflicts with an existing constraint or evolution value"
            )));
        }
        Ok(self)
    }

    /// Adds `field_t = e`; `e` is reduced against the constraints first.
    pub fn with_evolution(mut self, field: &str, e: NormalForm) -> Result<Self, SymError> {
        let f = Symbol::new(field);
        if matches!(self.constraints.get(&f), Some((0, _))) {
            return Err(SymError::InvalidModel(format!("field `{field}` is eliminated by a constraint")));
        }
        let e = self.reduce(&e)?;
        self.evolutions.insert(f, e);
        Ok(self)
    }

    pub fn evolution(&self, field: &str) -> Option<&NormalForm> {
        self.evolutions.get(&Symbol::new(field))
    }

    pub fn evolutions(&self) -> impl Iterator<Item = (&Symbol, &NormalForm)> {
        self.evolutions.iter()
    }

    pub fn constraint(&self, field: &str) -> Option<(u32, &NormalForm)> {
        self.constraints.get(&Symbol::new(field)).map(|(k, v)| (*k, v))
    }

    pub fn constraints(&self) -> impl Iterator<Item = (&Symbol, u32, &NormalForm)> {
        self.constraints.iter().map(|(f, (k, v))| (f, *k, v))
    }

    pub fn has_evolution(&self) -> bool {
        !self.evolutions.is_empty()
    }

    /// True when `g` is a jet that the constraint map rewrites.
    pub fn constrains(&self, g: &Generator) -> bool {
        match g {
            Generator::Jet { field, order } => self
                .constraints
                .get(field)
                .is_some_and(|(k, _)| order >= k),
            _ => false,
        }
    }

    /// The value of a single generator after constraint substitution.
    pub fn reduce_generator(&self, g: &Generator) -> Result<NormalForm, SymError> {
        if let Generator::Jet { field, order } = g {
            if let Some((k, v)) = self.constraints.get(field) {
                if order >= k {
                    let mut out = v.clone();
                    for _ in *k..*order {
                        out = self.total_dx(&out)?;
                    }
                    return Ok(out);
                }
            }
        }
        Ok(NormalForm::generator(g.clone()))
    }

    pub fn reduce(&self, e: &NormalForm) -> Result<NormalForm, SymError> {
        if !e.generators().iter().any(|g| self.constrains(g)) {
            return Ok(e.clone());
        }
        e.substitute(|g| self.reduce_generator(g))
    }

    fn dx_generator(&self, g: &Generator) -> Result<NormalForm, SymError> {
        Ok(match g {
            Generator::Jet { field, order } => self.reduce_generator(&Generator::Jet {
                field: field.clone(),
                order: order + 1,
            })?,
            Generator::Eta => NormalForm::zero(),
            Generator::Sin(p) => {
                &self.reduce_generator(&Generator::Jet { field: p.clone(), order: 1 })?
                    * &NormalForm::generator(Generator::Cos(p.clone()))
            }
            Generator::Cos(p) => -(&self.reduce_generator(&Generator::Jet { field: p.clone(), order: 1 })?
                * &NormalForm::generator(Generator::Sin(p.clone()))),
        })
    }

    /// Leibniz-correct total x-derivative, constraints applied.
    pub fn total_dx(&self, e: &NormalForm) -> Result<NormalForm, SymError> {
        let e = self.reduce(e)?;
        e.derive(|g| self.dx_generator(g))
    }

    /// Total t-derivative with every time jet replaced by `D_x^k E_f`.
    pub fn total_dt(&self, e: &NormalForm) -> Result<NormalForm, SymError> {
        let e = self.reduce(e)?;
        let mut prolonged: HashMap<(Symbol, u32), NormalForm> = HashMap::new();
        let mut dt_jet = |field: &Symbol, order: u32| -> Result<NormalForm, SymError> {
            if let Some(v) = prolonged.get(&(field.clone(), order)) {
                return Ok(v.clone());
            }
            let Some(base) = self.evolutions.get(field) else {
                return Err(if self.constraints.contains_key(field) {
                    SymError::NonlocalTimeDerivative(field.to_string())
                } else {
                    SymError::NoEvolution(field.to_string())
                });
            };
            // Resume from the highest prolongation already computed.
            let mut k = order;
            while k > 0 && !prolonged.contains_key(&(field.clone(), k)) {
                k -= 1;
            }
            let mut cur = match prolonged.get(&(field.clone(), k)) {
                Some(v) => v.clone(),
                None => {
                    prolonged.insert((field.clone(), 0), base.clone());
                    base.clone()
                }
            };
            for j in k + 1..=order {
                cur = self.total_dx(&cur)?;
                prolonged.insert((field.clone(), j), cur.clone());
            }
            Ok(cur)
        };
        e.derive(|g| match g {
            Generator::Jet { field, order } => dt_jet(field, *order),
            Generator::Eta => Ok(NormalForm::zero()),
            Generator::Sin(p) => Ok(&dt_jet(p, 0)? * &NormalForm::generator(Generator::Cos(p.clone()))),
            Generator::Cos(p) => Ok(-(&dt_jet(p, 0)? * &NormalForm::generator(Generator::Sin(p.clone())))),
        })
    }
}

impl fmt::Debug for EvolutionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("EvolutionModel");
        for (k, v) in &self.evolutions {
            d.field(&format!("{k}_t"), &format_args!("{v}"));
        }
        for (k, (o, v)) in &self.constraints {
            d.field(&Generator::Jet { field: k.clone(), order: *o }.to_string(), &format_args!("{v}"));
        }
        d.finish()
    }
}
