use std::collections::BTreeMap;

use super::generator::Generator;
use super::normal::NormalForm;
use super::poly::Poly;
use super::SymError;

/// Finite Laurent expansion in `eta` with eta-free coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    coeffs: BTreeMap<i64, NormalForm>,
}

impl LaurentSeries {
    pub fn of(e: &NormalForm) -> Result<Self, SymError> {
        let eta = Generator::Eta;
        let den_parts = e.denominator().coefficients_in(&eta);
        let nonzero: Vec<usize> = den_parts
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, _)| i)
            .collect();
        if nonzero.len() != 1 {
            return Err(SymError::NotLaurentFinite(e.to_string()));
        }
        let shift = nonzero[0] as i64;
        let rest = NormalForm::from_poly(den_parts[nonzero[0]].clone());
        let mut coeffs = BTreeMap::new();
        for (j, part) in e.numerator().coefficients_in(&eta).into_iter().enumerate() {
            if part.is_zero() {
                continue;
            }
            coeffs.insert(j as i64 - shift, NormalForm::from_poly(part).try_div(&rest)?);
        }
        Ok(LaurentSeries { coeffs })
    }

    /// Coefficient of `eta^n` (zero when absent).
    pub fn coeff(&self, n: i64) -> NormalForm {
        self.coeffs.get(&n).cloned().unwrap_or_else(NormalForm::zero)
    }

    pub fn min_power(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_power(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn powers(&self) -> impl Iterator<Item = (i64, &NormalForm)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    /// Re-sums `sum_n c_n eta^n`.
    pub fn resum(&self) -> NormalForm {
        self.coeffs
            .iter()
            .map(|(n, c)| c * &eta_power(*n))
            .sum()
    }
}

pub(crate) fn eta_power(n: i64) -> NormalForm {
    let p = Poly::var(Generator::Eta).pow(n.unsigned_abs() as u32);
    if n >= 0 {
        NormalForm::from_poly(p)
    } else {
        NormalForm::from_parts(Poly::one(), p).expect("eta power is nonzero")
    }
}

/// Coefficients of `eta^n` for `n` in `n_min..=n_max`.
pub fn laurent_eta(e: &NormalForm, n_min: i64, n_max: i64) -> Result<Vec<NormalForm>, SymError> {
    let s = LaurentSeries::of(e)?;
    Ok((n_min..=n_max).map(|n| s.coeff(n)).collect())
}
