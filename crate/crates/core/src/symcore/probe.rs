//! Randomized floating-point probes used to cross-check exact zero tests.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use super::generator::{Generator, Symbol};
use super::normal::NormalForm;

/// Random values for `gens`, consistent with `sin^2 + cos^2 = 1`.
///
/// Jets are drawn with magnitude in `[0.3, 1.3]` so that jet denominators
/// stay away from zero; `eta` is drawn from `[0.5, 2]`.
pub fn random_point<R: Rng>(
    gens: impl IntoIterator<Item = Generator>,
    rng: &mut R,
) -> HashMap<Generator, f64> {
    let mut angles: BTreeMap<Symbol, f64> = BTreeMap::new();
    let mut out = HashMap::new();
    for g in gens {
        let v = match &g {
            Generator::Jet { .. } => {
                let m: f64 = rng.random_range(0.3..1.3);
                if rng.random_bool(0.5) { m } else { -m }
            }
            Generator::Eta => rng.random_range(0.5..2.0),
            Generator::Sin(p) => {
                let a = *angles.entry(p.clone()).or_insert_with(|| rng.random_range(-3.0..3.0));
                a.sin()
            }
            Generator::Cos(p) => {
                let a = *angles.entry(p.clone()).or_insert_with(|| rng.random_range(-3.0..3.0));
                a.cos()
            }
        };
        out.insert(g, v);
    }
    out
}

/// Largest `|e|` over `n` random points (skipping points where the
/// denominator vanishes numerically).
pub fn probe_max_abs<R: Rng>(e: &NormalForm, rng: &mut R, n: usize) -> f64 {
    let gens: Vec<Generator> = e.generators().into_iter().collect();
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let pt = random_point(gens.iter().cloned(), rng);
        if let Ok(v) = e.evaluate(|g| pt.get(g).copied()) {
            worst = worst.max(v.abs());
        }
    }
    worst
}
