use rayon::prelude::*;
use serde::Serialize;

use super::{
    flow_gamma, flow_linear, flow_phi, wronskian_drift, Chart, CoefficientField, Coeffs, PathSamples, PathSpec,
    ProjectiveState, RiccatiError,
};

/// Worst disagreements between the three descriptions of one path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub eta: f64,
    /// `max |Gamma - tan(phi/2)|`, compared in the active chart.
    pub angle: f64,
    /// `max |Gamma - psi2/psi1|`, compared in the active chart.
    pub projective: f64,
    /// `max |W/W0 - 1|`.
    pub wronskian: f64,
    pub switches: usize,
    /// Worst `|Gamma * Gamma^ - 1|` at a switch.
    pub coherence: f64,
}

impl EquivalenceReport {
    pub fn passed(&self, equivalence_tol: f64, wronskian_tol: f64) -> bool {
        self.angle < equivalence_tol
            && self.projective < equivalence_tol
            && self.wronskian < wronskian_tol
            && self.coherence < 1e-10
    }
}

/// Integrates `phi`, the projective Riccati flow and the linear flow from
/// matched data `Gamma0 = tan(phi0/2)`, `psi0 ~ (1, Gamma0)` and compares
/// them node by node. Comparisons are made in whichever chart the Riccati
/// flow is using, where every quantity is bounded.
pub fn check_equivalences<F: CoefficientField + ?Sized>(
    cf: &F,
    path: PathSpec,
    phi0: f64,
) -> Result<EquivalenceReport, RiccatiError> {
    let samples = PathSamples::new(cf, path)?;
    let phi = flow_phi(&samples, phi0)?;
    let gamma = flow_gamma(&samples, ProjectiveState::from_angle(phi0))?;
    let (s, c) = (0.5 * phi0).sin_cos();
    let linear = flow_linear(&samples, c, s)?;
    let mut angle = 0.0f64;
    let mut projective = 0.0f64;
    for ((g, p), l) in gamma.states.iter().zip(&phi).zip(&linear.states) {
        let (s, c) = (0.5 * p).sin_cos();
        let (by_angle, by_linear) = match g.chart {
            Chart::Gamma => (s / c, l.psi2 / l.psi1),
            Chart::GammaHat => (c / s, l.psi1 / l.psi2),
        };
        angle = angle.max((g.value - by_angle).abs());
        projective = projective.max((g.value - by_linear).abs());
    }
    Ok(EquivalenceReport {
        eta: cf.eta(),
        angle,
        projective,
        wronskian: wronskian_drift(&samples),
        switches: gamma.switches.len(),
        coherence: gamma.switches.iter().fold(0.0, |m, s| m.max(s.coherence)),
    })
}

/// Nested grids for the finite-difference checks. The finest grid has
/// `nx x nt` cells; each coarser level doubles both spacings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub t0: f64,
    pub t1: f64,
    pub nx: usize,
    pub nt: usize,
    pub levels: usize,
    /// Length of the run-in before `x0` (after `x1` for `Gamma^`) over
    /// which rows start from the vacuum value.
    pub pad: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { x0: -10.0, x1: 10.0, t0: 0.0, t1: 1.0, nx: 512, nt: 64, levels: 4, pad: 20.0 }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<(), RiccatiError> {
        let coarse = 1usize << (self.levels.max(1) - 1);
        let ok = self.levels >= 2
            && self.nx.is_multiple_of(coarse)
            && self.nt.is_multiple_of(coarse)
            && self.nx / coarse >= 2
            && self.nt / coarse >= 2
            && self.x1 > self.x0
            && self.t1 > self.t0
            && self.pad >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(RiccatiError::InvalidPath(format!("grid {self:?}")))
        }
    }

    pub fn hx(&self) -> f64 {
        (self.x1 - self.x0) / self.nx as f64
    }

    pub fn ht(&self) -> f64 {
        (self.t1 - self.t0) / self.nt as f64
    }

    fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx()
    }

    fn t(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.ht()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelResult {
    pub hx: f64,
    pub ht: f64,
    pub mismatch: f64,
    /// `log2` of the mismatch ratio to the next coarser level.
    pub order: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridStatus {
    /// Every measured order is at least [`MIN_ORDER`].
    Converged,
    /// Mismatch below [`EXACT`] on every level.
    Exact,
    NotConverged,
    /// The Riccati rows met a pole, so the check was not run.
    Pole,
}

pub const MIN_ORDER: f64 = 1.9;
pub const EXACT: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridReport {
    pub check: &'static str,
    pub eta: f64,
    pub levels: Vec<LevelResult>,
    pub status: GridStatus,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        matches!(self.status, GridStatus::Converged | GridStatus::Exact)
    }

    pub fn min_order(&self) -> Option<f64> {
        self.levels.iter().filter_map(|l| l.order).reduce(f64::min)
    }

    fn pole(check: &'static str, eta: f64) -> Self {
        GridReport { check, eta, levels: Vec::new(), status: GridStatus::Pole }
    }
}

#[derive(Clone, Copy)]
enum Row {
    Phi,
    Gamma,
    GammaHat,
}

/// RK4 substeps per grid cell, keeping `eta * h <= 0.01`.
fn substeps(spec: &GridSpec, eta: f64) -> usize {
    ((spec.hx() * eta.abs().max(1.0) / 0.01).ceil() as usize).max(1)
}

/// One row of `phi`, `Gamma` or `Gamma^` at the grid points, started at the
/// vacuum value `0` a distance `pad` outside the grid (left for `phi` and
/// `Gamma`, right for `Gamma^`, which is stable only integrating leftward).
/// `None` if the Riccati row leaves its chart.
fn row<F: CoefficientField + ?Sized>(cf: &F, spec: &GridSpec, t: f64, kind: Row) -> Result<Option<Vec<f64>>, RiccatiError> {
    let m = substeps(spec, cf.eta());
    let k = (spec.pad / spec.hx()).ceil() as usize;
    let steps = (k + spec.nx) * m;
    let lead = k as f64 * spec.hx();
    let path = match kind {
        Row::GammaHat => PathSpec::along_x(t, spec.x1 + lead, spec.x0, steps),
        _ => PathSpec::along_x(t, spec.x0 - lead, spec.x1, steps),
    };
    let samples = PathSamples::new(cf, path)?;
    let values = match kind {
        Row::Phi => flow_phi(&samples, 0.0)?,
        Row::Gamma | Row::GammaHat => {
            let chart = if matches!(kind, Row::Gamma) { Chart::Gamma } else { Chart::GammaHat };
            let g = flow_gamma(&samples, ProjectiveState { chart, value: 0.0 })?;
            if !g.switches.is_empty() {
                return Ok(None);
            }
            g.states.iter().map(|s| s.value).collect()
        }
    };
    let mut out: Vec<f64> = (0..=spec.nx).map(|i| values[(k + i) * m]).collect();
    if matches!(kind, Row::GammaHat) {
        out.reverse();
    }
    Ok(Some(out))
}

/// Values on the finest grid, indexed `[j][i]` (time, space).
struct Table {
    rows: Vec<Vec<f64>>,
}

fn table<F: CoefficientField + ?Sized>(cf: &F, spec: &GridSpec, kind: Row) -> Result<Option<Table>, RiccatiError> {
    let rows = (0..=spec.nt)
        .into_par_iter()
        .map(|j| row(cf, spec, spec.t(j), kind))
        .collect::<Result<Option<Vec<_>>, _>>()?;
    Ok(rows.map(|rows| Table { rows }))
}

fn coefficient_table<F: CoefficientField + ?Sized>(cf: &F, spec: &GridSpec) -> Vec<Vec<Coeffs>> {
    (0..=spec.nt)
        .into_par_iter()
        .map(|j| (0..=spec.nx).map(|i| cf.coeffs(spec.x(i), spec.t(j))).collect())
        .collect()
}

/// `max |D_t dens - D_x flux|` by central differences at the interior
/// points of the coarsest grid, for every level.
fn converge(
    check: &'static str,
    eta: f64,
    spec: &GridSpec,
    dens: &[Vec<f64>],
    flux: &[Vec<f64>],
) -> GridReport {
    let coarse = 1usize << (spec.levels - 1);
    let mut levels: Vec<LevelResult> = Vec::with_capacity(spec.levels);
    for level in 0..spec.levels {
        let s = coarse >> level;
        let (hx, ht) = (s as f64 * spec.hx(), s as f64 * spec.ht());
        let mut worst = 0.0f64;
        for j in (coarse..spec.nt).step_by(coarse) {
            for i in (coarse..spec.nx).step_by(coarse) {
                let dt = (dens[j + s][i] - dens[j - s][i]) / (2.0 * ht);
                let dx = (flux[j][i + s] - flux[j][i - s]) / (2.0 * hx);
                worst = worst.max((dt - dx).abs());
            }
        }
        let order = levels.last().map(|prev| (prev.mismatch / worst).log2());
        levels.push(LevelResult { hx, ht, mismatch: worst, order });
    }
    let status = if levels.iter().all(|l| l.mismatch < EXACT) {
        GridStatus::Exact
    } else if levels.iter().filter_map(|l| l.order).all(|o| o >= MIN_ORDER) {
        GridStatus::Converged
    } else {
        GridStatus::NotConverged
    };
    GridReport { check, eta, levels, status }
}

fn combine(rows: &[Vec<f64>], k: &[Vec<Coeffs>], f: impl Fn(f64, &Coeffs) -> f64) -> Vec<Vec<f64>> {
    rows.iter()
        .zip(k)
        .map(|(row, kr)| row.iter().zip(kr).map(|(v, c)| f(*v, c)).collect())
        .collect()
}

/// `(q Gamma)_t = (A + B Gamma)_x` and `(r Gamma^)_t = (-A + C Gamma^)_x`
/// on nested grids. A form whose rows meet a pole is reported as
/// [`GridStatus::Pole`].
pub fn check_conservation_form<F: CoefficientField + ?Sized>(
    cf: &F,
    spec: &GridSpec,
) -> Result<[GridReport; 2], RiccatiError> {
    spec.validate()?;
    let eta = cf.eta();
    let k = coefficient_table(cf, spec);
    let gamma = match table(cf, spec, Row::Gamma)? {
        Some(g) => converge(
            "conservation.gamma",
            eta,
            spec,
            &combine(&g.rows, &k, |g, c| c.q * g),
            &combine(&g.rows, &k, |g, c| c.a + c.b * g),
        ),
        None => GridReport::pole("conservation.gamma", eta),
    };
    let gamma_hat = match table(cf, spec, Row::GammaHat)? {
        Some(g) => converge(
            "conservation.gamma_hat",
            eta,
            spec,
            &combine(&g.rows, &k, |g, c| c.r * g),
            &combine(&g.rows, &k, |g, c| -c.a + c.c * g),
        ),
        None => GridReport::pole("conservation.gamma_hat", eta),
    };
    Ok([gamma, gamma_hat])
}

/// Closedness of `theta_1 = P dx + Q dt` with `P = -eta cos(phi) -
/// (r + q) sin(phi)` and `Q = -2A cos(phi) - (C + B) sin(phi)`, i.e.
/// `P_t = Q_x`, on nested grids. `phi` has no poles, so this runs for any
/// `eta`.
pub fn check_theta_closed<F: CoefficientField + ?Sized>(cf: &F, spec: &GridSpec) -> Result<GridReport, RiccatiError> {
    spec.validate()?;
    let eta = cf.eta();
    let k = coefficient_table(cf, spec);
    let phi = table(cf, spec, Row::Phi)?.expect("phi rows have no chart");
    let p = combine(&phi.rows, &k, |p, c| -eta * p.cos() - (c.r + c.q) * p.sin());
    let q = combine(&phi.rows, &k, |p, c| -2.0 * c.a * p.cos() - (c.c + c.b) * p.sin());
    Ok(converge("theta_closed", eta, spec, &p, &q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riccati::ConstantField;

    #[test]
    fn zero_field_is_exact() {
        let cf = ConstantField { eta: 3.0, coeffs: Coeffs::default() };
        let spec = GridSpec { nx: 64, nt: 16, pad: 1.0, ..GridSpec::default() };
        let [g, gh] = check_conservation_form(&cf, &spec).unwrap();
        assert_eq!(g.status, GridStatus::Exact);
        assert_eq!(gh.status, GridStatus::Exact);
        assert_eq!(check_theta_closed(&cf, &spec).unwrap().status, GridStatus::Exact);
    }

    #[test]
    fn grid_must_nest() {
        let cf = ConstantField { eta: 1.0, coeffs: Coeffs::default() };
        let spec = GridSpec { nx: 100, ..GridSpec::default() };
        assert!(check_theta_closed(&cf, &spec).is_err());
    }
}
