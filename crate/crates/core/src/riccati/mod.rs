//! Numeric integration of the angle, Riccati and linear flows.
//!
//! Along a path in the `(x, t)` plane the linear problem is `psi' = M psi`
//! with a trace-free `M = [[a, b], [c, -a]]`:
//!
//! - along `x`: `a = eta/2`, `b = q`, `c = r`;
//! - along `t`: `a = A`, `b = B`, `c = C`.
//!
//! The same `M` drives the Riccati equation for `Gamma = psi2 / psi1`,
//! `Gamma' = c - 2 a Gamma - b Gamma^2`, its reciprocal chart
//! `Gamma^ = psi1 / psi2`, and the angle `phi = 2 atan(Gamma)`,
//! `phi' = (c - b) - 2 a sin(phi) + (c + b) cos(phi)`.
//!
//! All flows use fixed-step classical RK4 on coefficients sampled at the
//! nodes and midpoints of the path.

mod checks;
mod field;

pub use checks::{
    check_conservation_form, check_equivalences, check_theta_closed, EquivalenceReport, GridReport, GridSpec,
    GridStatus, LevelResult, EXACT, MIN_ORDER,
};
pub use field::{CoefficientField, Coeffs, ConstantField, PerturbedB, SolutionField};

use thiserror::Error;

use crate::symcore::SymError;

/// `|value|` above which the projective flow moves to the other chart.
pub const SWITCH_THRESHOLD: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiccatiError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("the solution cannot supply `{0}`")]
    Unsupported(String),
    #[error("non-finite coefficients at s = {0}")]
    NonFinite(f64),
    #[error("both charts diverged within one step at s = {0}; the step is too large")]
    BothChartsDiverged(f64),
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Direction {
    /// Along `x` at fixed `t`.
    X { t: f64 },
    /// Along `t` at fixed `x`.
    T { x: f64 },
}

/// `steps` equal steps from `start` to `end` (which may lie below `start`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSpec {
    pub direction: Direction,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl PathSpec {
    pub fn along_x(t: f64, start: f64, end: f64, steps: usize) -> Self {
        PathSpec { direction: Direction::X { t }, start, end, steps }
    }

    pub fn along_t(x: f64, start: f64, end: f64, steps: usize) -> Self {
        PathSpec { direction: Direction::T { x }, start, end, steps }
    }

    fn validate(&self) -> Result<(), RiccatiError> {
        if self.steps == 0 || !self.start.is_finite() || !self.end.is_finite() || self.start == self.end {
            return Err(RiccatiError::InvalidPath(format!("{self:?}")));
        }
        Ok(())
    }

    /// Signed step.
    pub fn h(&self) -> f64 {
        (self.end - self.start) / self.steps as f64
    }

    /// Parameter of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        self.start + i as f64 * self.h()
    }

    pub fn point(&self, s: f64) -> (f64, f64) {
        match self.direction {
            Direction::X { t } => (s, t),
            Direction::T { x } => (x, s),
        }
    }
}

/// `[[a, b], [c, -a]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Sl2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Sl2 {
    pub fn along(direction: Direction, eta: f64, k: &Coeffs) -> Self {
        match direction {
            Direction::X { .. } => Sl2 { a: 0.5 * eta, b: k.q, c: k.r },
            Direction::T { .. } => Sl2 { a: k.a, b: k.b, c: k.c },
        }
    }

    /// Generator seen from the reciprocal chart.
    fn swapped(self) -> Self {
        Sl2 { a: -self.a, b: self.c, c: self.b }
    }

    fn riccati(self, v: f64) -> f64 {
        self.c - 2.0 * self.a * v - self.b * v * v
    }

    fn angle(self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        (self.c - self.b) - 2.0 * self.a * s + (self.c + self.b) * c
    }

    fn apply(self, p: [f64; 2]) -> [f64; 2] {
        [self.a * p[0] + self.b * p[1], self.c * p[0] - self.a * p[1]]
    }
}

/// Generators at the nodes (even indices) and midpoints (odd indices).
#[derive(Clone, Debug)]
pub struct PathSamples {
    path: PathSpec,
    m: Vec<Sl2>,
}

impl PathSamples {
    pub fn new<F: CoefficientField + ?Sized>(cf: &F, path: PathSpec) -> Result<Self, RiccatiError> {
        path.validate()?;
        let eta = cf.eta();
        let half = 0.5 * path.h();
        let m = (0..=2 * path.steps)
            .map(|k| {
                let s = path.start + k as f64 * half;
                let (x, t) = path.point(s);
                let c = cf.coeffs(x, t);
                if !c.is_finite() {
                    return Err(RiccatiError::NonFinite(s));
                }
                Ok(Sl2::along(path.direction, eta, &c))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PathSamples { path, m })
    }

    pub fn path(&self) -> &PathSpec {
        &self.path
    }

    pub fn steps(&self) -> usize {
        self.path.steps
    }

    fn stage(&self, i: usize) -> (Sl2, Sl2, Sl2) {
        (self.m[2 * i], self.m[2 * i + 1], self.m[2 * i + 2])
    }
}

fn rk4_scalar(f: impl Fn(Sl2, f64) -> f64, (m0, mh, m1): (Sl2, Sl2, Sl2), y: f64, h: f64) -> f64 {
    let k1 = f(m0, y);
    let k2 = f(mh, y + 0.5 * h * k1);
    let k3 = f(mh, y + 0.5 * h * k2);
    let k4 = f(m1, y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)
}

/// One RK4 step of `psi' = M psi` as a matrix, column by column.
fn propagator((m0, mh, m1): (Sl2, Sl2, Sl2), h: f64) -> [[f64; 2]; 2] {
    let step = |y: [f64; 2]| {
        let add = |p: [f64; 2], k: [f64; 2], s: f64| [p[0] + s * k[0], p[1] + s * k[1]];
        let k1 = m0.apply(y);
        let k2 = mh.apply(add(y, k1, 0.5 * h));
        let k3 = mh.apply(add(y, k2, 0.5 * h));
        let k4 = m1.apply(add(y, k3, h));
        [
            y[0] + h / 6.0 * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]),
        ]
    };
    let c0 = step([1.0, 0.0]);
    let c1 = step([0.0, 1.0]);
    [[c0[0], c1[0]], [c0[1], c1[1]]]
}

fn mat_vec(p: &[[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [p[0][0] * v[0] + p[0][1] * v[1], p[1][0] * v[0] + p[1][1] * v[1]]
}

/// `phi` at every node.
pub fn flow_phi(samples: &PathSamples, phi0: f64) -> Result<Vec<f64>, RiccatiError> {
    let h = samples.path.h();
    let mut out = Vec::with_capacity(samples.steps() + 1);
    let mut phi = phi0;
    out.push(phi);
    for i in 0..samples.steps() {
        phi = rk4_scalar(Sl2::angle, samples.stage(i), phi, h);
        if !phi.is_finite() {
            return Err(RiccatiError::NonFinite(samples.path.node(i + 1)));
        }
        out.push(phi);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    /// `value = psi2 / psi1`.
    Gamma,
    /// `value = psi1 / psi2`.
    GammaHat,
}

impl Chart {
    pub fn other(self) -> Self {
        match self {
            Chart::Gamma => Chart::GammaHat,
            Chart::GammaHat => Chart::Gamma,
        }
    }
}

/// A point of the projective line in one of its two affine charts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectiveState {
    pub chart: Chart,
    pub value: f64,
}

impl ProjectiveState {
    /// Chooses the chart in which `|value| <= 1`.
    pub fn from_gamma(gamma: f64) -> Self {
        if gamma.abs() <= 1.0 {
            ProjectiveState { chart: Chart::Gamma, value: gamma }
        } else {
            ProjectiveState { chart: Chart::GammaHat, value: 1.0 / gamma }
        }
    }

    /// `(psi1, psi2)` with unit norm.
    pub fn from_angle(phi: f64) -> Self {
        let (s, c) = (0.5 * phi).sin_cos();
        if s.abs() <= c.abs() {
            ProjectiveState { chart: Chart::Gamma, value: s / c }
        } else {
            ProjectiveState { chart: Chart::GammaHat, value: c / s }
        }
    }

    /// The same point in the other chart.
    pub fn switched(self) -> Self {
        ProjectiveState { chart: self.chart.other(), value: 1.0 / self.value }
    }

    /// Value in the given chart, `None` at its pole.
    pub fn in_chart(self, chart: Chart) -> Option<f64> {
        if chart == self.chart {
            Some(self.value)
        } else if self.value != 0.0 {
            Some(1.0 / self.value)
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartSwitch {
    /// Node index at which the switch happened.
    pub index: usize,
    pub before: ProjectiveState,
    pub after: ProjectiveState,
    /// `|before * after - 1|`.
    pub coherence: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaTrajectory {
    pub states: Vec<ProjectiveState>,
    pub switches: Vec<ChartSwitch>,
}

fn chart_step(samples: &PathSamples, i: usize, state: ProjectiveState, h: f64) -> f64 {
    let (m0, mh, m1) = samples.stage(i);
    let stage = match state.chart {
        Chart::Gamma => (m0, mh, m1),
        Chart::GammaHat => (m0.swapped(), mh.swapped(), m1.swapped()),
    };
    rk4_scalar(Sl2::riccati, stage, state.value, h)
}

/// Projective Riccati flow, switching chart whenever `|value|` exceeds
/// [`SWITCH_THRESHOLD`].
pub fn flow_gamma(samples: &PathSamples, start: ProjectiveState) -> Result<GammaTrajectory, RiccatiError> {
    let h = samples.path.h();
    let mut states = Vec::with_capacity(samples.steps() + 1);
    let mut switches = Vec::new();
    let mut state = start;
    states.push(state);
    for i in 0..samples.steps() {
        let v = chart_step(samples, i, state, h);
        let mut next = ProjectiveState { chart: state.chart, value: v };
        if !v.is_finite() {
            // The step ran into the chart's pole: redo it from the other side.
            if state.value == 0.0 {
                return Err(RiccatiError::BothChartsDiverged(samples.path.node(i)));
            }
            let other = state.switched();
            let w = chart_step(samples, i, other, h);
            if !w.is_finite() {
                return Err(RiccatiError::BothChartsDiverged(samples.path.node(i)));
            }
            switches.push(ChartSwitch { index: i, before: state, after: other, coherence: (state.value * other.value - 1.0).abs() });
            next = ProjectiveState { chart: other.chart, value: w };
        }
        if next.value.abs() > SWITCH_THRESHOLD {
            let after = next.switched();
            switches.push(ChartSwitch {
                index: i + 1,
                before: next,
                after,
                coherence: (next.value * after.value - 1.0).abs(),
            });
            next = after;
        }
        state = next;
        states.push(state);
    }
    Ok(GammaTrajectory { states, switches })
}

/// `(psi1, psi2)` with unit norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearState {
    pub psi1: f64,
    pub psi2: f64,
}

impl LinearState {
    /// The point as a projective state in the chart where it is bounded.
    pub fn projective(self) -> ProjectiveState {
        if self.psi2.abs() <= self.psi1.abs() {
            ProjectiveState { chart: Chart::Gamma, value: self.psi2 / self.psi1 }
        } else {
            ProjectiveState { chart: Chart::GammaHat, value: self.psi1 / self.psi2 }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearTrajectory {
    pub states: Vec<LinearState>,
    /// `ln` of the norm removed so far; the unnormalized solution at node
    /// `i` is `exp(log_scale[i]) * states[i]`.
    pub log_scale: Vec<f64>,
}

/// Linear flow, renormalized to unit length after every step.
pub fn flow_linear(samples: &PathSamples, psi1: f64, psi2: f64) -> Result<LinearTrajectory, RiccatiError> {
    let norm0 = psi1.hypot(psi2);
    if norm0 == 0.0 || !norm0.is_finite() {
        return Err(RiccatiError::InvalidPath("initial vector must be nonzero".into()));
    }
    let h = samples.path.h();
    let mut v = [psi1 / norm0, psi2 / norm0];
    let mut log = norm0.ln();
    let mut states = vec![LinearState { psi1: v[0], psi2: v[1] }];
    let mut log_scale = vec![log];
    for i in 0..samples.steps() {
        let w = mat_vec(&propagator(samples.stage(i), h), v);
        let n = w[0].hypot(w[1]);
        if !(n.is_finite() && n > 0.0) {
            return Err(RiccatiError::NonFinite(samples.path.node(i + 1)));
        }
        v = [w[0] / n, w[1] / n];
        log += n.ln();
        states.push(LinearState { psi1: v[0], psi2: v[1] });
        log_scale.push(log);
    }
    Ok(LinearTrajectory { states, log_scale })
}

/// `max |W(s) / W(start) - 1|` for the Wronskian of two independent
/// solutions. The fundamental matrix is carried as an orthonormal frame
/// times the accumulated `ln det`, so exponential growth along the path
/// never cancels catastrophically.
pub fn wronskian_drift(samples: &PathSamples) -> f64 {
    let h = samples.path.h();
    let (mut e1, mut e2) = ([1.0, 0.0], [0.0, 1.0]);
    let mut log_det = 0.0f64;
    let mut worst = 0.0f64;
    for i in 0..samples.steps() {
        let p = propagator(samples.stage(i), h);
        let (y1, y2) = (mat_vec(&p, e1), mat_vec(&p, e2));
        let r11 = y1[0].hypot(y1[1]);
        let q1 = [y1[0] / r11, y1[1] / r11];
        let r12 = q1[0] * y2[0] + q1[1] * y2[1];
        let z = [y2[0] - r12 * q1[0], y2[1] - r12 * q1[1]];
        let r22 = z[0].hypot(z[1]);
        e1 = q1;
        e2 = [z[0] / r22, z[1] / r22];
        log_det += r11.ln() + r22.ln();
        worst = worst.max(log_det.exp_m1().abs());
    }
    worst
}
