//! Exact solutions, spectral evolvers and conserved-integral drift.
//!
//! The line is replaced by a periodic box `[-L/2, L/2)` holding data that
//! decays well inside it. Jets come from spectral differentiation and
//! integrals from the periodic trapezoid rule, which integrates total
//! derivatives of smooth periodic data to round-off.

mod config;
mod exact;
mod spectral;

pub use config::{GridConfig, InitialCondition, RunConfig, TimeConfig};
pub use exact::{ExactSolution, Sample, MAX_JET};
pub use spectral::Spectral;

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::claws::ConservationLaw;
use crate::symcore::{CompiledExpr, Generator, NormalForm};

/// Largest `|q|` before a run is declared to have blown up.
pub const BLOW_UP: f64 = 1e6;

/// Stability limit of classical RK4 on the imaginary axis, slightly rounded
/// down.
const RK4_IMAG_LIMIT: f64 = 2.8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("initial data has {got} points, grid has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dt = {dt} exceeds the stability bound {bound:.3e}")]
    Unstable { dt: f64, bound: f64 },
    #[error("solution blew up at t = {t}")]
    BlowUp { t: f64 },
    #[error("u = {value} at the {edge} edge is not a stable vacuum (a multiple of 2 pi)")]
    NotAVacuum { edge: &'static str, value: f64 },
    #[error("density needs `{0}`, which the history cannot supply")]
    Unsupported(String),
    #[error("invalid run parameters: {0}")]
    Invalid(String),
}

/// Uniform periodic grid on `[-length/2, length/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub length: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(length: f64, n: usize) -> Result<Self, BenchError> {
        if !n.is_power_of_two() || n < 4 {
            return Err(BenchError::NotPowerOfTwo(n));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(BenchError::Invalid(format!("domain length {length}")));
        }
        Ok(Grid { length, n })
    }

    pub fn left(&self) -> f64 {
        -0.5 * self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.left() + j as f64 * self.dx()).collect()
    }
}

/// Saved snapshots of `q` (and of the potential `u` when there is one).
#[derive(Clone)]
pub struct FieldHistory {
    grid: Grid,
    spectral: Spectral,
    times: Vec<f64>,
    q: Vec<Vec<f64>>,
    u: Option<Vec<Vec<f64>>>,
}

impl fmt::Debug for FieldHistory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldHistory")
            .field("grid", &self.grid)
            .field("times", &self.times)
            .field("has_u", &self.u.is_some())
            .finish()
    }
}

impl FieldHistory {
    pub fn new(grid: Grid, times: Vec<f64>, q: Vec<Vec<f64>>, u: Option<Vec<Vec<f64>>>) -> Self {
        assert_eq!(times.len(), q.len());
        FieldHistory {
            spectral: Spectral::new(grid.n, grid.length),
            grid,
            times,
            q,
            u,
        }
    }

    /// Samples a closed-form solution at the given times.
    pub fn from_exact(sol: &ExactSolution, grid: Grid, times: &[f64]) -> Self {
        let xs = grid.points();
        let q = times
            .iter()
            .map(|&t| xs.iter().map(|&x| sol.q_jets(x, t, 0)[0]).collect())
            .collect();
        let u = matches!(sol, ExactSolution::SgKink { .. }).then(|| {
            times
                .iter()
                .map(|&t| xs.iter().map(|&x| sol.u(x, t).unwrap()).collect())
                .collect()
        });
        FieldHistory::new(grid, times.to_vec(), q, u)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn q(&self, i: usize) -> &[f64] {
        &self.q[i]
    }

    pub fn u(&self, i: usize) -> Option<&[f64]> {
        self.u.as_ref().map(|u| u[i].as_slice())
    }

    pub fn last_q(&self) -> &[f64] {
        self.q.last().expect("history is never empty")
    }
}

fn check_initial(grid: &Grid, f: &[f64]) -> Result<(), BenchError> {
    if f.len() != grid.n {
        return Err(BenchError::LengthMismatch { expected: grid.n, got: f.len() });
    }
    Ok(())
}

fn step_count(t_max: f64, dt: f64) -> Result<usize, BenchError> {
    if !(dt > 0.0 && dt.is_finite() && t_max >= 0.0 && t_max.is_finite()) {
        return Err(BenchError::Invalid(format!("t_max = {t_max}, dt = {dt}")));
    }
    Ok((t_max / dt - 1e-9).ceil().max(0.0) as usize)
}

/// Largest stable step for the nonlinear term of MKdV with data `q0`:
/// the advection speed `6 q^2` times the top wavenumber must stay inside
/// the RK4 stability interval.
pub fn mkdv_dt_bound(grid: &Grid, q0: &[f64]) -> f64 {
    let qmax = q0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let speed = 6.0 * qmax * qmax * Spectral::new(grid.n, grid.length).k_max();
    if speed == 0.0 {
        f64::INFINITY
    } else {
        RK4_IMAG_LIMIT / speed
    }
}

/// Pseudo-spectral MKdV `q_t + 6 q^2 q_x + q_xxx = 0`.
///
/// The dispersive term is integrated exactly through the factor
/// `exp(i k^3 t)`; the nonlinear term `-2 (q^3)_x` is advanced with
/// classical RK4 in the integrating-factor variables. Snapshots are kept
/// every `save_every` steps and at `t_max`.
pub fn evolve_mkdv(grid: Grid, q0: &[f64], t_max: f64, dt: f64, save_every: usize) -> Result<FieldHistory, BenchError> {
    check_initial(&grid, q0)?;
    let steps = step_count(t_max, dt)?;
    let dt = if steps == 0 { dt } else { t_max / steps as f64 };
    let bound = mkdv_dt_bound(&grid, q0);
    if dt > bound {
        return Err(BenchError::Unstable { dt, bound });
    }
    let sp = Spectral::new(grid.n, grid.length);
    let k = sp.wavenumbers().to_vec();
    let nyq = grid.n / 2;
    let half: Vec<Complex64> = k.iter().map(|k| Complex64::from_polar(1.0, k * k * k * dt / 2.0)).collect();

    let nonlinear = |qh: &[Complex64]| -> Vec<Complex64> {
        let q = sp.inverse(qh.to_vec());
        let cube: Vec<f64> = q.iter().map(|v| v * v * v).collect();
        let mut out = sp.forward(&cube);
        for (j, c) in out.iter_mut().enumerate() {
            *c = if j == nyq { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, -2.0 * k[j]) * *c };
        }
        out
    };

    let mut qh = sp.forward(q0);
    let mut times = vec![0.0];
    let mut snaps = vec![q0.to_vec()];
    let save_every = save_every.max(1);
    for step in 1..=steps {
        let e = &half;
        let k1 = nonlinear(&qh);
        let a: Vec<Complex64> = (0..grid.n).map(|j| e[j] * (qh[j] + 0.5 * dt * k1[j])).collect();
        let k2 = nonlinear(&a);
        let b: Vec<Complex64> = (0..grid.n).map(|j| e[j] * qh[j] + 0.5 * dt * k2[j]).collect();
        let k3 = nonlinear(&b);
        let c: Vec<Complex64> = (0..grid.n).map(|j| e[j] * e[j] * qh[j] + dt * e[j] * k3[j]).collect();
        let k4 = nonlinear(&c);
        for j in 0..grid.n {
            let e2 = e[j] * e[j];
            qh[j] = e2 * qh[j] + dt / 6.0 * (e2 * k1[j] + 2.0 * e[j] * (k2[j] + k3[j]) + k4[j]);
        }
        if step % save_every == 0 || step == steps {
            let q = sp.inverse(qh.clone());
            let t = step as f64 * dt;
            if q.iter().any(|v| !v.is_finite() || v.abs() > BLOW_UP) {
                return Err(BenchError::BlowUp { t });
            }
            times.push(t);
            snaps.push(q);
        }
    }
    Ok(FieldHistory::new(grid, times, snaps, None))
}

fn vacuum_index(u: f64, edge: &'static str) -> Result<i64, BenchError> {
    let n = (u / (2.0 * PI)).round();
    if (u - 2.0 * PI * n).abs() > 1e-6 {
        return Err(BenchError::NotAVacuum { edge, value: u });
    }
    Ok(n as i64)
}

/// `q = u_x / 2` for a potential running between two vacua. A linear ramp
/// through `u(x0)` and the extrapolated `u(x0 + L)` is removed so the
/// remainder is continuous across the periodic seam.
fn sg_q(sp: &Spectral, grid: &Grid, u: &[f64], right_vacuum: f64) -> Vec<f64> {
    let n = u.len();
    let (w1, w2) = (u[n - 1] - right_vacuum, u[n - 2] - right_vacuum);
    let next = if w1 * w2 > 0.0 && w1.abs() < w2.abs() { w1 * w1 / w2 } else { w1 };
    let slope = (right_vacuum + next - u[0]) / grid.length;
    let v: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(j, u)| u - slope * j as f64 * grid.dx())
        .collect();
    sp.derivative(&v, 1).iter().map(|d| 0.5 * (d + slope)).collect()
}

/// `integral of sin u` from `-inf` to the left edge, treating the tail as
/// the linear mode `w exp(kappa (x - x0))` with `w = u - vacuum` and `kappa`
/// fitted from the first two points. Zero when the tail does not decay
/// outward.
fn left_tail(u: &[f64], vacuum: f64, dx: f64) -> f64 {
    let (w0, w1) = (u[0] - vacuum, u[1] - vacuum);
    if w0 == 0.0 || w0 * w1 <= 0.0 || w1.abs() <= w0.abs() {
        return 0.0;
    }
    let kappa = (w1 / w0).ln() / dx;
    w0 / kappa
}

/// Sine-Gordon in light-cone form `u_xt = sin u`, advanced as
/// `u_t(x) = integral from -inf to x of sin u`. The part inside the box is
/// the spectral antiderivative of the mean-free part of `sin u` plus a
/// linear ramp for the mean; the part left of the box comes from the
/// exponential tail, so `u_t` decays at the left edge like the data does.
///
/// Both edge values must be stable vacua `2 pi n`; anything else (including
/// the unstable rest state `u = pi`) is rejected.
pub fn evolve_sg(grid: Grid, u0: &[f64], t_max: f64, dt: f64, save_every: usize) -> Result<FieldHistory, BenchError> {
    check_initial(&grid, u0)?;
    let left = vacuum_index(u0[0], "left")?;
    let right = vacuum_index(u0[grid.n - 1], "right")?;
    let right_vacuum = 2.0 * PI * right as f64;
    let steps = step_count(t_max, dt)?;
    let dt = if steps == 0 { dt } else { t_max / steps as f64 };
    let sp = Spectral::new(grid.n, grid.length);
    let dx = grid.dx();

    let vacuum = 2.0 * PI * left as f64;
    let rhs = |u: &[f64]| -> Vec<f64> {
        let s: Vec<f64> = u.iter().map(|v| v.sin()).collect();
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        let centered: Vec<f64> = s.iter().map(|v| v - mean).collect();
        let g = sp.antiderivative(&centered);
        let offset = left_tail(u, vacuum, dx) - g[0];
        g.iter()
            .enumerate()
            .map(|(j, g)| g + offset + mean * j as f64 * dx)
            .collect()
    };
    let axpy = |u: &[f64], k: &[f64], h: f64| -> Vec<f64> { u.iter().zip(k).map(|(u, k)| u + h * k).collect() };

    let mut u = u0.to_vec();
    let mut times = vec![0.0];
    let mut us = vec![u.clone()];
    let mut qs = vec![sg_q(&sp, &grid, &u, right_vacuum)];
    let save_every = save_every.max(1);
    for step in 1..=steps {
        let k1 = rhs(&u);
        let k2 = rhs(&axpy(&u, &k1, 0.5 * dt));
        let k3 = rhs(&axpy(&u, &k2, 0.5 * dt));
        let k4 = rhs(&axpy(&u, &k3, dt));
        for j in 0..grid.n {
            u[j] += dt / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
        }
        if step % save_every == 0 || step == steps {
            let t = step as f64 * dt;
            if u.iter().any(|v| !v.is_finite() || v.abs() > BLOW_UP) {
                return Err(BenchError::BlowUp { t });
            }
            times.push(t);
            qs.push(sg_q(&sp, &grid, &u, right_vacuum));
            us.push(u.clone());
        }
    }
    Ok(FieldHistory::new(grid, times, qs, Some(us)))
}

/// Highest q-jet a density may use.
pub const MAX_DENSITY_ORDER: u32 = 8;

/// `I = integral of density dx` over the periodic box at snapshot `index`.
pub fn conserved_integral(density: &NormalForm, h: &FieldHistory, index: usize) -> Result<f64, BenchError> {
    let compiled = CompiledExpr::new(density);
    let mut max_q = 0;
    for g in compiled.variables() {
        match g {
            Generator::Jet { field, order } if field.as_str() == "q" && *order <= MAX_DENSITY_ORDER => {
                max_q = max_q.max(*order)
            }
            Generator::Jet { field, order } if field.as_str() == "u" && h.u.is_some() && *order <= MAX_DENSITY_ORDER + 1 => {
                max_q = max_q.max(order.saturating_sub(1))
            }
            Generator::Sin(p) | Generator::Cos(p) if p.as_str() == "u" && h.u.is_some() => {}
            other => return Err(BenchError::Unsupported(other.to_string())),
        }
    }
    let jets = h.spectral.jets(h.q(index), max_q);
    let u = h.u(index);
    let lookup: Vec<Box<dyn Fn(usize) -> f64 + '_>> = compiled
        .variables()
        .iter()
        .map(|g| -> Box<dyn Fn(usize) -> f64 + '_> {
            match g {
                Generator::Jet { field, order } if field.as_str() == "q" => {
                    let col = &jets[*order as usize];
                    Box::new(move |j| col[j])
                }
                Generator::Jet { order: 0, .. } => {
                    let u = u.unwrap();
                    Box::new(move |j| u[j])
                }
                Generator::Jet { order, .. } => {
                    let col = &jets[*order as usize - 1];
                    Box::new(move |j| 2.0 * col[j])
                }
                Generator::Sin(_) => {
                    let u = u.unwrap();
                    Box::new(move |j| u[j].sin())
                }
                _ => {
                    let u = u.unwrap();
                    Box::new(move |j| u[j].cos())
                }
            }
        })
        .collect();
    let mut vals = vec![0.0; lookup.len()];
    let f: Vec<f64> = (0..h.grid.n)
        .map(|j| {
            for (v, l) in vals.iter_mut().zip(&lookup) {
                *v = l(j);
            }
            compiled.eval(&vals)
        })
        .collect();
    Ok(h.spectral.integrate(&f))
}

/// Time series and drift of one density.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftEntry {
    pub n: usize,
    pub density: String,
    pub values: Vec<f64>,
    /// `max_t |I(t) - I(0)| / max(|I(0)|, 1)`.
    pub drift: f64,
    pub trivial: bool,
    pub verified: bool,
    /// The numeric drift and the exact verification disagree.
    pub discrepancy: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftReport {
    pub times: Vec<f64>,
    pub threshold: f64,
    pub entries: Vec<DriftEntry>,
}

pub fn relative_drift(values: &[f64]) -> f64 {
    let Some(&i0) = values.first() else {
        return 0.0;
    };
    let worst = values.iter().fold(0.0f64, |m, v| m.max((v - i0).abs()));
    worst / i0.abs().max(1.0)
}

/// Conserved integrals of each law's density at every saved time.
/// `verified[i]` is the exact verdict for `laws[i]`; a law is flagged when
/// its drift is below `threshold` but verification failed, or the reverse.
pub fn drift_report(
    laws: &[ConservationLaw],
    verified: &[bool],
    h: &FieldHistory,
    threshold: f64,
) -> Result<DriftReport, BenchError> {
    let entries = laws
        .par_iter()
        .zip(verified.par_iter())
        .map(|(law, &ok)| -> Result<DriftEntry, BenchError> {
            let values = (0..h.len())
                .map(|i| conserved_integral(&law.density, h, i))
                .collect::<Result<Vec<_>, _>>()?;
            let drift = relative_drift(&values);
            Ok(DriftEntry {
                n: law.order,
                density: law.density.to_string(),
                values,
                drift,
                trivial: law.trivial,
                verified: ok,
                discrepancy: ok != (drift < threshold),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DriftReport { times: h.times.clone(), threshold, entries })
}
