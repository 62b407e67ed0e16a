use std::sync::OnceLock;

use crate::symcore::Generator;

/// Closed-form travelling solutions.
///
/// Both are built on `s = sech(theta)`, `tau = tanh(theta)`:
/// - MKdV soliton: `q = a sech(a x - a^3 t)`.
/// - sine-Gordon kink: `u = 4 arctan(exp(a x + t / a))`, so
///   `q = u_x / 2 = a sech(theta)`, `sin u = -2 s tau`, `cos u = 1 - 2 s^2`.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactSolution {
    MkdvSoliton { a: f64 },
    SgKink { a: f64 },
}

/// Highest x-jet order the closed forms provide.
pub const MAX_JET: u32 = 8;

/// `d^k/dtheta^k sech` as a polynomial in `(s, tau)`: `(coeff, i, j)` for
/// `coeff * s^i * tau^j`.
fn sech_derivatives(max: u32) -> Vec<Vec<(f64, i32, i32)>> {
    let mut out = vec![vec![(1.0, 1, 0)]];
    for _ in 0..max {
        let prev = out.last().unwrap();
        let mut next: Vec<(f64, i32, i32)> = Vec::new();
        let mut push = |c: f64, i: i32, j: i32| {
            if let Some(t) = next.iter_mut().find(|t| t.1 == i && t.2 == j) {
                t.0 += c;
            } else {
                next.push((c, i, j));
            }
        };
        for &(c, i, j) in prev {
            // ds = -s tau, dtau = s^2
            push(-c * i as f64, i, j + 1);
            if j > 0 {
                push(c * j as f64, i + 2, j - 1);
            }
        }
        next.retain(|t| t.0 != 0.0);
        out.push(next);
    }
    out
}

fn table() -> &'static [Vec<(f64, i32, i32)>] {
    static T: OnceLock<Vec<Vec<(f64, i32, i32)>>> = OnceLock::new();
    T.get_or_init(|| sech_derivatives(MAX_JET + 2))
}

fn eval_poly(p: &[(f64, i32, i32)], s: f64, tau: f64) -> f64 {
    p.iter().map(|&(c, i, j)| c * s.powi(i) * tau.powi(j)).sum()
}

fn sech(theta: f64) -> f64 {
    let e = (-theta.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

impl ExactSolution {
    pub fn from_name(name: &str, a: f64) -> Option<Self> {
        match name {
            "mkdv-soliton" => Some(ExactSolution::MkdvSoliton { a }),
            "sg-kink" => Some(ExactSolution::SgKink { a }),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExactSolution::MkdvSoliton { .. } => "mkdv-soliton",
            ExactSolution::SgKink { .. } => "sg-kink",
        }
    }

    pub fn amplitude(&self) -> f64 {
        match self {
            ExactSolution::MkdvSoliton { a } | ExactSolution::SgKink { a } => *a,
        }
    }

    /// `(d theta/dx, d theta/dt)`.
    fn phase_speeds(&self) -> (f64, f64) {
        match *self {
            ExactSolution::MkdvSoliton { a } => (a, -a * a * a),
            ExactSolution::SgKink { a } => (a, 1.0 / a),
        }
    }

    fn theta(&self, x: f64, t: f64) -> f64 {
        let (kx, kt) = self.phase_speeds();
        kx * x + kt * t
    }

    /// `q, q_x, ..., d^max q/dx^max` at `(x, t)`.
    pub fn q_jets(&self, x: f64, t: f64, max: u32) -> Vec<f64> {
        let a = self.amplitude();
        let (kx, _) = self.phase_speeds();
        let th = self.theta(x, t);
        let (s, tau) = (sech(th), th.tanh());
        let mut scale = a;
        table()[..=max as usize]
            .iter()
            .map(|p| {
                let out = scale * eval_poly(p, s, tau);
                scale *= kx;
                out
            })
            .collect()
    }

    /// `D_t D_x^k q` at `(x, t)`.
    pub fn q_t_jet(&self, k: u32, x: f64, t: f64) -> f64 {
        let (kx, kt) = self.phase_speeds();
        let th = self.theta(x, t);
        let (s, tau) = (sech(th), th.tanh());
        self.amplitude() * kx.powi(k as i32) * kt * eval_poly(&table()[k as usize + 1], s, tau)
    }

    /// The potential `u` (sine-Gordon only).
    pub fn u(&self, x: f64, t: f64) -> Option<f64> {
        match self {
            ExactSolution::SgKink { .. } => Some(4.0 * self.theta(x, t).exp().atan()),
            ExactSolution::MkdvSoliton { .. } => None,
        }
    }

    /// `(sin u, cos u)` in closed form (sine-Gordon only).
    pub fn trig_u(&self, x: f64, t: f64) -> Option<(f64, f64)> {
        match self {
            ExactSolution::SgKink { .. } => {
                let th = self.theta(x, t);
                let (s, tau) = (sech(th), th.tanh());
                Some((-2.0 * s * tau, 1.0 - 2.0 * s * s))
            }
            ExactSolution::MkdvSoliton { .. } => None,
        }
    }

    /// Everything a generator lookup can need at `(x, t)`, with q-jets up
    /// to order `max`.
    pub fn sample(&self, x: f64, t: f64, max: u32) -> Sample {
        Sample {
            q: self.q_jets(x, t, max.min(MAX_JET)),
            u: self.u(x, t),
            trig: self.trig_u(x, t),
        }
    }

    /// Numeric value of a generator on the solution; see [`Sample::value`].
    pub fn value(&self, g: &Generator, x: f64, t: f64) -> Option<f64> {
        let k = match g {
            Generator::Jet { order, .. } => *order,
            _ => 0,
        };
        self.sample(x, t, k).value(g)
    }

    /// Residual of the evolution equation at `(x, t)`:
    /// `q_t + 6 q^2 q_x + q_xxx` or `u_xt - sin u`.
    pub fn evolution_residual(&self, x: f64, t: f64) -> f64 {
        match self {
            ExactSolution::MkdvSoliton { .. } => {
                let j = self.q_jets(x, t, 3);
                self.q_t_jet(0, x, t) + 6.0 * j[0] * j[0] * j[1] + j[3]
            }
            ExactSolution::SgKink { .. } => {
                let (sin_u, _) = self.trig_u(x, t).unwrap();
                2.0 * self.q_t_jet(0, x, t) - sin_u
            }
        }
    }
}

/// Solution values at one point.
#[derive(Clone, Debug)]
pub struct Sample {
    q: Vec<f64>,
    u: Option<f64>,
    trig: Option<(f64, f64)>,
}

impl Sample {
    /// `q` and `r = -q` jets, `u` and its jets (`u_x = 2q`), `sin u`,
    /// `cos u`. `eta` is not a solution quantity and yields `None`.
    pub fn value(&self, g: &Generator) -> Option<f64> {
        match g {
            Generator::Jet { field, order } => {
                let k = *order as usize;
                match field.as_str() {
                    "q" => self.q.get(k).copied(),
                    "r" => self.q.get(k).map(|v| -v),
                    "u" if k == 0 => self.u,
                    "u" => {
                        self.u?;
                        self.q.get(k - 1).map(|v| 2.0 * v)
                    }
                    _ => None,
                }
            }
            Generator::Sin(p) if p.as_str() == "u" => self.trig.map(|v| v.0),
            Generator::Cos(p) if p.as_str() == "u" => self.trig.map(|v| v.1),
            _ => None,
        }
    }
}
