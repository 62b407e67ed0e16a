use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// FFT plans and wavenumbers for a uniform periodic grid of `n` points on
/// a domain of length `length`.
#[derive(Clone)]
pub struct Spectral {
    n: usize,
    length: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
}

impl Spectral {
    pub fn new(n: usize, length: f64) -> Self {
        let mut planner = FftPlanner::new();
        let k = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                2.0 * PI * m / length
            })
            .collect();
        Spectral {
            n,
            length,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            k,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    /// Largest resolved wavenumber.
    pub fn k_max(&self) -> f64 {
        PI * self.n as f64 / self.length
    }

    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform, keeping the real part.
    pub fn inverse(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut spec);
        let s = 1.0 / self.n as f64;
        spec.iter().map(|c| c.re * s).collect()
    }

    /// `d^order f / dx^order`. The Nyquist mode is dropped.
    pub fn derivative(&self, f: &[f64], order: u32) -> Vec<f64> {
        if order == 0 {
            return f.to_vec();
        }
        let mut spec = self.forward(f);
        self.apply_derivative(&mut spec, order);
        self.inverse(spec)
    }

    pub fn apply_derivative(&self, spec: &mut [Complex64], order: u32) {
        let i = Complex64::new(0.0, 1.0);
        for (j, c) in spec.iter_mut().enumerate() {
            if self.n.is_multiple_of(2) && j == self.n / 2 {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c *= (i * self.k[j]).powu(order);
            }
        }
    }

    /// `f, f', ..., f^(max)`.
    pub fn jets(&self, f: &[f64], max: u32) -> Vec<Vec<f64>> {
        let spec = self.forward(f);
        (0..=max)
            .map(|k| {
                if k == 0 {
                    return f.to_vec();
                }
                let mut s = spec.clone();
                self.apply_derivative(&mut s, k);
                self.inverse(s)
            })
            .collect()
    }

    /// Periodic antiderivative of a zero-mean `f`, itself with zero mean.
    pub fn antiderivative(&self, f: &[f64]) -> Vec<f64> {
        let mut spec = self.forward(f);
        let i = Complex64::new(0.0, 1.0);
        for (j, c) in spec.iter_mut().enumerate() {
            if j == 0 || (self.n.is_multiple_of(2) && j == self.n / 2) {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c /= i * self.k[j];
            }
        }
        self.inverse(spec)
    }

    /// Periodic trapezoid rule.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.length / self.n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_a_trig_polynomial() {
        let n = 64;
        let sp = Spectral::new(n, 2.0 * PI);
        let x: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        let f: Vec<f64> = x.iter().map(|x| (3.0 * x).sin() + (x).cos()).collect();
        let d = sp.derivative(&f, 1);
        let d3 = sp.derivative(&f, 3);
        for j in 0..n {
            assert!((d[j] - (3.0 * (3.0 * x[j]).cos() - x[j].sin())).abs() < 1e-12);
            assert!((d3[j] - (-27.0 * (3.0 * x[j]).cos() + x[j].sin())).abs() < 1e-10);
        }
        let g = sp.antiderivative(&f);
        for j in 0..n {
            assert!((g[j] - (-(3.0 * x[j]).cos() / 3.0 + x[j].sin())).abs() < 1e-13);
        }
        assert!(sp.integrate(&f).abs() < 1e-13);
    }
}
