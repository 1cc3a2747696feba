//! Single-particle building blocks: free Gaussian packets and harmonic
//! oscillator eigenstates. Both are separable across Cartesian axes, which
//! is what lets overlaps reduce to one-dimensional quadratures.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::tolerances::{QUADRATURE_HALF_WIDTH, QUADRATURE_POINTS};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Freely evolving Gaussian packet
/// `phi(x,0) = (2 pi w^2)^(-d/4) exp(-|x-c|^2 / (4 w^2) + i p.(x-c))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub center: Vec<f64>,
    pub momentum: Vec<f64>,
    pub width: f64,
    pub mass: f64,
}

/// Harmonic oscillator eigenstate centred at the origin, one level per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorEigenstate {
    pub levels: Vec<u32>,
    pub frequency: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingleParticleState {
    Gaussian(GaussianPacket),
    Oscillator(OscillatorEigenstate),
}

impl SingleParticleState {
    pub fn gaussian_packet(center: &[f64], momentum: &[f64], width: f64, mass: f64) -> Result<Self> {
        let d = center.len();
        if !(1..=3).contains(&d) {
            return param(format!("packet dimension must be 1..=3, got {d}"));
        }
        if momentum.len() != d {
            return param("packet centre and momentum have different dimensions");
        }
        if !(width > 0.0 && width.is_finite()) {
            return param(format!("packet width must be positive, got {width}"));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return param(format!("packet mass must be positive, got {mass}"));
        }
        if center.iter().chain(momentum).any(|v| !v.is_finite()) {
            return param("packet centre and momentum must be finite");
        }
        Ok(Self::Gaussian(GaussianPacket {
            center: center.to_vec(),
            momentum: momentum.to_vec(),
            width,
            mass,
        }))
    }

    pub fn oscillator(levels: &[i64], frequency: f64, mass: f64) -> Result<Self> {
        let d = levels.len();
        if !(1..=3).contains(&d) {
            return param(format!("oscillator dimension must be 1..=3, got {d}"));
        }
        if let Some(bad) = levels.iter().find(|&&n| n < 0) {
            return param(format!("oscillator level must be non-negative, got {bad}"));
        }
        if levels.iter().any(|&n| n > 150) {
            return param("oscillator levels above 150 are not supported");
        }
        if !(frequency > 0.0 && frequency.is_finite()) {
            return param(format!("oscillator frequency must be positive, got {frequency}"));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return param(format!("oscillator mass must be positive, got {mass}"));
        }
        Ok(Self::Oscillator(OscillatorEigenstate {
            levels: levels.iter().map(|&n| n as u32).collect(),
            frequency,
            mass,
        }))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Gaussian(g) => g.center.len(),
            Self::Oscillator(o) => o.levels.len(),
        }
    }

    pub fn mass(&self) -> f64 {
        match self {
            Self::Gaussian(g) => g.mass,
            Self::Oscillator(o) => o.mass,
        }
    }

    /// Value and derivative of the factor belonging to one Cartesian axis.
    pub(crate) fn axis_factor(&self, axis: usize, x: f64, t: f64) -> (Complex64, Complex64) {
        match self {
            Self::Gaussian(g) => g.axis_factor(axis, x, t),
            Self::Oscillator(o) => o.axis_factor(axis, x, t),
        }
    }

    /// Value and gradient at a single position.
    pub(crate) fn value_and_gradient(&self, pos: &[f64], t: f64) -> (Complex64, [Complex64; 3]) {
        let d = pos.len();
        let mut f = [Complex64::new(1.0, 0.0); 3];
        let mut g = [Complex64::new(0.0, 0.0); 3];
        for a in 0..d {
            let (v, dv) = self.axis_factor(a, pos[a], t);
            f[a] = v;
            g[a] = dv;
        }
        let value = f[0] * f[1] * f[2];
        let mut grad = [Complex64::new(0.0, 0.0); 3];
        for a in 0..d {
            let mut p = g[a];
            for (b, fb) in f.iter().enumerate().take(d) {
                if b != a {
                    p *= fb;
                }
            }
            grad[a] = p;
        }
        (value, grad)
    }

    pub fn evaluate(&self, pos: &[f64], t: f64) -> Complex64 {
        (0..pos.len())
            .map(|a| self.axis_factor(a, pos[a], t).0)
            .product()
    }

    /// Upper estimate of `max_x |phi(x,t)|`.
    pub(crate) fn peak(&self, t: f64) -> f64 {
        match self {
            Self::Gaussian(g) => {
                let s = g.width * g.spread(t);
                (2.0 * PI * s * s).powf(-(g.center.len() as f64) / 4.0)
            }
            Self::Oscillator(o) => (o.mass * o.frequency / PI).powf(o.levels.len() as f64 / 4.0),
        }
    }

    /// Length scale of the state at time `t`.
    pub(crate) fn length_scale(&self, t: f64) -> f64 {
        match self {
            Self::Gaussian(g) => g.width * g.spread(t),
            Self::Oscillator(o) => {
                let n = *o.levels.iter().max().unwrap_or(&0) as f64;
                ((2.0 * n + 1.0) / (o.mass * o.frequency)).sqrt()
            }
        }
    }

    /// Where the probability mass sits at time `t`, per axis.
    pub(crate) fn centre(&self, t: f64) -> Vec<f64> {
        match self {
            Self::Gaussian(g) => g
                .center
                .iter()
                .zip(&g.momentum)
                .map(|(c, p)| c + p * t / g.mass)
                .collect(),
            Self::Oscillator(o) => vec![0.0; o.levels.len()],
        }
    }

    /// `<self|other>` at t = 0 by per-axis trapezoidal quadrature.
    pub fn overlap(&self, other: &SingleParticleState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return param("overlap of states with different dimensions");
        }
        let half = QUADRATURE_HALF_WIDTH * self.length_scale(0.0).max(other.length_scale(0.0));
        let ca = self.centre(0.0);
        let cb = other.centre(0.0);
        let mut total = Complex64::new(1.0, 0.0);
        for axis in 0..self.dim() {
            let lo = ca[axis].min(cb[axis]) - half;
            let hi = ca[axis].max(cb[axis]) + half;
            total *= trapezoid(lo, hi, QUADRATURE_POINTS, |x| {
                self.axis_factor(axis, x, 0.0).0.conj() * other.axis_factor(axis, x, 0.0).0
            });
        }
        Ok(total)
    }
}

impl GaussianPacket {
    /// `sigma(t) / sigma(0)`.
    pub fn spread(&self, t: f64) -> f64 {
        let tau = t / (2.0 * self.mass * self.width * self.width);
        (1.0 + tau * tau).sqrt()
    }

    fn axis_factor(&self, axis: usize, x: f64, t: f64) -> (Complex64, Complex64) {
        let w2 = self.width * self.width;
        let p = self.momentum[axis];
        let c = self.center[axis];
        let a = Complex64::new(1.0, t / (2.0 * self.mass * w2));
        let u = x - c - p * t / self.mass;
        let norm = (2.0 * PI * w2).powf(-0.25);
        let exponent = -u * u / (4.0 * w2 * a) + I * (p * (x - c) - p * p * t / (2.0 * self.mass));
        let value = norm / a.sqrt() * exponent.exp();
        let dlog = -u / (2.0 * w2 * a) + I * p;
        (value, value * dlog)
    }
}

impl OscillatorEigenstate {
    fn axis_factor(&self, axis: usize, x: f64, t: f64) -> (Complex64, Complex64) {
        let n = self.levels[axis] as usize;
        let k = (self.mass * self.frequency).sqrt();
        let xi = k * x;
        let h = hermite_functions(n + 1, xi);
        let scale = k.sqrt();
        let value = scale * h[n];
        let lower = if n > 0 { (n as f64 / 2.0).sqrt() * h[n - 1] } else { 0.0 };
        let deriv = scale * k * (lower - ((n as f64 + 1.0) / 2.0).sqrt() * h[n + 1]);
        let phase = Complex64::from_polar(1.0, -(n as f64 + 0.5) * self.frequency * t);
        (value * phase, deriv * phase)
    }
}

/// Normalised Hermite functions `h_0..=h_max` at `xi`, by the stable
/// three-term recurrence.
pub(crate) fn hermite_functions(max: usize, xi: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(max + 1);
    h.push(PI.powf(-0.25) * (-xi * xi / 2.0).exp());
    if max >= 1 {
        h.push(2f64.sqrt() * xi * h[0]);
    }
    for j in 1..max {
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * xi * h[j] - (jf / (jf + 1.0)).sqrt() * h[j - 1];
        h.push(next);
    }
    h
}

pub(crate) fn trapezoid<F>(lo: f64, hi: f64, points: usize, mut f: F) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    let h = (hi - lo) / (points - 1) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..points {
        let w = if j == 0 || j == points - 1 { 0.5 } else { 1.0 };
        acc += w * f(lo + j as f64 * h);
    }
    acc * h
}
