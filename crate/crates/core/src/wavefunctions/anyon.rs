//! Two anyons in a common isotropic harmonic trap, in the plane.
//!
//! With `R = (x1 + x2)/2` and `r = x1 - x2` the state factorises into a
//! ground state of the centre of mass (mass `2m`) and a relative factor
//! `r^|l| exp(-mu w r^2 / 2) exp(i l phi)` with reduced mass `mu = m/2` and
//! `l = nu + 2k`. Exchanging the particles sends `phi -> phi + pi`, which
//! multiplies the relative factor by `exp(i pi nu)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{param, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AnyonPair {
    pub nu: f64,
    pub k: i64,
    pub frequency: f64,
    pub mass: f64,
    ell: f64,
    cm_norm: f64,
    rel_norm: f64,
}

impl AnyonPair {
    pub fn new(nu: f64, k: i64, frequency: f64, mass: f64) -> Result<Self> {
        if !(0.0..2.0).contains(&nu) {
            return param(format!("statistics parameter nu must lie in [0, 2), got {nu}"));
        }
        if !(frequency > 0.0 && frequency.is_finite()) {
            return param(format!("trap frequency must be positive, got {frequency}"));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return param(format!("anyon mass must be positive, got {mass}"));
        }
        let ell = nu + 2.0 * k as f64;
        let a = ell.abs();
        let total_mass = 2.0 * mass;
        let mu = mass / 2.0;
        let cm_norm = (total_mass * frequency / PI).sqrt();
        let rel_norm = ((mu * frequency).powf(a + 1.0) / (PI * libm::tgamma(a + 1.0))).sqrt();
        Ok(Self { nu, k, frequency, mass, ell, cm_norm, rel_norm })
    }

    /// Relative angular momentum `l = nu + 2k`.
    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn reduced_mass(&self) -> f64 {
        self.mass / 2.0
    }

    /// Total energy: `w` (centre of mass) plus `(|l| + 1) w` (relative).
    pub fn energy(&self) -> f64 {
        self.frequency * (self.ell.abs() + 2.0)
    }

    pub(crate) fn length_scale(&self) -> f64 {
        (1.0 / (self.mass * self.frequency)).sqrt()
    }

    pub(crate) fn peak(&self) -> f64 {
        let a = self.ell.abs();
        let mw = self.reduced_mass() * self.frequency;
        let rel_peak = if a == 0.0 {
            self.rel_norm
        } else {
            self.rel_norm * (a / mw).powf(a / 2.0) * (-a / 2.0).exp()
        };
        self.cm_norm * rel_peak
    }

    fn relative_amplitude(&self, rho: f64) -> f64 {
        let mw = self.reduced_mass() * self.frequency;
        let a = self.ell.abs();
        let radial = if a == 0.0 { 1.0 } else { rho.powf(a) };
        self.rel_norm * radial * (-mw * rho * rho / 2.0).exp()
    }

    /// Value on the principal branch of the relative angle, and the lab-frame
    /// gradient `(d/dx1, d/dx2)` flattened to four components.
    pub(crate) fn value_and_gradient(&self, x: &[f64], t: f64) -> Result<(Complex64, [Complex64; 4])> {
        let (x1, x2) = (&x[0..2], &x[2..4]);
        let cm = [(x1[0] + x2[0]) / 2.0, (x1[1] + x2[1]) / 2.0];
        let r = [x1[0] - x2[0], x1[1] - x2[1]];
        let rho2 = r[0] * r[0] + r[1] * r[1];
        let rho = rho2.sqrt();
        let theta = r[1].atan2(r[0]);

        let big_m_w = 2.0 * self.mass * self.frequency;
        let mu_w = self.reduced_mass() * self.frequency;
        let cm_amp = self.cm_norm * (-big_m_w * (cm[0] * cm[0] + cm[1] * cm[1]) / 2.0).exp();
        let phase = Complex64::from_polar(1.0, self.ell * theta - self.energy() * t);
        let value = cm_amp * self.relative_amplitude(rho) * phase;

        let grad_cm = [-big_m_w * cm[0] * value, -big_m_w * cm[1] * value];
        let a = self.ell.abs();
        let grad_rel = if rho > 0.0 {
            let radial = if a == 0.0 { 0.0 } else { a / rho2 };
            let tangential = self.ell / rho2;
            [
                value * Complex64::new((radial - mu_w) * r[0], -tangential * r[1]),
                value * Complex64::new((radial - mu_w) * r[1], tangential * r[0]),
            ]
        } else if a == 0.0 || a > 1.0 {
            [Complex64::new(0.0, 0.0); 2]
        } else if a == 1.0 {
            let c = cm_amp * self.rel_norm * Complex64::from_polar(1.0, -self.energy() * t);
            [c, c * Complex64::new(0.0, self.ell.signum())]
        } else {
            return Err(Error::Node { modulus: 0.0, threshold: 0.0 });
        };

        let grad = [
            grad_cm[0] / 2.0 + grad_rel[0],
            grad_cm[1] / 2.0 + grad_rel[1],
            grad_cm[0] / 2.0 - grad_rel[0],
            grad_cm[1] / 2.0 - grad_rel[1],
        ];
        Ok((value, grad))
    }

    /// `<self|other>` at t = 0, closed form.
    pub(crate) fn overlap(&self, other: &AnyonPair) -> Complex64 {
        if self.ell != other.ell {
            return Complex64::new(0.0, 0.0);
        }
        let beta = (2.0 * self.mass * self.frequency + 2.0 * other.mass * other.frequency) / 2.0;
        let cm = self.cm_norm * other.cm_norm * PI / beta;
        let a = self.ell.abs();
        let alpha = (self.reduced_mass() * self.frequency + other.reduced_mass() * other.frequency) / 2.0;
        let rel = PI * self.rel_norm * other.rel_norm * libm::tgamma(a + 1.0) / alpha.powf(a + 1.0);
        Complex64::new(cm * rel, 0.0)
    }
}
