//! The guidance law: corpuscle velocities from the phase gradient of the
//! pilot wave, minimally coupled to an external vector potential,
//!
//! ```text
//! v_k = ( Im[ grad_k psi / psi ] - q_k A(x_k) ) / m_k        (hbar = 1)
//! ```
//!
//! plus gauge transformations and loop integrals used to probe the
//! winding structure around flux lines and coincidence points.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::configuration::Configuration;
use crate::error::{param, Error, Result};
use crate::wavefunctions::PilotWave;

/// Exchange statistics carried by a corpuscle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statistics {
    Boson,
    Fermion,
    Anyon { nu: f64 },
    Distinguishable { label: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub mass: f64,
    pub charge: f64,
    pub statistics: Statistics,
}

/// Per-particle mass, charge and statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesTable {
    species: Vec<Species>,
}

impl SpeciesTable {
    pub fn new(species: Vec<Species>) -> Result<Self> {
        if species.is_empty() {
            return param("species table is empty");
        }
        for (k, s) in species.iter().enumerate() {
            if !(s.mass > 0.0 && s.mass.is_finite()) {
                return param(format!("particle {k}: mass must be positive, got {}", s.mass));
            }
            if !s.charge.is_finite() {
                return param(format!("particle {k}: charge must be finite"));
            }
            if let Statistics::Anyon { nu } = s.statistics {
                if !(0.0..2.0).contains(&nu) {
                    return param(format!("particle {k}: anyon nu must lie in [0, 2)"));
                }
            }
        }
        for a in 0..species.len() {
            for b in a + 1..species.len() {
                let (sa, sb) = (&species[a], &species[b]);
                if sa.statistics == sb.statistics && (sa.mass != sb.mass || sa.charge != sb.charge) {
                    return param(format!(
                        "particles {a} and {b} share statistics {:?} but differ in mass or charge",
                        sa.statistics
                    ));
                }
            }
        }
        Ok(Self { species })
    }

    /// N copies of one species.
    pub fn uniform(n: usize, mass: f64, charge: f64, statistics: Statistics) -> Result<Self> {
        Self::new(vec![Species { mass, charge, statistics }; n])
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
    }

    pub fn mass(&self, k: usize) -> f64 {
        self.species[k].mass
    }

    pub fn charge(&self, k: usize) -> f64 {
        self.species[k].charge
    }

    pub fn charges(&self) -> Vec<f64> {
        self.species.iter().map(|s| s.charge).collect()
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    /// True when every particle carries the same non-distinguishable tag.
    pub fn all_identical(&self) -> bool {
        let first = &self.species[0];
        !matches!(first.statistics, Statistics::Distinguishable { .. })
            && self.species.iter().all(|s| s == first)
    }

    /// Whether particles `a` and `b` are identical to each other.
    pub fn identical(&self, a: usize, b: usize) -> bool {
        let (sa, sb) = (&self.species[a], &self.species[b]);
        !matches!(sa.statistics, Statistics::Distinguishable { .. }) && sa == sb
    }

    pub fn check_compatible(&self, psi: &PilotWave) -> Result<()> {
        if self.len() != psi.particles() {
            return param(format!(
                "species table has {} entries but the state has {} particles",
                self.len(),
                psi.particles()
            ));
        }
        if psi.dim() != 2 && self.species.iter().any(|s| matches!(s.statistics, Statistics::Anyon { .. })) {
            return param("anyon statistics require d = 2");
        }
        Ok(())
    }
}

/// Scalar gauge function `chi(x)` with an analytic gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaugeFunction {
    Constant { value: f64 },
    /// `chi = slope . x + offset`.
    Linear { slope: Vec<f64>, offset: f64 },
    /// `chi = (flux / 2 pi) * atan2(y - y0, x - x0)`, branch cut along the
    /// negative x direction from `position`. Its gradient is the potential
    /// of a flux line, so `-flux` removes a line of strength `flux`.
    FluxAngle { flux: f64, position: [f64; 2] },
}

impl GaugeFunction {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Linear { slope, offset } => offset + slope.iter().zip(x).map(|(a, b)| a * b).sum::<f64>(),
            Self::FluxAngle { flux, position } => {
                flux / (2.0 * PI) * (x[1] - position[1]).atan2(x[0] - position[0])
            }
        }
    }

    pub fn gradient(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            Self::Constant { .. } => out.fill(0.0),
            Self::Linear { slope, .. } => {
                if slope.len() != x.len() {
                    return param("linear gauge function has the wrong dimension");
                }
                out.copy_from_slice(slope);
            }
            Self::FluxAngle { flux, position } => flux_line_field(*flux, *position, x, out)?,
        }
        Ok(())
    }

    fn negated(&self) -> Self {
        match self {
            Self::Constant { value } => Self::Constant { value: -value },
            Self::Linear { slope, offset } => Self::Linear { slope: slope.iter().map(|s| -s).collect(), offset: -offset },
            Self::FluxAngle { flux, position } => Self::FluxAngle { flux: -flux, position: *position },
        }
    }
}

fn flux_line_field(flux: f64, position: [f64; 2], x: &[f64], out: &mut [f64]) -> Result<()> {
    if x.len() != 2 {
        return param("flux lines live in the plane (d = 2)");
    }
    let dx = x[0] - position[0];
    let dy = x[1] - position[1];
    let r2 = dx * dx + dy * dy;
    if r2 == 0.0 {
        return Err(Error::Domain(format!("point {x:?} lies on the flux line")));
    }
    let c = flux / (2.0 * PI * r2);
    out[0] = -c * dy;
    out[1] = c * dx;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialTerm {
    /// Ideal Aharonov-Bohm flux line through `position`, perpendicular to the plane.
    FluxLine { flux: f64, position: [f64; 2] },
    /// `grad chi`, added by a gauge transformation.
    PureGauge { chi: GaugeFunction },
}

/// External vector potential as a sum of terms; no terms means `A = 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VectorPotential {
    #[serde(default)]
    pub terms: Vec<PotentialTerm>,
}

impl VectorPotential {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `A(x)` at a single position.
    pub fn value(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        out.fill(0.0);
        let mut tmp = [0.0; 3];
        for term in &self.terms {
            let tmp = &mut tmp[..x.len()];
            match term {
                PotentialTerm::FluxLine { flux, position } => flux_line_field(*flux, *position, x, tmp)?,
                PotentialTerm::PureGauge { chi } => chi.gradient(x, tmp)?,
            }
            for (o, v) in out.iter_mut().zip(tmp.iter()) {
                *o += v;
            }
        }
        Ok(())
    }

    /// Sign-flipped potential, the partner of a time-reversed pilot wave.
    pub fn reversed(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                PotentialTerm::FluxLine { flux, position } => PotentialTerm::FluxLine { flux: -flux, position: *position },
                PotentialTerm::PureGauge { chi } => PotentialTerm::PureGauge { chi: chi.negated() },
            })
            .collect();
        Self { terms }
    }

    /// Singular points of the potential (flux-line positions).
    pub fn singular_points(&self) -> Vec<[f64; 2]> {
        self.terms
            .iter()
            .filter_map(|t| match t {
                PotentialTerm::FluxLine { position, .. } => Some(*position),
                PotentialTerm::PureGauge { chi: GaugeFunction::FluxAngle { position, .. } } => Some(*position),
                _ => None,
            })
            .collect()
    }

    /// `oint A . dl` around a closed polyline.
    pub fn loop_integral(&self, polyline: &[[f64; 2]]) -> Result<f64> {
        let centres = self.singular_points();
        closed_line_integral(polyline, &centres, |p| {
            let mut a = [0.0; 2];
            self.value(&p, &mut a)?;
            Ok(a)
        })
    }
}

pub fn make_flux_line(flux: f64, position: [f64; 2]) -> VectorPotential {
    if flux == 0.0 {
        return VectorPotential::zero();
    }
    VectorPotential { terms: vec![PotentialTerm::FluxLine { flux, position }] }
}

/// Velocities of all corpuscles, flattened particle-major.
pub fn velocity_field(
    psi: &PilotWave,
    species: &SpeciesTable,
    potential: &VectorPotential,
    x: &Configuration,
    t: f64,
) -> Result<Vec<f64>> {
    Ok(velocity_and_modulus(psi, species, potential, x, t)?.0)
}

/// Velocity together with `|psi|` at the same point (the integrator needs both).
pub(crate) fn velocity_and_modulus(
    psi: &PilotWave,
    species: &SpeciesTable,
    potential: &VectorPotential,
    x: &Configuration,
    t: f64,
) -> Result<(Vec<f64>, f64)> {
    if species.len() != x.particles() {
        return param("species table and configuration disagree on N");
    }
    let (value, grad) = psi.value_and_gradient(x, t)?;
    let modulus = value.norm();
    let threshold = psi.node_threshold(t);
    if !(modulus >= threshold) {
        return Err(Error::Node { modulus, threshold });
    }
    let d = x.dim();
    let inv: Complex64 = value.inv();
    let mut v: Vec<f64> = grad.iter().map(|g| (g * inv).im).collect();
    let mut a = [0.0; 3];
    for k in 0..x.particles() {
        let q = species.charge(k);
        if !potential.is_zero() {
            potential.value(x.position(k), &mut a[..d])?;
        }
        let m = species.mass(k);
        for axis in 0..d {
            let vk = &mut v[k * d + axis];
            if q != 0.0 && !potential.is_zero() {
                *vk -= q * a[axis];
            }
            *vk /= m;
        }
    }
    Ok((v, modulus))
}

/// `psi -> psi exp(i sum_k q_k chi(x_k))`, `A -> A + grad chi`.
pub fn gauge_transform(
    psi: &PilotWave,
    species: &SpeciesTable,
    potential: &VectorPotential,
    chi: &GaugeFunction,
) -> Result<(PilotWave, VectorPotential)> {
    species.check_compatible(psi)?;
    if let GaugeFunction::Linear { slope, .. } = chi {
        if slope.len() != psi.dim() {
            return param("linear gauge function has the wrong dimension");
        }
    }
    if matches!(chi, GaugeFunction::FluxAngle { .. }) && psi.dim() != 2 {
        return param("flux-angle gauge functions need d = 2");
    }
    let dressed = psi.gauge_dressed(species.charges(), chi.clone());
    let mut a = potential.clone();
    if !matches!(chi, GaugeFunction::Constant { .. }) {
        a.terms.push(PotentialTerm::PureGauge { chi: chi.clone() });
    }
    Ok((dressed, a))
}

/// `oint v_rel . dr` around a closed loop in the relative plane `r = x1 - x2`,
/// holding the pair midpoint at `midpoint`.
pub fn circulation(
    psi: &PilotWave,
    species: &SpeciesTable,
    potential: &VectorPotential,
    polyline: &[[f64; 2]],
    midpoint: [f64; 2],
    t: f64,
) -> Result<f64> {
    if psi.particles() != 2 || psi.dim() != 2 {
        return param("circulation is defined for two particles in the plane");
    }
    closed_line_integral(polyline, &[[0.0, 0.0]], |r| {
        let x = Configuration::from_raw(
            2,
            2,
            vec![midpoint[0] + r[0] / 2.0, midpoint[1] + r[1] / 2.0, midpoint[0] - r[0] / 2.0, midpoint[1] - r[1] / 2.0],
        );
        let v = velocity_field(psi, species, potential, &x, t)?;
        Ok([v[0] - v[2], v[1] - v[3]])
    })
}

/// Circle of `segments` chords around `centre`, counterclockwise, closed.
pub fn circle(centre: [f64; 2], radius: f64, segments: usize) -> Vec<[f64; 2]> {
    (0..=segments)
        .map(|j| {
            let phi = 2.0 * PI * (j % segments) as f64 / segments as f64;
            [centre[0] + radius * phi.cos(), centre[1] + radius * phi.sin()]
        })
        .collect()
}

const GL_X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// Composite 8-point Gauss-Legendre line integral of a planar vector field
/// around a polyline (closed automatically). Segments are subdivided so
/// each piece is short compared with its distance to the nearest singular
/// centre.
fn closed_line_integral<F>(polyline: &[[f64; 2]], centres: &[[f64; 2]], mut field: F) -> Result<f64>
where
    F: FnMut([f64; 2]) -> Result<[f64; 2]>,
{
    if polyline.len() < 3 {
        return param("a closed loop needs at least three points");
    }
    let mut pts = polyline.to_vec();
    if pts.first() != pts.last() {
        pts.push(pts[0]);
    }
    let nearest = |p: [f64; 2]| {
        centres
            .iter()
            .map(|c| (p[0] - c[0]).hypot(p[1] - c[1]))
            .fold(f64::INFINITY, f64::min)
    };
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let chord = (b[0] - a[0]).hypot(b[1] - a[1]);
        if chord == 0.0 {
            continue;
        }
        let clearance = nearest(a).min(nearest(b)).min(nearest([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]));
        let pieces = if clearance.is_finite() && clearance > 0.0 {
            ((chord / (0.1 * clearance)).ceil() as usize).clamp(1, 100_000)
        } else {
            1
        };
        for j in 0..pieces {
            let s0 = j as f64 / pieces as f64;
            let s1 = (j + 1) as f64 / pieces as f64;
            let p0 = [a[0] + (b[0] - a[0]) * s0, a[1] + (b[1] - a[1]) * s0];
            let p1 = [a[0] + (b[0] - a[0]) * s1, a[1] + (b[1] - a[1]) * s1];
            let mid = [(p0[0] + p1[0]) / 2.0, (p0[1] + p1[1]) / 2.0];
            let half = [(p1[0] - p0[0]) / 2.0, (p1[1] - p0[1]) / 2.0];
            for (xg, wg) in GL_X.iter().zip(GL_W) {
                for sgn in [-1.0, 1.0] {
                    let q = [mid[0] + sgn * xg * half[0], mid[1] + sgn * xg * half[1]];
                    let f = field(q)?;
                    total += wg * (f[0] * half[0] + f[1] * half[1]);
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunctions::SingleParticleState;

    fn one(mass: f64, charge: f64) -> SpeciesTable {
        SpeciesTable::uniform(1, mass, charge, Statistics::Distinguishable { label: "a".into() }).unwrap()
    }

    #[test]
    fn species_invariants() {
        let boson = Species { mass: 1.0, charge: 0.0, statistics: Statistics::Boson };
        let heavy = Species { mass: 2.0, ..boson.clone() };
        assert!(SpeciesTable::new(vec![boson.clone(), heavy]).is_err());
        assert!(SpeciesTable::new(vec![boson.clone(), boson.clone()]).unwrap().all_identical());
        assert!(SpeciesTable::new(vec![]).is_err());
        let anyons = SpeciesTable::uniform(1, 1.0, 0.0, Statistics::Anyon { nu: 0.5 }).unwrap();
        let psi = PilotWave::single(SingleParticleState::oscillator(&[0], 1.0, 1.0).unwrap());
        assert!(anyons.check_compatible(&psi).is_err());
    }

    #[test]
    fn ground_state_is_at_rest() {
        let psi = PilotWave::single(SingleParticleState::oscillator(&[0, 0], 1.3, 1.0).unwrap());
        let x = Configuration::new(1, 2, vec![0.4, -0.9]).unwrap();
        let v = velocity_field(&psi, &one(1.0, 0.0), &VectorPotential::zero(), &x, 2.0).unwrap();
        assert!(v.iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn boosted_packet_moves_at_p_over_m() {
        let psi = PilotWave::single(SingleParticleState::gaussian_packet(&[1.0, -2.0], &[0.6, 1.2], 0.8, 2.0).unwrap());
        let x = Configuration::new(1, 2, vec![1.0, -2.0]).unwrap();
        let v = velocity_field(&psi, &one(2.0, 0.0), &VectorPotential::zero(), &x, 0.0).unwrap();
        assert!((v[0] - 0.3).abs() < 1e-15 && (v[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn velocity_at_a_node_is_an_error() {
        let psi = PilotWave::single(SingleParticleState::oscillator(&[1], 1.0, 1.0).unwrap());
        let x = Configuration::new(1, 1, vec![0.0]).unwrap();
        let r = velocity_field(&psi, &one(1.0, 0.0), &VectorPotential::zero(), &x, 0.0);
        assert!(matches!(r, Err(Error::Node { .. })));
    }

    #[test]
    fn flux_line_point_is_excluded() {
        let psi = PilotWave::single(SingleParticleState::gaussian_packet(&[0.0, 0.0], &[0.0, 0.0], 1.0, 1.0).unwrap());
        let a = make_flux_line(1.0, [0.0, 0.0]);
        let x = Configuration::new(1, 2, vec![0.0, 0.0]).unwrap();
        assert!(matches!(velocity_field(&psi, &one(1.0, 1.0), &a, &x, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_flux_is_zero_field() {
        assert!(make_flux_line(0.0, [1.0, 1.0]).is_zero());
    }

    #[test]
    fn flux_loop_integrals() {
        let a = make_flux_line(2.0 * PI, [0.0, 0.0]);
        let enclosing = a.loop_integral(&circle([0.0, 0.0], 1.0, 64)).unwrap();
        assert!((enclosing - 2.0 * PI).abs() < 1e-8, "{enclosing}");
        let outside = a.loop_integral(&circle([3.0, 0.5], 1.0, 64)).unwrap();
        assert!(outside.abs() < 1e-8, "{outside}");
        let square = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        assert!((a.loop_integral(&square).unwrap() - 2.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn constant_gauge_leaves_potential_alone() {
        let psi = PilotWave::single(SingleParticleState::gaussian_packet(&[0.0], &[1.0], 1.0, 1.0).unwrap());
        let sp = one(1.0, 1.0);
        let (psi2, a2) = gauge_transform(&psi, &sp, &VectorPotential::zero(), &GaugeFunction::Constant { value: 0.7 }).unwrap();
        assert!(a2.is_zero());
        let x = Configuration::new(1, 1, vec![0.3]).unwrap();
        let ratio = psi2.evaluate(&x, 0.2).unwrap() / psi.evaluate(&x, 0.2).unwrap();
        assert!((ratio - Complex64::from_polar(1.0, 0.7)).norm() < 1e-14);
        let v1 = velocity_field(&psi, &sp, &VectorPotential::zero(), &x, 0.2).unwrap();
        let v2 = velocity_field(&psi2, &sp, &a2, &x, 0.2).unwrap();
        assert!((v1[0] - v2[0]).abs() < 1e-14);
    }
}
