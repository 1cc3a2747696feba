//! `|psi|^2` ensembles: Metropolis sampling, parallel propagation and
//! histogram checks of equivariance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configuration::Configuration;
use crate::error::{param, Error, Result};
use crate::guidance::{SpeciesTable, VectorPotential};
use crate::integrator::{integrate, IntegrateOptions, Termination, Trajectory};
use crate::tolerances::{BINNING_COVERAGE, COINCIDENCE_EPSILONS, METROPOLIS_BURN_IN, METROPOLIS_THIN};
use crate::wavefunctions::PilotWave;

/// Probability of proposing a relabelling instead of a random-walk step.
const SWAP_PROBABILITY: f64 = 0.1;

fn density(psi: &PilotWave, x: &Configuration, t: f64) -> f64 {
    psi.evaluate(x, t).map(|v| v.norm_sqr()).unwrap_or(0.0)
}

/// Random-walk Metropolis draws from `|psi(., t0)|^2`.
///
/// Gaussian proposals with one characteristic length per coordinate, mixed
/// with occasional transpositions of two particles, which lets the chain
/// move between the mirror-image modes of symmetric densities.
pub fn sample_initial(psi: &PilotWave, t0: f64, count: usize, seed: u64) -> Result<Vec<Configuration>> {
    if count == 0 {
        return param("sample count must be at least 1");
    }
    let (n, d) = (psi.particles(), psi.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = psi.length_scale(t0);
    let mut current = Configuration::from_raw(n, d, psi.centre_guess(t0));
    let mut p_current = density(psi, &current, t0);
    let mut out = Vec::with_capacity(count);
    let total = METROPOLIS_BURN_IN + METROPOLIS_THIN * count;
    for iteration in 1..=total {
        let proposal = if n >= 2 && rng.random::<f64>() < SWAP_PROBABILITY {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            let mut c = current.coords().to_vec();
            for axis in 0..d {
                c.swap(a * d + axis, b * d + axis);
            }
            c
        } else {
            current
                .coords()
                .iter()
                .map(|v| v + step * rng.sample::<f64, _>(StandardNormal))
                .collect()
        };
        let proposal = Configuration::from_raw(n, d, proposal);
        let p_new = density(psi, &proposal, t0);
        let u: f64 = rng.random();
        if p_current == 0.0 || u * p_current < p_new {
            current = proposal;
            p_current = p_new;
        }
        if iteration > METROPOLIS_BURN_IN && (iteration - METROPOLIS_BURN_IN) % METROPOLIS_THIN == 0 {
            out.push(current.clone());
        }
    }
    Ok(out)
}

/// Regular grid on the flattened configuration `[lo, hi)^{Nd}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Binning {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub bins: usize,
}

impl Binning {
    /// Bins per axis by dimension of the flattened configuration.
    pub fn default_bins(dims: usize) -> Option<usize> {
        match dims {
            1 => Some(50),
            2 => Some(20),
            3 => Some(10),
            _ => None,
        }
    }

    /// A box around the state's mass that holds at least 99.9% of it.
    pub fn covering(psi: &PilotWave, t: f64) -> Result<Self> {
        let dims = psi.particles() * psi.dim();
        let Some(bins) = Self::default_bins(dims) else {
            return Err(Error::Capability(format!("histograms need N*d <= 3, got {dims}")));
        };
        let centres = psi.centre_guess(t);
        let lo_c = centres.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi_c = centres.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut half = 6.0 * psi.length_scale(t);
        for _ in 0..6 {
            let b = Binning { lo: vec![lo_c - half; dims], hi: vec![hi_c + half; dims], bins };
            if b.coverage(psi, t)? >= BINNING_COVERAGE {
                return Ok(b);
            }
            half *= 1.5;
        }
        param("could not find a box holding 99.9% of |psi|^2")
    }

    fn dims(&self) -> usize {
        self.lo.len()
    }

    fn cell_count(&self) -> usize {
        self.bins.pow(self.dims() as u32)
    }

    fn cell_of(&self, coords: &[f64]) -> Option<usize> {
        let mut index = 0;
        for (a, &v) in coords.iter().enumerate() {
            let w = (self.hi[a] - self.lo[a]) / self.bins as f64;
            let k = ((v - self.lo[a]) / w).floor();
            if !(k >= 0.0 && k < self.bins as f64) {
                return None;
            }
            index = index * self.bins + k as usize;
        }
        Some(index)
    }

    /// `|psi|^2` mass of every cell, three-point Gauss-Legendre per axis.
    pub fn cell_masses(&self, psi: &PilotWave, t: f64) -> Result<Vec<f64>> {
        let dims = self.dims();
        if dims != psi.particles() * psi.dim() {
            return param("binning dimension does not match the state");
        }
        let r = (0.6f64).sqrt();
        let nodes = [(-r, 5.0 / 9.0), (0.0, 8.0 / 9.0), (r, 5.0 / 9.0)];
        let widths: Vec<f64> = (0..dims).map(|a| (self.hi[a] - self.lo[a]) / self.bins as f64).collect();
        let volume: f64 = widths.iter().product::<f64>() / 2f64.powi(dims as i32);
        let mut masses = Vec::with_capacity(self.cell_count());
        let mut point = vec![0.0; dims];
        for cell in 0..self.cell_count() {
            let mut idx = vec![0; dims];
            let mut rest = cell;
            for a in (0..dims).rev() {
                idx[a] = rest % self.bins;
                rest /= self.bins;
            }
            let mut sum = 0.0;
            for q in 0..3usize.pow(dims as u32) {
                let mut weight = 1.0;
                let mut qr = q;
                for a in 0..dims {
                    let (xi, w) = nodes[qr % 3];
                    qr /= 3;
                    let mid = self.lo[a] + (idx[a] as f64 + 0.5) * widths[a];
                    point[a] = mid + 0.5 * widths[a] * xi;
                    weight *= w;
                }
                let x = Configuration::from_raw(psi.particles(), psi.dim(), point.clone());
                sum += weight * psi.evaluate(&x, t)?.norm_sqr();
            }
            masses.push(sum * volume);
        }
        Ok(masses)
    }

    pub fn coverage(&self, psi: &PilotWave, t: f64) -> Result<f64> {
        Ok(self.cell_masses(psi, t)?.iter().sum())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityDistance {
    pub t: f64,
    pub value: f64,
    /// Multinomial sampling scale `sum_b sqrt(p_b (1 - p_b) / n)`.
    pub stderr: f64,
}

/// L1 distance between the sample histogram and the cell masses of
/// `|psi(., t)|^2`; samples outside the box go to an overflow cell.
pub fn density_distance(samples: &[Configuration], psi: &PilotWave, t: f64, binning: &Binning) -> Result<DensityDistance> {
    if samples.is_empty() {
        return param("density distance needs at least one sample");
    }
    let masses = binning.cell_masses(psi, t)?;
    let covered: f64 = masses.iter().sum();
    if covered < BINNING_COVERAGE {
        return param(format!("binning covers only {covered:.6} of |psi|^2, need {BINNING_COVERAGE}"));
    }
    let mut counts = vec![0usize; masses.len()];
    let mut overflow = 0usize;
    for s in samples {
        match binning.cell_of(s.coords()) {
            Some(c) => counts[c] += 1,
            None => overflow += 1,
        }
    }
    let n = samples.len() as f64;
    let mut value = 0.0;
    let mut stderr = 0.0;
    for (c, p) in counts.iter().zip(&masses) {
        value += (*c as f64 / n - p).abs();
        stderr += (p * (1.0 - p) / n).max(0.0).sqrt();
    }
    let tail = (1.0 - covered).max(0.0);
    value += (overflow as f64 / n - tail).abs();
    stderr += (tail * (1.0 - tail) / n).sqrt();
    Ok(DensityDistance { t, value, stderr })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceFraction {
    #[serde(rename = "1e-1")]
    pub e1: f64,
    #[serde(rename = "1e-2")]
    pub e2: f64,
    #[serde(rename = "1e-3")]
    pub e3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub n: usize,
    pub seed: u64,
    pub density_distance: Vec<DensityDistance>,
    pub coincidence_fraction: CoincidenceFraction,
    pub node_aborts: usize,
}

impl EnsembleReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Integrates every sample independently (in parallel) and aggregates the
/// monitors. Density distances are reported at `t0` and `t1` when the
/// configuration space has at most three dimensions, and omitted otherwise.
#[allow(clippy::too_many_arguments)]
pub fn propagate_ensemble(
    psi: &PilotWave,
    species: &SpeciesTable,
    potential: &VectorPotential,
    samples: &[Configuration],
    t0: f64,
    t1: f64,
    opts: &IntegrateOptions,
    seed: u64,
) -> Result<(Vec<Trajectory>, EnsembleReport)> {
    species.check_compatible(psi)?;
    let trajectories: Vec<Trajectory> = samples
        .par_iter()
        .map(|x0| match integrate(psi, species, potential, x0, t0, t1, opts) {
            Err(Error::Node { .. }) => {
                let mut t = Trajectory::single(x0.clone(), t0);
                t.meta.termination = Termination::NodeAbort;
                Ok(t)
            }
            other => other,
        })
        .collect::<Result<_>>()?;

    let node_aborts = trajectories.iter().filter(|t| t.meta.termination == Termination::NodeAbort).count();
    let fraction = |eps: f64| {
        if psi.particles() < 2 || trajectories.is_empty() {
            return 0.0;
        }
        trajectories.iter().filter(|t| t.meta.min_pair_distance < eps).count() as f64 / trajectories.len() as f64
    };
    let coincidence_fraction = CoincidenceFraction {
        e1: fraction(COINCIDENCE_EPSILONS[0]),
        e2: fraction(COINCIDENCE_EPSILONS[1]),
        e3: fraction(COINCIDENCE_EPSILONS[2]),
    };

    let mut distances = Vec::new();
    if Binning::default_bins(psi.particles() * psi.dim()).is_some() && !samples.is_empty() {
        let finals: Vec<Configuration> = trajectories
            .iter()
            .filter(|t| t.meta.termination == Termination::Completed)
            .map(|t| t.end().x.clone())
            .collect();
        distances.push(density_distance(samples, psi, t0, &Binning::covering(psi, t0)?)?);
        if !finals.is_empty() {
            distances.push(density_distance(&finals, psi, t1, &Binning::covering(psi, t1)?)?);
        }
    }
    let report = EnsembleReport {
        n: samples.len(),
        seed,
        density_distance: distances,
        coincidence_fraction,
        node_aborts,
    };
    Ok((trajectories, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guidance::Statistics;
    use crate::wavefunctions::SingleParticleState;

    fn ground() -> PilotWave {
        PilotWave::single(SingleParticleState::oscillator(&[0], 1.0, 1.0).unwrap())
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_initial(&ground(), 0.0, 50, 7).unwrap();
        let b = sample_initial(&ground(), 0.0, 50, 7).unwrap();
        let c = sample_initial(&ground(), 0.0, 50, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(sample_initial(&ground(), 0.0, 0, 7).is_err());
    }

    #[test]
    fn shifted_histogram_is_far() {
        let psi = ground();
        let b = Binning::covering(&psi, 0.0).unwrap();
        let far: Vec<Configuration> = (0..100).map(|i| Configuration::from_raw(1, 1, vec![100.0 + i as f64])).collect();
        let d = density_distance(&far, &psi, 0.0, &b).unwrap();
        assert!((d.value - 2.0).abs() < 2e-3, "{}", d.value);
    }

    #[test]
    fn narrow_box_is_rejected() {
        let psi = ground();
        let b = Binning { lo: vec![-0.5], hi: vec![0.5], bins: 50 };
        let s = vec![Configuration::from_raw(1, 1, vec![0.0])];
        assert!(matches!(density_distance(&s, &psi, 0.0, &b), Err(Error::Parameter(_))));
    }

    #[test]
    fn report_has_the_published_fields() {
        let psi = ground();
        let sp = SpeciesTable::uniform(1, 1.0, 0.0, Statistics::Boson).unwrap();
        let s = sample_initial(&psi, 0.0, 20, 1).unwrap();
        let (trajs, report) = propagate_ensemble(&psi, &sp, &VectorPotential::zero(), &s, 0.0, 1.0, &IntegrateOptions::default().endpoints(), 1).unwrap();
        for (t, x0) in trajs.iter().zip(&s) {
            assert_eq!(&t.end().x, x0);
        }
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        keys.sort();
        assert_eq!(keys, ["coincidence_fraction", "density_distance", "n", "node_aborts", "seed"]);
        let cf: Vec<&str> = v["coincidence_fraction"].as_object().unwrap().keys().map(|k| k.as_str()).collect();
        assert_eq!(cf, ["1e-1", "1e-2", "1e-3"]);
        assert_eq!(v["density_distance"].as_array().unwrap().len(), 2);
    }
}
