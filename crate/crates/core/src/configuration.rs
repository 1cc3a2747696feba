use crate::error::{param, Result};

/// Positions of N corpuscles in d-dimensional space, stored particle-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    n: usize,
    d: usize,
    coords: Vec<f64>,
}

impl Configuration {
    /// Builds a configuration from a flat particle-major coordinate list.
    pub fn new(n: usize, d: usize, coords: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return param("configuration needs at least one particle");
        }
        if !(1..=3).contains(&d) {
            return param(format!("dimension must be 1, 2 or 3, got {d}"));
        }
        if coords.len() != n * d {
            return param(format!(
                "expected {} coordinates for N={n}, d={d}, got {}",
                n * d,
                coords.len()
            ));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return param(format!("non-finite coordinate {bad}"));
        }
        Ok(Self { n, d, coords })
    }

    pub fn from_positions(positions: &[Vec<f64>]) -> Result<Self> {
        let n = positions.len();
        let d = positions.first().map_or(0, Vec::len);
        if positions.iter().any(|p| p.len() != d) {
            return param("particle positions have mixed dimensions");
        }
        Self::new(n, d, positions.concat())
    }

    #[inline]
    pub fn particles(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn position(&self, k: usize) -> &[f64] {
        &self.coords[k * self.d..(k + 1) * self.d]
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn positions(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Same shape, new coordinates. Skips the finiteness scan; used on hot paths.
    pub(crate) fn with_coords_unchecked(&self, coords: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len(), self.coords.len());
        Self { n: self.n, d: self.d, coords }
    }

    pub(crate) fn from_raw(n: usize, d: usize, coords: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len(), n * d);
        Self { n, d, coords }
    }

    /// Largest Euclidean displacement of any single particle between two configurations.
    pub fn max_particle_distance(&self, other: &Configuration) -> f64 {
        self.positions()
            .zip(other.positions())
            .map(|(a, b)| distance(a, b))
            .fold(0.0, f64::max)
    }
}

#[inline]
pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
