//! Permutations of particle labels and the exchange-symmetry operations
//! built on them.
//!
//! Convention: applying `P` to a configuration puts the position of particle
//! `P^{-1}(i)` into slot `i`, so `apply(P, apply(Q, x)) = apply(PQ, x)` with
//! `(PQ)(i) = P(Q(i))`.

use std::fmt;

use num_complex::Complex64;

use crate::configuration::Configuration;
use crate::error::{param, Error, Result};
use crate::tolerances::{EXCHANGE_ANGLE_STEP, MAX_PERMUTATION_N, ORTHONORMAL_TOL};
use crate::wavefunctions::{overlap_matrix, signed_permutations, PilotWave, SymmetryTag};

/// A bijection on `{0, .., N-1}` stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return param(format!("{images:?} is not a rearrangement of 0..{n}"));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// From the 1-based image list used in scenario files.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return param("one-based permutation contains 0");
        }
        Self::from_images(images.iter().map(|i| i - 1).collect())
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        Self { images }
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a >= n || b >= n {
            return param("transposition index out of range");
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Ok(Self { images })
    }

    /// All N! permutations of `0..n`, lexicographic.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        use itertools::Itertools;
        (0..n).permutations(n).map(|images| Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `(self . other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return param("composing permutations of different sizes");
        }
        Ok(Self { images: other.images.iter().map(|&i| self.images[i]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p] = i;
        }
        Self { images: inv }
    }

    /// +1 for even, -1 for odd, from the cycle decomposition.
    pub fn parity(&self) -> i32 {
        let n = self.len();
        let mut visited = vec![false; n];
        let mut transpositions = 0;
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !visited[j] {
                visited[j] = true;
                j = self.images[j];
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Slot `i` of the result holds particle `P^{-1}(i)` of `x`.
    pub fn apply(&self, x: &Configuration) -> Result<Configuration> {
        if x.particles() != self.len() {
            return param(format!(
                "permutation on {} labels applied to {} particles",
                self.len(),
                x.particles()
            ));
        }
        Ok(x.with_coords_unchecked(self.apply_flat(x.coords(), x.dim())))
    }

    pub(crate) fn apply_flat(&self, coords: &[f64], d: usize) -> Vec<f64> {
        let mut out = vec![0.0; coords.len()];
        for (j, &pj) in self.images.iter().enumerate() {
            out[pj * d..(pj + 1) * d].copy_from_slice(&coords[j * d..(j + 1) * d]);
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based: Vec<String> = self.images.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", one_based.join(" "))
    }
}

/// `(N!)^{-1/2} sum_P prod_k phi_k(x_{P^{-1} k})`.
pub fn symmetrize(product: &PilotWave) -> Result<PilotWave> {
    symmetrise_with(product, 1.0)
}

/// `(N!)^{-1/2} sum_P sign(P) prod_k phi_k(x_{P^{-1} k})`.
pub fn antisymmetrize(product: &PilotWave) -> Result<PilotWave> {
    symmetrise_with(product, -1.0)
}

fn symmetrise_with(product: &PilotWave, sign: f64) -> Result<PilotWave> {
    let Some(states) = product.product_states() else {
        return Err(Error::Precondition("(anti)symmetrisation needs a plain product state".into()));
    };
    let n = states.len();
    if n > MAX_PERMUTATION_N {
        return Err(Error::Capability(format!("N={n} exceeds the N! cap of {MAX_PERMUTATION_N}")));
    }
    let m = overlap_matrix(states, states)?;
    if sign < 0.0 {
        for a in 0..n {
            for b in a + 1..n {
                let scale = (m[a][a].re * m[b][b].re).sqrt();
                if m[a][b].norm() >= (1.0 - ORTHONORMAL_TOL) * scale {
                    return Err(Error::ZeroFunction(format!(
                        "constituents {a} and {b} are the same state; the antisymmetrised product vanishes"
                    )));
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let target = if a == b { 1.0 } else { 0.0 };
            let dev = (m[a][b] - target).norm();
            if dev > ORTHONORMAL_TOL {
                return Err(Error::Precondition(format!(
                    "constituents are not orthonormal: |<{a}|{b}> - {target}| = {dev:.3e}"
                )));
            }
        }
    }
    PilotWave::symmetrised(states.to_vec(), sign)
}

/// A polyline in the relative plane `r = x1 - x2` used to continue the
/// phase of an anyonic state through an exchange.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangePath {
    pub points: Vec<[f64; 2]>,
}

impl ExchangePath {
    /// Half-turn of the relative vector from `start` to `-start`.
    pub fn semicircle(start: [f64; 2], counterclockwise: bool, segments: usize) -> Self {
        Self::arc(start, if counterclockwise { std::f64::consts::PI } else { -std::f64::consts::PI }, segments)
    }

    /// Rotation of `start` about the coincidence point by `angle`.
    pub fn arc(start: [f64; 2], angle: f64, segments: usize) -> Self {
        let r = (start[0] * start[0] + start[1] * start[1]).sqrt();
        let phi0 = start[1].atan2(start[0]);
        let segments = segments.max(1);
        let mut points: Vec<[f64; 2]> = (0..=segments)
            .map(|j| {
                let phi = phi0 + angle * j as f64 / segments as f64;
                [r * phi.cos(), r * phi.sin()]
            })
            .collect();
        points[0] = start;
        Self { points }
    }
}

/// `psi(Px) / psi(x)`.
///
/// For anyonic states the ratio depends on how the particles are exchanged;
/// a path in the relative plane is then required (unless `P` is the
/// identity) and the phase is continued along it from the single-valued
/// logarithmic derivative `grad psi / psi`.
pub fn exchange_phase(
    psi: &PilotWave,
    x: &Configuration,
    t: f64,
    p: &Permutation,
    path: Option<&ExchangePath>,
) -> Result<Complex64> {
    let v = psi.evaluate(x, t)?;
    let threshold = psi.node_threshold(t);
    if v.norm() < threshold {
        return Err(Error::Node { modulus: v.norm(), threshold });
    }
    let px = p.apply(x)?;
    match psi.symmetry() {
        SymmetryTag::Anyonic { .. } => match path {
            Some(path) => continued_ratio(psi, x, &px, t, path),
            None if p.is_identity() => Ok(Complex64::new(1.0, 0.0)),
            None => param("anyonic exchange phase needs an exchange path"),
        },
        _ => Ok(psi.evaluate(&px, t)? / v),
    }
}

/// `exp( integral of (grad psi / psi) . dx )` along the path, i.e. the ratio
/// `psi(end)/psi(start)` on the branch reached by continuity.
fn continued_ratio(
    psi: &PilotWave,
    x: &Configuration,
    px: &Configuration,
    t: f64,
    path: &ExchangePath,
) -> Result<Complex64> {
    if x.particles() != 2 || x.dim() != 2 {
        return param("exchange paths are defined for two particles in the plane");
    }
    if path.points.len() < 2 {
        return param("exchange path needs at least two points");
    }
    let rel = |c: &Configuration| [c.coords()[0] - c.coords()[2], c.coords()[1] - c.coords()[3]];
    let cm = [(x.coords()[0] + x.coords()[2]) / 2.0, (x.coords()[1] + x.coords()[3]) / 2.0];
    let start = rel(x);
    let end = rel(px);
    let scale = (start[0].hypot(start[1])).max(1.0);
    let close = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]) <= 1e-9 * scale;
    if !close(path.points[0], start) {
        return param("exchange path does not start at the relative coordinate of x");
    }
    if !close(*path.points.last().unwrap(), end) {
        return param("exchange path does not end at the relative coordinate of P x");
    }

    // 8-point Gauss-Legendre on each sub-chord.
    const GL_X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
    const GL_W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

    let threshold = psi.node_threshold(t);
    let log_derivative = |r: [f64; 2], dr: [f64; 2]| -> Result<Complex64> {
        let c = Configuration::from_raw(
            2,
            2,
            vec![cm[0] + r[0] / 2.0, cm[1] + r[1] / 2.0, cm[0] - r[0] / 2.0, cm[1] - r[1] / 2.0],
        );
        let (v, g) = psi.value_and_gradient(&c, t)?;
        if v.norm() < threshold {
            return Err(Error::Node { modulus: v.norm(), threshold });
        }
        // d/ds along r: dx1 = dr/2, dx2 = -dr/2
        let dpsi = (g[0] - g[2]) * (dr[0] / 2.0) + (g[1] - g[3]) * (dr[1] / 2.0);
        Ok(dpsi / v)
    };

    let mut log_ratio = Complex64::new(0.0, 0.0);
    for w in path.points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let na = a[0].hypot(a[1]);
        let nb = b[0].hypot(b[1]);
        if na == 0.0 || nb == 0.0 {
            return Err(Error::Node { modulus: 0.0, threshold });
        }
        let swept = (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]).abs();
        let chord = (b[0] - a[0]).hypot(b[1] - a[1]);
        let pieces = ((swept / EXCHANGE_ANGLE_STEP).ceil() as usize)
            .max((chord / (0.25 * na.min(nb))).ceil() as usize)
            .max(1);
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
                    log_ratio += wg * log_derivative(q, half)?;
                }
            }
        }
    }
    Ok(log_ratio.exp())
}

/// Probability density of detecting the N particles at the N given points
/// in any order: `sum_P |psi(Px, t)|^2`.
pub fn detection_probability_density(psi: &PilotWave, x: &Configuration, t: f64) -> Result<f64> {
    let n = x.particles();
    if n > MAX_PERMUTATION_N {
        return Err(Error::Capability(format!(
            "detection density sums N! terms; N={n} exceeds {MAX_PERMUTATION_N}"
        )));
    }
    let mut total = 0.0;
    for (images, _) in signed_permutations(n) {
        let p = Permutation::from_images_unchecked(images);
        total += psi.evaluate(&p.apply(x)?, t)?.norm_sqr();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunctions::SingleParticleState;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_images(v.to_vec()).unwrap()
    }

    #[test]
    fn construction_is_checked() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_images(vec![0, 2]).is_err());
        assert!(Permutation::from_one_based(&[2, 1]).is_ok());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
    }

    #[test]
    fn parity_examples() {
        assert_eq!(Permutation::identity(5).parity(), 1);
        assert_eq!(Permutation::transposition(4, 1, 3).unwrap().parity(), -1);
        // (1 2 3 4): three transpositions
        assert_eq!(p(&[1, 2, 3, 0]).parity(), -1);
        assert_eq!(p(&[1, 2, 0]).parity(), 1);
    }

    #[test]
    fn transposition_swaps_positions() {
        let x = Configuration::new(2, 1, vec![0.0, 1.0]).unwrap();
        let y = Permutation::transposition(2, 0, 1).unwrap().apply(&x).unwrap();
        assert_eq!(y.coords(), &[1.0, 0.0]);
        assert_eq!(Permutation::identity(2).apply(&x).unwrap(), x);
    }

    #[test]
    fn apply_follows_inverse_image_convention() {
        // P = (0->1, 1->2, 2->0): slot i receives particle P^{-1}(i)
        let x = Configuration::new(3, 1, vec![10.0, 20.0, 30.0]).unwrap();
        let y = p(&[1, 2, 0]).apply(&x).unwrap();
        assert_eq!(y.coords(), &[30.0, 10.0, 20.0]);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let x = Configuration::new(3, 1, vec![0.0; 3]).unwrap();
        assert!(Permutation::identity(2).apply(&x).is_err());
    }

    #[test]
    fn antisymmetrising_a_doubled_state_is_a_zero_function() {
        let phi = SingleParticleState::oscillator(&[0], 1.0, 1.0).unwrap();
        let w = PilotWave::product(vec![phi.clone(), phi]).unwrap();
        assert!(matches!(antisymmetrize(&w), Err(Error::ZeroFunction(_))));
        assert!(matches!(symmetrize(&w), Err(Error::Precondition(_))));
    }

    #[test]
    fn non_orthogonal_constituents_are_rejected() {
        let a = SingleParticleState::gaussian_packet(&[0.0], &[0.0], 1.0, 1.0).unwrap();
        let b = SingleParticleState::gaussian_packet(&[1.0], &[0.0], 1.0, 1.0).unwrap();
        let w = PilotWave::product(vec![a, b]).unwrap();
        assert!(matches!(antisymmetrize(&w), Err(Error::Precondition(_))));
    }

    #[test]
    fn symmetrising_one_particle_changes_nothing() {
        let phi = SingleParticleState::gaussian_packet(&[0.3], &[1.0], 0.9, 1.0).unwrap();
        let w = PilotWave::single(phi);
        let s = symmetrize(&w).unwrap();
        let x = Configuration::new(1, 1, vec![0.7]).unwrap();
        assert_eq!(s.evaluate(&x, 0.4).unwrap(), w.evaluate(&x, 0.4).unwrap());
    }

    #[test]
    fn two_fermion_oscillator_determinant() {
        let phi0 = SingleParticleState::oscillator(&[0], 1.0, 1.0).unwrap();
        let phi1 = SingleParticleState::oscillator(&[1], 1.0, 1.0).unwrap();
        let psi = antisymmetrize(&PilotWave::product(vec![phi0, phi1]).unwrap()).unwrap();
        let x = Configuration::new(2, 1, vec![0.5, -0.5]).unwrap();
        // phi0(x) = pi^{-1/4} e^{-x^2/2}, phi1(x) = pi^{-1/4} sqrt(2) x e^{-x^2/2}
        let g = std::f64::consts::PI.powf(-0.25) * (-0.125f64).exp();
        let (f0a, f1a) = (g, g * 2f64.sqrt() * 0.5);
        let (f0b, f1b) = (g, g * 2f64.sqrt() * -0.5);
        let expected = (f0a * f1b - f1a * f0b) / 2f64.sqrt();
        let v = psi.evaluate(&x, 0.0).unwrap();
        assert!((v.re - expected).abs() < 1e-15, "{v} vs {expected}");
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn anyon_exchange_needs_a_path() {
        let psi = PilotWave::anyon_pair(0.5, 0, 1.0, 1.0).unwrap();
        let x = Configuration::new(2, 2, vec![0.5, 0.0, -0.5, 0.0]).unwrap();
        let swap = Permutation::transposition(2, 0, 1).unwrap();
        assert!(matches!(exchange_phase(&psi, &x, 0.0, &swap, None), Err(Error::Parameter(_))));
        let bad = ExchangePath { points: vec![[0.0, 1.0], [-1.0, 0.0]] };
        assert!(exchange_phase(&psi, &x, 0.0, &swap, Some(&bad)).is_err());
    }

    #[test]
    fn exchange_at_a_node_is_an_error() {
        let phi0 = SingleParticleState::oscillator(&[0], 1.0, 1.0).unwrap();
        let phi1 = SingleParticleState::oscillator(&[1], 1.0, 1.0).unwrap();
        let psi = antisymmetrize(&PilotWave::product(vec![phi0, phi1]).unwrap()).unwrap();
        let x = Configuration::new(2, 1, vec![0.3, 0.3]).unwrap();
        let swap = Permutation::transposition(2, 0, 1).unwrap();
        assert!(matches!(exchange_phase(&psi, &x, 0.0, &swap, None), Err(Error::Node { .. })));
    }

    #[test]
    fn detection_density_caps_n() {
        let phi = SingleParticleState::oscillator(&[0], 1.0, 1.0).unwrap();
        let psi = PilotWave::product(vec![phi; 9]).unwrap();
        let x = Configuration::new(9, 1, vec![0.0; 9]).unwrap();
        assert!(matches!(detection_probability_density(&psi, &x, 0.0), Err(Error::Capability(_))));
    }
}
