//! Analytic catalogue of pilot waves on configuration space.
//!
//! Every state exposes its exact value and exact gradient. Anyonic states
//! are multi-valued on the full configuration space: [`PilotWave::evaluate`]
//! returns the principal branch of the relative angle, while the gradient
//! (and hence `grad psi / psi`, which is all the guidance law consumes) is
//! single-valued.

mod anyon;
mod single;

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use anyon::AnyonPair;
pub use single::{GaussianPacket, OscillatorEigenstate, SingleParticleState};

use crate::configuration::Configuration;
use crate::error::{param, Error, Result};
use crate::guidance::GaugeFunction;
use crate::permutations::Permutation;
use crate::tolerances::{MAX_PERMUTATION_N, NODE_RELATIVE};


const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Global exchange behaviour of a state: `psi(Px) = e^{i gamma} psi(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymmetryTag {
    None,
    Symmetric,
    Antisymmetric,
    /// Exchange phase `exp(i pi nu)` for a counterclockwise exchange.
    Anyonic { nu: f64 },
}

impl fmt::Display for SymmetryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => write!(f, "none"),
            Self::Symmetric => write!(f, "symmetric"),
            Self::Antisymmetric => write!(f, "antisymmetric"),
            Self::Anyonic { nu } => write!(f, "anyonic(nu={nu})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PilotWave {
    n: usize,
    d: usize,
    tag: SymmetryTag,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Product(Vec<SingleParticleState>),
    Symmetrised(Symmetrised),
    AnyonPair(AnyonPair),
    Superposition { terms: Vec<(Complex64, PilotWave)>, inv_norm: f64 },
    Gauge { inner: Box<PilotWave>, charges: Vec<f64>, chi: GaugeFunction },
    TimeReversed { inner: Box<PilotWave>, pivot: f64 },
}

#[derive(Debug, Clone)]
struct Symmetrised {
    states: Vec<SingleParticleState>,
    /// +1 bosonic, -1 fermionic.
    sign: f64,
    /// `(N!)^{-1/2}`.
    norm: f64,
    /// Every permutation (as an image list) with its signed weight.
    terms: Arc<Vec<(Vec<usize>, f64)>>,
}

/// Every permutation of `0..n` paired with its parity.
pub(crate) fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    (0..n)
        .permutations(n)
        .map(|images| {
            let parity = Permutation::from_images_unchecked(images.clone()).parity() as f64;
            (images, parity)
        })
        .collect()
}

impl PilotWave {
    /// `psi(x_1..x_N, t) = prod_k phi_k(x_k, t)`.
    pub fn product(states: Vec<SingleParticleState>) -> Result<Self> {
        let Some(first) = states.first() else {
            return param("product of zero states");
        };
        let d = first.dim();
        if states.iter().any(|s| s.dim() != d) {
            return param("product constituents have mixed dimensions");
        }
        Ok(Self { n: states.len(), d, tag: SymmetryTag::None, kind: Kind::Product(states) })
    }

    pub fn single(state: SingleParticleState) -> Self {
        Self::product(vec![state]).expect("single state is a valid product")
    }

    pub fn anyon_pair(nu: f64, k: i64, frequency: f64, mass: f64) -> Result<Self> {
        let pair = AnyonPair::new(nu, k, frequency, mass)?;
        Ok(Self { n: 2, d: 2, tag: SymmetryTag::Anyonic { nu }, kind: Kind::AnyonPair(pair) })
    }

    /// Normalised linear combination. All terms must share N, d and symmetry.
    pub fn superpose(terms: Vec<(Complex64, PilotWave)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return param("superposition of zero terms");
        };
        let (n, d, tag) = (first.n, first.d, first.tag);
        for (c, w) in &terms {
            if w.n != n || w.d != d {
                return param("superposition terms have mismatched particle count or dimension");
            }
            if w.tag != tag {
                return param(format!(
                    "superposition terms have mismatched symmetry ({} vs {})",
                    tag, w.tag
                ));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return param("non-finite superposition coefficient");
            }
        }
        let mut norm2 = ZERO;
        for (ci, wi) in &terms {
            for (cj, wj) in &terms {
                norm2 += ci.conj() * cj * wi.overlap(wj)?;
            }
        }
        if !(norm2.re > 1e-24) {
            return Err(Error::ZeroFunction("superposition has zero norm".into()));
        }
        let inv_norm = 1.0 / norm2.re.sqrt();
        Ok(Self { n, d, tag, kind: Kind::Superposition { terms, inv_norm } })
    }

    pub(crate) fn symmetrised(states: Vec<SingleParticleState>, sign: f64) -> Result<Self> {
        let n = states.len();
        if n > MAX_PERMUTATION_N {
            return Err(Error::Capability(format!(
                "(anti)symmetrisation sums N! terms; N={n} exceeds {MAX_PERMUTATION_N}"
            )));
        }
        let d = states.first().map_or(0, SingleParticleState::dim);
        let factorial: f64 = (1..=n).map(|k| k as f64).product();
        let terms = signed_permutations(n)
            .into_iter()
            .map(|(p, parity)| {
                let w = if sign < 0.0 { parity } else { 1.0 };
                (p, w)
            })
            .collect();
        let tag = if sign < 0.0 { SymmetryTag::Antisymmetric } else { SymmetryTag::Symmetric };
        Ok(Self {
            n,
            d,
            tag,
            kind: Kind::Symmetrised(Symmetrised {
                states,
                sign,
                norm: factorial.sqrt().recip(),
                terms: Arc::new(terms),
            }),
        })
    }

    /// `psi' = psi * exp(i sum_k q_k chi(x_k))`.
    pub(crate) fn gauge_dressed(&self, charges: Vec<f64>, chi: GaugeFunction) -> Self {
        Self {
            n: self.n,
            d: self.d,
            tag: self.tag,
            kind: Kind::Gauge { inner: Box::new(self.clone()), charges, chi },
        }
    }

    /// `psi'(x, t) = conj(psi(x, 2 t_pivot - t))`.
    pub fn time_reversed(&self, pivot: f64) -> Self {
        let tag = match self.tag {
            SymmetryTag::Anyonic { nu } if nu != 0.0 => SymmetryTag::Anyonic { nu: 2.0 - nu },
            other => other,
        };
        Self { n: self.n, d: self.d, tag, kind: Kind::TimeReversed { inner: Box::new(self.clone()), pivot } }
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn symmetry(&self) -> SymmetryTag {
        self.tag
    }

    /// The plain product constituents, if this is an unsymmetrised product.
    pub fn product_states(&self) -> Option<&[SingleParticleState]> {
        match &self.kind {
            Kind::Product(s) => Some(s),
            _ => None,
        }
    }

    /// The anyon pair, if this state is one.
    pub fn as_anyon_pair(&self) -> Option<&AnyonPair> {
        match &self.kind {
            Kind::AnyonPair(a) => Some(a),
            _ => None,
        }
    }

    fn check_shape(&self, x: &Configuration) -> Result<()> {
        if x.particles() != self.n || x.dim() != self.d {
            return param(format!(
                "configuration has N={}, d={} but the state has N={}, d={}",
                x.particles(),
                x.dim(),
                self.n,
                self.d
            ));
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &Configuration, t: f64) -> Result<Complex64> {
        self.check_shape(x)?;
        self.value_at(x.coords(), t)
    }

    /// `grad_k psi` for every particle, flattened particle-major.
    pub fn gradient(&self, x: &Configuration, t: f64) -> Result<Vec<Complex64>> {
        Ok(self.value_and_gradient(x, t)?.1)
    }

    pub fn value_and_gradient(&self, x: &Configuration, t: f64) -> Result<(Complex64, Vec<Complex64>)> {
        self.check_shape(x)?;
        let mut grad = vec![ZERO; self.n * self.d];
        let v = self.eval_into(x.coords(), t, &mut grad)?;
        Ok((v, grad))
    }

    /// Upper-scale estimate of `max |psi(., t)|` used to define nodes.
    pub fn peak_estimate(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Product(states) => states.iter().map(|s| s.peak(t)).product(),
            Kind::Symmetrised(s) => s.norm * s.states.iter().map(|s| s.peak(t)).product::<f64>(),
            Kind::AnyonPair(a) => a.peak(),
            Kind::Superposition { terms, inv_norm } => {
                inv_norm * terms.iter().map(|(c, w)| c.norm() * w.peak_estimate(t)).sum::<f64>()
            }
            Kind::Gauge { inner, .. } => inner.peak_estimate(t),
            Kind::TimeReversed { inner, pivot } => inner.peak_estimate(2.0 * pivot - t),
        }
    }

    /// `|psi|` below this is a node.
    pub fn node_threshold(&self, t: f64) -> f64 {
        NODE_RELATIVE * self.peak_estimate(t)
    }

    pub fn is_node(&self, x: &Configuration, t: f64) -> Result<bool> {
        Ok(self.evaluate(x, t)?.norm() < self.node_threshold(t))
    }

    /// Characteristic single-particle length at time `t`.
    pub fn length_scale(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Product(states) | Kind::Symmetrised(Symmetrised { states, .. }) => {
                states.iter().map(|s| s.length_scale(t)).fold(0.0, f64::max)
            }
            Kind::AnyonPair(a) => a.length_scale(),
            Kind::Superposition { terms, .. } => {
                terms.iter().map(|(_, w)| w.length_scale(t)).fold(0.0, f64::max)
            }
            Kind::Gauge { inner, .. } => inner.length_scale(t),
            Kind::TimeReversed { inner, pivot } => inner.length_scale(2.0 * pivot - t),
        }
    }

    /// A configuration near the bulk of `|psi(., t)|^2`, flattened.
    pub fn centre_guess(&self, t: f64) -> Vec<f64> {
        match &self.kind {
            Kind::Product(states) | Kind::Symmetrised(Symmetrised { states, .. }) => {
                states.iter().flat_map(|s| s.centre(t)).collect()
            }
            Kind::AnyonPair(a) => {
                let half = a.length_scale() / 2.0;
                vec![half, 0.0, -half, 0.0]
            }
            Kind::Superposition { terms, .. } => terms[0].1.centre_guess(t),
            Kind::Gauge { inner, .. } => inner.centre_guess(t),
            Kind::TimeReversed { inner, pivot } => inner.centre_guess(2.0 * pivot - t),
        }
    }

    /// `<self|other>` at t = 0.
    pub fn overlap(&self, other: &PilotWave) -> Result<Complex64> {
        if self.n != other.n || self.d != other.d {
            return param("overlap of states with different shapes");
        }
        match (&self.kind, &other.kind) {
            (Kind::Superposition { terms, inv_norm }, _) => {
                let mut acc = ZERO;
                for (c, w) in terms {
                    acc += c.conj() * w.overlap(other)?;
                }
                Ok(acc * *inv_norm)
            }
            (_, Kind::Superposition { terms, inv_norm }) => {
                let mut acc = ZERO;
                for (c, w) in terms {
                    acc += c * self.overlap(w)?;
                }
                Ok(acc * *inv_norm)
            }
            (Kind::AnyonPair(a), Kind::AnyonPair(b)) => Ok(a.overlap(b)),
            (
                Kind::Gauge { inner: a, charges: qa, chi: ca },
                Kind::Gauge { inner: b, charges: qb, chi: cb },
            ) if qa == qb && ca == cb => a.overlap(b),
            _ => {
                let (Some(a), Some(b)) = (self.orbital_form(), other.orbital_form()) else {
                    return Err(Error::Capability(
                        "overlap is only available for product, symmetrised, anyon-pair and superposed states"
                            .into(),
                    ));
                };
                orbital_overlap(a, b)
            }
        }
    }

    pub fn norm_squared(&self) -> Result<f64> {
        Ok(self.overlap(self)?.re)
    }

    fn orbital_form(&self) -> Option<OrbitalForm<'_>> {
        match &self.kind {
            Kind::Product(states) => Some(OrbitalForm { states, sign: None }),
            Kind::Symmetrised(s) => Some(OrbitalForm { states: &s.states, sign: Some(s.sign) }),
            _ => None,
        }
    }

    fn value_at(&self, x: &[f64], t: f64) -> Result<Complex64> {
        // Gradients are cheap relative to the bookkeeping; share one code path.
        let mut scratch = vec![ZERO; x.len()];
        self.eval_into(x, t, &mut scratch)
    }

    fn eval_into(&self, x: &[f64], t: f64, grad: &mut [Complex64]) -> Result<Complex64> {
        let d = self.d;
        match &self.kind {
            Kind::Product(states) => {
                let n = states.len();
                let mut vals = Vec::with_capacity(n);
                let mut grads = Vec::with_capacity(n);
                for (k, s) in states.iter().enumerate() {
                    let (v, g) = s.value_and_gradient(&x[k * d..(k + 1) * d], t);
                    vals.push(v);
                    grads.push(g);
                }
                let (value, others) = products_except_each(&vals);
                for k in 0..n {
                    for a in 0..d {
                        grad[k * d + a] = grads[k][a] * others[k];
                    }
                }
                Ok(value)
            }
            Kind::Symmetrised(s) => Ok(s.eval_into(x, d, t, grad)),
            Kind::AnyonPair(a) => {
                let (v, g) = a.value_and_gradient(x, t)?;
                grad.copy_from_slice(&g);
                Ok(v)
            }
            Kind::Superposition { terms, inv_norm } => {
                grad.fill(ZERO);
                let mut scratch = vec![ZERO; grad.len()];
                let mut value = ZERO;
                for (c, w) in terms {
                    let v = w.eval_into(x, t, &mut scratch)?;
                    value += c * v;
                    for (g, s) in grad.iter_mut().zip(&scratch) {
                        *g += c * s;
                    }
                }
                for g in grad.iter_mut() {
                    *g *= *inv_norm;
                }
                Ok(value * *inv_norm)
            }
            Kind::Gauge { inner, charges, chi } => {
                let v = inner.eval_into(x, t, grad)?;
                let mut total_phase = 0.0;
                let mut dchi = [0.0; 3];
                for (k, q) in charges.iter().enumerate() {
                    let pos = &x[k * d..(k + 1) * d];
                    total_phase += q * chi.value(pos);
                    chi.gradient(pos, &mut dchi[..d])?;
                    for a in 0..d {
                        grad[k * d + a] += Complex64::new(0.0, q * dchi[a]) * v;
                    }
                }
                let phase = Complex64::from_polar(1.0, total_phase);
                for g in grad.iter_mut() {
                    *g *= phase;
                }
                Ok(v * phase)
            }
            Kind::TimeReversed { inner, pivot } => {
                let v = inner.eval_into(x, 2.0 * pivot - t, grad)?;
                for g in grad.iter_mut() {
                    *g = g.conj();
                }
                Ok(v.conj())
            }
        }
    }
}

impl Symmetrised {
    fn eval_into(&self, x: &[f64], d: usize, t: f64, grad: &mut [Complex64]) -> Complex64 {
        let n = self.states.len();
        // table[k][i] = phi_k(x_i)
        let mut vals = vec![ZERO; n * n];
        let mut grads = vec![[ZERO; 3]; n * n];
        for (k, s) in self.states.iter().enumerate() {
            for i in 0..n {
                let (v, g) = s.value_and_gradient(&x[i * d..(i + 1) * d], t);
                vals[k * n + i] = v;
                grads[k * n + i] = g;
            }
        }
        grad.fill(ZERO);
        let mut value = ZERO;
        let mut factors = vec![ZERO; n];
        for (sigma, weight) in self.terms.iter() {
            for k in 0..n {
                factors[k] = vals[k * n + sigma[k]];
            }
            let (term, others) = products_except_each(&factors);
            value += *weight * term;
            for k in 0..n {
                let i = sigma[k];
                let g = &grads[k * n + i];
                let w = *weight * others[k];
                for a in 0..d {
                    grad[i * d + a] += g[a] * w;
                }
            }
        }
        for g in grad.iter_mut() {
            *g *= self.norm;
        }
        value * self.norm
    }
}

/// Product of all entries and, for each entry, the product of all others.
fn products_except_each(v: &[Complex64]) -> (Complex64, Vec<Complex64>) {
    let n = v.len();
    let mut prefix = vec![ONE; n + 1];
    for k in 0..n {
        prefix[k + 1] = prefix[k] * v[k];
    }
    let mut others = vec![ONE; n];
    let mut suffix = ONE;
    for k in (0..n).rev() {
        others[k] = prefix[k] * suffix;
        suffix *= v[k];
    }
    (prefix[n], others)
}

struct OrbitalForm<'a> {
    states: &'a [SingleParticleState],
    /// `None` for a plain product, `Some(+-1)` for a normalised (anti)symmetrisation.
    sign: Option<f64>,
}

/// Single-particle overlap matrix `M[k][l] = <a_k|b_l>`.
pub(crate) fn overlap_matrix(a: &[SingleParticleState], b: &[SingleParticleState]) -> Result<Vec<Vec<Complex64>>> {
    a.iter()
        .map(|sa| b.iter().map(|sb| sa.overlap(sb)).collect())
        .collect()
}

/// `sum_rho s(rho) prod_i M[i][rho(i)]` with `s = sign^parity`.
fn signed_permanent(m: &[Vec<Complex64>], sign: f64) -> Complex64 {
    let n = m.len();
    signed_permutations(n)
        .iter()
        .map(|(rho, parity)| {
            let w = if sign < 0.0 { *parity } else { 1.0 };
            w * (0..n).map(|i| m[i][rho[i]]).product::<Complex64>()
        })
        .sum()
}

fn orbital_overlap(a: OrbitalForm<'_>, b: OrbitalForm<'_>) -> Result<Complex64> {
    let n = a.states.len();
    let m = overlap_matrix(a.states, b.states)?;
    let inv_sqrt_fact = (1..=n).map(|k| k as f64).product::<f64>().sqrt().recip();
    Ok(match (a.sign, b.sign) {
        (None, None) => (0..n).map(|i| m[i][i]).product(),
        (None, Some(s)) | (Some(s), None) => inv_sqrt_fact * signed_permanent(&m, s),
        (Some(sa), Some(sb)) if sa == sb => signed_permanent(&m, sa),
        // bosonic and fermionic sectors are orthogonal for N >= 2
        (Some(_), Some(_)) => {
            if n == 1 {
                m[0][0]
            } else {
                ZERO
            }
        }
    })
}
