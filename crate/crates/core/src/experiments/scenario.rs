//! Scenario files: a single JSON document describing one experiment.
//!
//! Physical parameters are always explicit. Only numerical knobs
//! (tolerance, cadence, output counts, monitor thresholds) have defaults.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::configuration::Configuration;
use crate::error::{Error, Result};
use crate::guidance::{GaugeFunction, PotentialTerm, Species, SpeciesTable, VectorPotential};
use crate::integrator::IntegrateOptions;
use crate::permutations::{antisymmetrize, symmetrize, Permutation};
use crate::tolerances::{DEFAULT_CADENCE, DEFAULT_TOL};
use crate::wavefunctions::{PilotWave, SingleParticleState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Gaussian { center: Vec<f64>, momentum: Vec<f64>, width: f64, mass: f64 },
    Oscillator { levels: Vec<i64>, frequency: f64, mass: f64 },
    Product { factors: Vec<StateSpec> },
    Symmetrize { orbitals: Vec<StateSpec> },
    Antisymmetrize { orbitals: Vec<StateSpec> },
    AnyonPair { nu: f64, k: i64, frequency: f64, mass: f64 },
    Superpose { terms: Vec<TermSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub state: StateSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Each configuration is a list of particle positions.
    Explicit { configurations: Vec<Vec<Vec<f64>>> },
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeWindow {
    pub t0: f64,
    pub t1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinDistanceMonitor {
    pub above: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingMonitor {
    pub expect: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoincidenceMonitor {
    pub within: f64,
}

fn default_round_trip_factor() -> f64 {
    1e3
}

fn default_checked() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundTripMonitor {
    #[serde(default = "default_round_trip_factor")]
    pub factor: f64,
    /// How many of the initial configurations to send there and back.
    #[serde(default = "default_checked")]
    pub trajectories: usize,
}

fn default_equivariance_factor() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedViolation {
    pub above: f64,
    pub by_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermutationMonitor {
    /// One-based images, `[2, 1]` swaps the two particles.
    pub permutation: Vec<usize>,
    #[serde(default = "default_equivariance_factor")]
    pub factor: f64,
    #[serde(default = "default_checked")]
    pub trajectories: usize,
    /// When set, the runs are expected to disagree by more than `above`
    /// at some sample no later than `by_time`.
    #[serde(default)]
    pub expect_violation: Option<ExpectedViolation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivarianceMonitor {
    pub max_distance: f64,
    pub max_increase: f64,
}

fn default_segments() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CirculationMonitor {
    pub radii: Vec<f64>,
    pub tol: f64,
    #[serde(default = "default_segments")]
    pub segments: usize,
}

fn default_points() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeMonitor {
    pub chi: GaugeFunction,
    pub tol: f64,
    /// Configurations at which the two velocity fields are compared.
    #[serde(default = "default_points")]
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeAbortMonitor {
    pub max: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monitors {
    #[serde(default)]
    pub min_distance: Option<MinDistanceMonitor>,
    #[serde(default)]
    pub crossing: Option<CrossingMonitor>,
    #[serde(default)]
    pub stays_coincident: Option<CoincidenceMonitor>,
    #[serde(default)]
    pub round_trip: Option<RoundTripMonitor>,
    #[serde(default)]
    pub permutation_equivariance: Option<PermutationMonitor>,
    #[serde(default)]
    pub equivariance: Option<EquivarianceMonitor>,
    #[serde(default)]
    pub circulation: Option<CirculationMonitor>,
    #[serde(default)]
    pub flux_loop: Option<CirculationMonitor>,
    #[serde(default)]
    pub gauge_invariance: Option<GaugeMonitor>,
    #[serde(default)]
    pub node_aborts: Option<NodeAbortMonitor>,
}

fn default_written() -> usize {
    10
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Number of trajectories written as CSV.
    #[serde(default = "default_written")]
    pub trajectories: usize,
    /// Also write canonicalised (reduced) trajectories.
    #[serde(default)]
    pub reduced: bool,
    #[serde(default = "yes")]
    pub svg: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self { trajectories: default_written(), reduced: false, svg: true }
    }
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_cadence() -> f64 {
    DEFAULT_CADENCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub state: StateSpec,
    pub species: Vec<Species>,
    pub potential: Vec<PotentialTerm>,
    pub initial: InitialSpec,
    pub time: TimeWindow,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    #[serde(default = "default_cadence")]
    pub cadence: f64,
    /// Keep exactly coincident identical corpuscles merged.
    #[serde(default)]
    pub merge_coincident: bool,
    /// Accept explicit starts on the coincidence set.
    #[serde(default = "yes")]
    pub allow_coincident_start: bool,
    #[serde(default)]
    pub monitors: Monitors,
    #[serde(default)]
    pub outputs: Outputs,
}

fn at(path: &str, e: Error) -> Error {
    let msg = match e {
        Error::Parameter(m) | Error::Precondition(m) | Error::ZeroFunction(m) | Error::Domain(m) | Error::Capability(m) | Error::Config(m) => m,
        other => other.to_string(),
    };
    Error::Config(format!("{path}: {msg}"))
}

fn invalid<T>(path: &str, msg: impl std::fmt::Display) -> Result<T> {
    Err(Error::Config(format!("{path}: {msg}")))
}

impl StateSpec {
    fn single(&self, path: &str) -> Result<SingleParticleState> {
        match self {
            Self::Gaussian { center, momentum, width, mass } => {
                SingleParticleState::gaussian_packet(center, momentum, *width, *mass).map_err(|e| at(path, e))
            }
            Self::Oscillator { levels, frequency, mass } => {
                SingleParticleState::oscillator(levels, *frequency, *mass).map_err(|e| at(path, e))
            }
            _ => invalid(path, "expected a single-particle state (gaussian or oscillator)"),
        }
    }

    fn orbitals(list: &[StateSpec], path: &str) -> Result<Vec<SingleParticleState>> {
        if list.is_empty() {
            return invalid(path, "needs at least one entry");
        }
        list.iter().enumerate().map(|(i, s)| s.single(&format!("{path}[{i}]"))).collect()
    }

    /// Builds the pilot wave; errors name the offending field.
    pub fn build(&self, path: &str) -> Result<PilotWave> {
        match self {
            Self::Gaussian { .. } | Self::Oscillator { .. } => Ok(PilotWave::single(self.single(path)?)),
            Self::Product { factors } => {
                let p = format!("{path}.factors");
                PilotWave::product(Self::orbitals(factors, &p)?).map_err(|e| at(&p, e))
            }
            Self::Symmetrize { orbitals } | Self::Antisymmetrize { orbitals } => {
                let p = format!("{path}.orbitals");
                let product = PilotWave::product(Self::orbitals(orbitals, &p)?).map_err(|e| at(&p, e))?;
                let built = if matches!(self, Self::Symmetrize { .. }) {
                    symmetrize(&product)
                } else {
                    antisymmetrize(&product)
                };
                built.map_err(|e| at(&p, e))
            }
            Self::AnyonPair { nu, k, frequency, mass } => {
                PilotWave::anyon_pair(*nu, *k, *frequency, *mass).map_err(|e| at(path, e))
            }
            Self::Superpose { terms } => {
                let p = format!("{path}.terms");
                if terms.is_empty() {
                    return invalid(&p, "needs at least one term");
                }
                let built = terms
                    .iter()
                    .enumerate()
                    .map(|(i, t)| Ok((Complex64::new(t.re, t.im), t.state.build(&format!("{p}[{i}].state"))?)))
                    .collect::<Result<Vec<_>>>()?;
                PilotWave::superpose(built).map_err(|e| at(&p, e))
            }
        }
    }
}

/// Everything a run needs, built and checked up front.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scenario: Scenario,
    pub psi: PilotWave,
    pub species: SpeciesTable,
    pub potential: VectorPotential,
    pub explicit: Option<Vec<Configuration>>,
    pub seed: u64,
    pub options: IntegrateOptions,
    pub permutation: Option<Permutation>,
}

/// Parses and validates scenario text. Syntax errors carry line and column.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("scenario: {e}")))
}

pub fn prepare(scenario: Scenario, seed_override: Option<u64>) -> Result<Prepared> {
    let s = &scenario;
    if s.name.is_empty() || !s.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return invalid("name", "must be non-empty and use only letters, digits, '_' or '-'");
    }
    let psi = s.state.build("state")?;
    let species = SpeciesTable::new(s.species.clone()).map_err(|e| at("species", e))?;
    species.check_compatible(&psi).map_err(|e| at("species", e))?;
    for (i, term) in s.potential.iter().enumerate() {
        if psi.dim() != 2 {
            return invalid(&format!("potential[{i}]"), "vector potentials are supported for d = 2 only");
        }
        if let PotentialTerm::FluxLine { flux, position } = term {
            if !flux.is_finite() || !position.iter().all(|v| v.is_finite()) {
                return invalid(&format!("potential[{i}]"), "flux and position must be finite");
            }
        }
    }
    let potential = VectorPotential { terms: s.potential.clone() };
    if !(s.time.t0.is_finite() && s.time.t1.is_finite()) {
        return invalid("time", "t0 and t1 must be finite");
    }
    if !(s.tolerance > 0.0 && s.tolerance < 1.0) {
        return invalid("tolerance", format!("must lie in (0, 1), got {}", s.tolerance));
    }
    if !(s.cadence > 0.0 && s.cadence.is_finite()) {
        return invalid("cadence", format!("must be positive, got {}", s.cadence));
    }

    let (n, d) = (psi.particles(), psi.dim());
    let (explicit, seed) = match &s.initial {
        InitialSpec::Explicit { configurations } => {
            if configurations.is_empty() {
                return invalid("initial.configurations", "needs at least one configuration");
            }
            let mut out = Vec::new();
            for (i, c) in configurations.iter().enumerate() {
                let path = format!("initial.configurations[{i}]");
                let x = Configuration::from_positions(c).map_err(|e| at(&path, e))?;
                if x.particles() != n || x.dim() != d {
                    return invalid(&path, format!("expected {n} particles in {d} dimensions"));
                }
                if !s.allow_coincident_start && n >= 2 && crate::configspace::min_pairwise_distance(&x)? == 0.0 {
                    return invalid(&path, "coincident start while allow_coincident_start is false");
                }
                out.push(x);
            }
            (Some(out), seed_override.unwrap_or(0))
        }
        InitialSpec::Sampled { count, seed } => {
            if *count == 0 {
                return invalid("initial.count", "must be at least 1");
            }
            (None, seed_override.unwrap_or(*seed))
        }
    };

    let m = &s.monitors;
    let positive = |path: &str, v: f64| if v > 0.0 && v.is_finite() { Ok(()) } else { invalid(path, format!("must be positive, got {v}")) };
    if let Some(x) = &m.min_distance {
        positive("monitors.min_distance.above", x.above)?;
    }
    if let Some(x) = &m.stays_coincident {
        positive("monitors.stays_coincident.within", x.within)?;
    }
    if let Some(x) = &m.round_trip {
        positive("monitors.round_trip.factor", x.factor)?;
    }
    let permutation = match &m.permutation_equivariance {
        Some(pm) => {
            positive("monitors.permutation_equivariance.factor", pm.factor)?;
            let p = Permutation::from_one_based(&pm.permutation)
                .map_err(|e| at("monitors.permutation_equivariance.permutation", e))?;
            if p.len() != n {
                return invalid("monitors.permutation_equivariance.permutation", format!("expected {n} entries"));
            }
            Some(p)
        }
        None => None,
    };
    if let Some(x) = &m.equivariance {
        positive("monitors.equivariance.max_distance", x.max_distance)?;
        positive("monitors.equivariance.max_increase", x.max_increase)?;
        if crate::ensemble::Binning::default_bins(n * d).is_none() {
            return invalid("monitors.equivariance", format!("histograms need N*d <= 3, got {}", n * d));
        }
    }
    if let Some(c) = &m.circulation {
        positive("monitors.circulation.tol", c.tol)?;
        if psi.as_anyon_pair().is_none() {
            return invalid("monitors.circulation", "needs an anyon_pair state");
        }
        for (i, r) in c.radii.iter().enumerate() {
            positive(&format!("monitors.circulation.radii[{i}]"), *r)?;
        }
    }
    if let Some(c) = &m.flux_loop {
        positive("monitors.flux_loop.tol", c.tol)?;
        if !s.potential.iter().any(|t| matches!(t, PotentialTerm::FluxLine { .. })) {
            return invalid("monitors.flux_loop", "needs a flux_line potential term");
        }
        for (i, r) in c.radii.iter().enumerate() {
            positive(&format!("monitors.flux_loop.radii[{i}]"), *r)?;
        }
    }
    if let Some(g) = &m.gauge_invariance {
        positive("monitors.gauge_invariance.tol", g.tol)?;
        crate::guidance::gauge_transform(&psi, &species, &potential, &g.chi)
            .map_err(|e| at("monitors.gauge_invariance.chi", e))?;
    }

    let options = IntegrateOptions {
        tol: s.tolerance,
        cadence: s.cadence,
        merge_coincident: s.merge_coincident,
        ..IntegrateOptions::default()
    };
    Ok(Prepared { scenario, psi, species, potential, explicit, seed, options, permutation })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "t",
        "state": {"kind": "gaussian", "center": [0], "momentum": [0], "width": 1, "mass": 1},
        "species": [{"mass": 1, "charge": 0, "statistics": {"kind": "boson"}}],
        "potential": [],
        "initial": {"mode": "explicit", "configurations": [[[1.0]]]},
        "time": {"t0": 0, "t1": 1}
    }"#;

    #[test]
    fn minimal_scenario_validates() {
        let p = prepare(parse_scenario(MINIMAL).unwrap(), None).unwrap();
        assert_eq!(p.psi.particles(), 1);
        assert_eq!(p.options.tol, DEFAULT_TOL);
    }

    #[test]
    fn missing_state_is_reported() {
        let text = MINIMAL.replace(r#""state": {"kind": "gaussian", "center": [0], "momentum": [0], "width": 1, "mass": 1},"#, "");
        let e = parse_scenario(&text).unwrap_err().to_string();
        assert!(e.contains("missing field `state`"), "{e}");
        assert!(e.contains("line"), "{e}");
    }

    #[test]
    fn bad_parameter_names_the_field() {
        let text = MINIMAL.replace(r#""width": 1"#, r#""width": -1"#);
        let e = prepare(parse_scenario(&text).unwrap(), None).unwrap_err().to_string();
        assert!(e.contains("state:"), "{e}");
    }

    #[test]
    fn wrong_particle_count_is_reported() {
        let text = MINIMAL.replace("[[[1.0]]]", "[[[1.0], [2.0]]]");
        let e = prepare(parse_scenario(&text).unwrap(), None).unwrap_err().to_string();
        assert!(e.contains("initial.configurations[0]"), "{e}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = MINIMAL.replace(r#""name": "t","#, r#""name": "t", "colour": 3,"#);
        assert!(parse_scenario(&text).is_err());
    }
}
