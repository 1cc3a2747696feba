//! De Broglie-Bohm trajectories for systems of identical or distinguishable
//! particles: catalogue wavefunctions, exchange symmetry, the guidance
//! field, adaptive integration, reduced configuration space, ensembles and
//! scenario-driven experiments.

pub mod configspace;
pub mod configuration;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod guidance;
pub mod integrator;
pub mod permutations;
pub mod tolerances;
pub mod wavefunctions;

pub use configspace::{lift_trajectory, min_pairwise_distance, reduce_trajectory, reduced_representative, Lifts, ReducedPoint};
pub use configuration::Configuration;
pub use ensemble::{density_distance, propagate_ensemble, sample_initial, Binning, CoincidenceFraction, DensityDistance, EnsembleReport};
pub use error::{Error, Result};
pub use experiments::{
    bundled_scenario, bundled_scenarios, check_suite, list_models_json, list_models_text, run_prepared, run_scenario,
    CheckContext, CheckRegistry, CheckReport, MonitorResult, RunOutcome, Scenario,
};
pub use guidance::{
    circle, circulation, gauge_transform, make_flux_line, velocity_field, GaugeFunction, PotentialTerm, Species,
    SpeciesTable, Statistics, VectorPotential,
};
pub use integrator::{
    integrate, integrate_fixed_steps, min_distance_monitor, round_trip, time_reversed_wave, write_trajectory_csv,
    IntegrateOptions, Recording, Sample, Termination, Trajectory, TrajectoryMeta,
};
pub use num_complex::Complex64;
pub use permutations::{
    antisymmetrize, detection_probability_density, exchange_phase, symmetrize, ExchangePath, Permutation,
};
pub use wavefunctions::{AnyonPair, GaussianPacket, OscillatorEigenstate, PilotWave, SingleParticleState, SymmetryTag};
