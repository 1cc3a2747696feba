//! Numerical thresholds shared by the library, the check battery and the
//! acceptance tests. Every magic number that decides pass/fail lives here.

/// A configuration is a node when `|psi| < NODE_RELATIVE * peak(psi)`.
pub const NODE_RELATIVE: f64 = 1e-12;

/// Two corpuscles closer than this are treated as occupying the same point.
pub const COINCIDENCE_THRESHOLD: f64 = 1e-8;

/// Below this pair distance the integrator caps its step by the closing speed.
pub const NEAR_COINCIDENCE: f64 = 1e-6;

/// Default local error tolerance of the trajectory integrator.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default dense-output cadence (samples per unit time).
pub const DEFAULT_CADENCE: f64 = 200.0;

/// Step-size underflow, relative to the integration span.
pub const STEP_UNDERFLOW_RELATIVE: f64 = 1e-14;

/// Step controller constants.
pub const STEP_SAFETY: f64 = 0.9;
pub const STEP_MAX_RATIO: f64 = 5.0;
pub const STEP_MIN_RATIO: f64 = 0.2;

/// Orthonormality of constituents accepted by (anti)symmetrisation.
pub const ORTHONORMAL_TOL: f64 = 1e-6;

/// Per-axis quadrature used for overlaps and normalisation.
pub const QUADRATURE_POINTS: usize = 1 << 10;
pub const QUADRATURE_HALF_WIDTH: f64 = 12.0;

/// Largest N for which sums over all N! permutations are evaluated.
pub const MAX_PERMUTATION_N: usize = 8;

/// Largest N for which reduced trajectories are lifted to all N! curves.
pub const MAX_LIFT_N: usize = 6;

/// Angle cap per sub-step when continuing a phase along an exchange path.
pub const EXCHANGE_ANGLE_STEP: f64 = std::f64::consts::PI / 16.0;

/// Metropolis sampler settings.
pub const METROPOLIS_BURN_IN: usize = 1000;
pub const METROPOLIS_THIN: usize = 10;

/// Minimum |psi|^2 mass a histogram binning must cover.
pub const BINNING_COVERAGE: f64 = 0.999;

/// Coincidence-approach radii reported by ensembles.
pub const COINCIDENCE_EPSILONS: [f64; 3] = [1e-1, 1e-2, 1e-3];

// Check-battery thresholds.

pub const GRADIENT_FD_STEP: f64 = 1e-5;
pub const GRADIENT_FD_RELATIVE: f64 = 1e-6;
pub const EXCHANGE_PHASE_TOL: f64 = 1e-12;
pub const ANYON_EXCHANGE_TOL: f64 = 1e-8;
pub const GAUGE_INVARIANCE_TOL: f64 = 1e-10;
pub const PERMUTATION_VELOCITY_TOL: f64 = 1e-12;
pub const CIRCULATION_TOL: f64 = 1e-6;
pub const FLUX_LOOP_TOL: f64 = 1e-8;
pub const DIAGONAL_TOL: f64 = 1e-9;
pub const EQUIVARIANCE_MAX_DISTANCE: f64 = 0.05;
pub const EQUIVARIANCE_MAX_INCREASE: f64 = 0.03;
/// Trajectory equivariance under relabelling, in units of the integrator tolerance.
pub const TRAJECTORY_EQUIVARIANCE_FACTOR: f64 = 10.0;
/// Time-reversal round trip, in units of the integrator tolerance.
pub const ROUND_TRIP_FACTOR: f64 = 1e3;
/// Mismatch that counts as a broken relabelling symmetry (distinguishable particles).
pub const DISTINGUISHABLE_MISMATCH: f64 = 1e-2;
