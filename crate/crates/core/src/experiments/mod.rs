//! Scenario runner, invariant battery and model catalogue.

pub mod checks;
pub mod scenario;
pub mod svg;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::configspace::write_reduced_csv;
use crate::configuration::{distance, Configuration};
use crate::ensemble::{propagate_ensemble, sample_initial, EnsembleReport};
use crate::error::{Error, Result};
use crate::guidance::{circle, circulation, gauge_transform, velocity_field, PotentialTerm};
use crate::integrator::{integrate, round_trip, write_trajectory_csv, Termination, Trajectory};
use crate::wavefunctions::PilotWave;

pub use checks::{check_suite, CheckContext, CheckRegistry, CheckReport, CheckRow};
pub use scenario::{parse_scenario, prepare, InitialSpec, Prepared, Scenario, StateSpec};

/// Outcome of one monitor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorResult {
    pub monitor: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl MonitorResult {
    fn new(monitor: &str, passed: bool, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self { monitor: monitor.into(), passed, measured, threshold, detail: detail.into() }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub name: String,
    pub report: EnsembleReport,
    pub monitors: Vec<MonitorResult>,
    pub artifacts: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.monitors.iter().all(|m| m.passed)
    }

    pub fn failures(&self) -> Vec<&MonitorResult> {
        self.monitors.iter().filter(|m| !m.passed).collect()
    }

    /// Machine-readable failure list.
    pub fn failures_json(&self) -> String {
        serde_json::to_string_pretty(&serde_json::json!({
            "scenario": self.name,
            "failures": self.failures(),
        }))
        .expect("failures serialise")
    }
}

/// Reads, validates and runs a scenario file, writing artifacts to `out_dir`.
pub fn run_scenario(path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<RunOutcome> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let prepared = prepare(parse_scenario(&text)?, seed)?;
    run_prepared(&prepared, out_dir)
}

fn integrate_or_abort(p: &Prepared, psi: &PilotWave, x0: &Configuration, opts: &crate::integrator::IntegrateOptions) -> Result<Trajectory> {
    let (t0, t1) = (p.scenario.time.t0, p.scenario.time.t1);
    match integrate(psi, &p.species, &p.potential, x0, t0, t1, opts) {
        Err(Error::Node { .. }) => {
            let mut t = Trajectory::single(x0.clone(), t0);
            t.meta.termination = Termination::NodeAbort;
            Ok(t)
        }
        other => other,
    }
}

pub fn initial_configurations(p: &Prepared) -> Result<Vec<Configuration>> {
    match (&p.explicit, &p.scenario.initial) {
        (Some(v), _) => Ok(v.clone()),
        (None, InitialSpec::Sampled { count, .. }) => sample_initial(&p.psi, p.scenario.time.t0, *count, p.seed),
        (None, InitialSpec::Explicit { .. }) => unreachable!("explicit starts are prepared up front"),
    }
}

/// Runs a validated scenario.
pub fn run_prepared(p: &Prepared, out_dir: &Path) -> Result<RunOutcome> {
    let s = &p.scenario;
    let (t0, t1) = (s.time.t0, s.time.t1);
    let starts = initial_configurations(p)?;
    let (ensemble, report) = propagate_ensemble(
        &p.psi,
        &p.species,
        &p.potential,
        &starts,
        t0,
        t1,
        &p.options.clone().endpoints(),
        p.seed,
    )?;
    let written = s.outputs.trajectories.min(starts.len());
    let dense: Vec<Trajectory> = starts[..written]
        .par_iter()
        .map(|x| integrate_or_abort(p, &p.psi, x, &p.options))
        .collect::<Result<_>>()?;

    let monitors = evaluate_monitors(p, &starts, &ensemble, &report)?;

    fs::create_dir_all(out_dir).map_err(|e| io(out_dir, e))?;
    let mut artifacts = Vec::new();
    for (i, traj) in dense.iter().enumerate() {
        let path = out_dir.join(format!("{}_trajectory_{i:04}.csv", s.name));
        let f = fs::File::create(&path).map_err(|e| io(&path, e))?;
        write_trajectory_csv(traj, std::io::BufWriter::new(f)).map_err(|e| io(&path, e))?;
        artifacts.push(path);
        if s.outputs.reduced {
            let path = out_dir.join(format!("{}_reduced_{i:04}.csv", s.name));
            let f = fs::File::create(&path).map_err(|e| io(&path, e))?;
            write_reduced_csv(traj, std::io::BufWriter::new(f)).map_err(|e| io(&path, e))?;
            artifacts.push(path);
        }
    }
    let report_path = out_dir.join(format!("{}_report.json", s.name));
    fs::write(&report_path, report.to_json() + "\n").map_err(|e| io(&report_path, e))?;
    artifacts.push(report_path);
    let monitor_path = out_dir.join(format!("{}_monitors.json", s.name));
    let monitor_json = serde_json::to_string_pretty(&monitors).expect("monitors serialise");
    fs::write(&monitor_path, monitor_json + "\n").map_err(|e| io(&monitor_path, e))?;
    artifacts.push(monitor_path);
    if s.outputs.svg && !dense.is_empty() {
        let path = out_dir.join(format!("{}.svg", s.name));
        fs::write(&path, svg::trajectory_plot(&s.name, &dense)).map_err(|e| io(&path, e))?;
        artifacts.push(path);
    }
    Ok(RunOutcome { name: s.name.clone(), report, monitors, artifacts })
}

fn io(path: &Path, e: std::io::Error) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

/// Largest distance between initially coincident identical particles.
fn coincident_spread(traj: &Trajectory, p: &Prepared) -> Option<f64> {
    let x0 = &traj.start().x;
    let n = x0.particles();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| p.species.identical(i, j) && x0.position(i) == x0.position(j))
        .collect();
    if pairs.is_empty() {
        return None;
    }
    let mut worst: f64 = 0.0;
    for s in &traj.samples {
        for &(i, j) in &pairs {
            worst = worst.max(distance(s.x.position(i), s.x.position(j)));
        }
    }
    Some(worst)
}

fn evaluate_monitors(
    p: &Prepared,
    starts: &[Configuration],
    ensemble: &[Trajectory],
    report: &EnsembleReport,
) -> Result<Vec<MonitorResult>> {
    let m = &p.scenario.monitors;
    let (t0, t1) = (p.scenario.time.t0, p.scenario.time.t1);
    let tol = p.options.tol;
    let mut out = Vec::new();

    if let Some(md) = &m.min_distance {
        let measured = ensemble.iter().map(|t| t.meta.min_pair_distance).fold(f64::INFINITY, f64::min);
        out.push(MonitorResult::new(
            "min_distance",
            measured > md.above,
            measured,
            md.above,
            format!("smallest pair distance over {} trajectories", ensemble.len()),
        ));
    }
    if let Some(c) = &m.crossing {
        let crossed = ensemble.iter().filter(|t| t.meta.crossed).count();
        out.push(MonitorResult::new(
            "crossing",
            (crossed > 0) == c.expect,
            crossed as f64,
            if c.expect { 1.0 } else { 0.0 },
            format!("{crossed} of {} trajectories crossed (expected crossing: {})", ensemble.len(), c.expect),
        ));
    }
    if let Some(c) = &m.stays_coincident {
        let runs: Vec<Option<f64>> = starts
            .iter()
            .take(50)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|x| Ok(coincident_spread(&integrate_or_abort(p, &p.psi, x, &p.options)?, p)))
            .collect::<Result<_>>()?;
        let spreads: Vec<f64> = runs.into_iter().flatten().collect();
        let measured = spreads.iter().cloned().fold(0.0, f64::max);
        let passed = !spreads.is_empty() && measured <= c.within;
        let detail = if spreads.is_empty() {
            "no start has coincident identical particles".to_string()
        } else {
            format!("largest separation of initially coincident pairs over {} runs", spreads.len())
        };
        out.push(MonitorResult::new("stays_coincident", passed, measured, c.within, detail));
    }
    if let Some(rt) = &m.round_trip {
        let chosen: Vec<&Configuration> = starts.iter().take(rt.trajectories.max(1)).collect();
        let errors: Vec<Option<f64>> = chosen
            .par_iter()
            .map(|x| match round_trip(&p.psi, &p.species, &p.potential, x, t0, t1, &p.options.clone().endpoints()) {
                Ok((_, back, e)) if back.meta.termination == Termination::Completed => Ok(Some(e)),
                Ok(_) | Err(Error::Precondition(_)) | Err(Error::Node { .. }) => Ok(None),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;
        let failed = errors.iter().filter(|e| e.is_none()).count();
        let measured = errors.iter().flatten().cloned().fold(0.0, f64::max);
        let threshold = rt.factor * tol;
        out.push(MonitorResult::new(
            "round_trip",
            failed == 0 && measured <= threshold,
            measured,
            threshold,
            format!("{} round trips, {failed} did not complete", errors.len()),
        ));
    }
    if let (Some(pm), Some(perm)) = (&m.permutation_equivariance, &p.permutation) {
        let chosen: Vec<&Configuration> = starts.iter().take(pm.trajectories.max(1)).collect();
        let horizon = pm.expect_violation.as_ref().map(|v| (v.by_time - t0).abs()).unwrap_or(f64::INFINITY);
        let mismatches: Vec<f64> = chosen
            .par_iter()
            .map(|x| {
                let a = integrate_or_abort(p, &p.psi, x, &p.options)?;
                let b = integrate_or_abort(p, &p.psi, &perm.apply(x)?, &p.options)?;
                let mut worst: f64 = 0.0;
                for (sa, sb) in a.samples.iter().zip(&b.samples) {
                    if (sa.t - t0).abs() > horizon + 1e-12 {
                        break;
                    }
                    let moved = perm.apply(&sa.x)?;
                    worst = worst.max(moved.max_particle_distance(&sb.x));
                }
                if a.samples.len() != b.samples.len() || a.meta.termination != Termination::Completed {
                    worst = f64::INFINITY;
                }
                Ok(worst)
            })
            .collect::<Result<_>>()?;
        let measured = mismatches.iter().cloned().fold(0.0, f64::max);
        let result = match &pm.expect_violation {
            None => {
                let threshold = pm.factor * tol;
                MonitorResult::new(
                    "permutation_equivariance",
                    measured <= threshold,
                    measured,
                    threshold,
                    format!("largest mismatch between P(run from x0) and run from P x0 over {} starts", mismatches.len()),
                )
            }
            Some(v) => {
                let smallest = mismatches.iter().cloned().fold(f64::INFINITY, f64::min);
                MonitorResult::new(
                    "permutation_equivariance",
                    smallest > v.above,
                    smallest,
                    v.above,
                    format!("smallest mismatch up to t = {} over {} starts (violation expected)", v.by_time, mismatches.len()),
                )
            }
        };
        out.push(result);
    }
    if let Some(eq) = &m.equivariance {
        let result = match report.density_distance.as_slice() {
            [d0, d1] => MonitorResult::new(
                "equivariance",
                d1.value < eq.max_distance && d1.value <= d0.value + eq.max_increase,
                d1.value,
                eq.max_distance.min(d0.value + eq.max_increase),
                format!(
                    "L1 distance {:.4} (stderr {:.4}) at t = {}, {:.4} at t = {}",
                    d1.value, d1.stderr, d1.t, d0.value, d0.t
                ),
            ),
            _ => MonitorResult::new("equivariance", false, f64::NAN, eq.max_distance, "no density distances available"),
        };
        out.push(result);
    }
    if let Some(c) = &m.circulation {
        let a = p.psi.as_anyon_pair().expect("validated anyon state");
        let expected = 2.0 * PI * a.ell() / a.reduced_mass();
        let mut worst: f64 = 0.0;
        for &r in &c.radii {
            let got = circulation(&p.psi, &p.species, &p.potential, &circle([0.0, 0.0], r, c.segments), [0.0, 0.0], t0)?;
            worst = worst.max((got - expected).abs());
        }
        out.push(MonitorResult::new(
            "circulation",
            worst <= c.tol,
            worst,
            c.tol,
            format!("largest |circulation - 2 pi l / mu| over radii {:?}, expected {expected}", c.radii),
        ));
    }
    if let Some(c) = &m.flux_loop {
        let lines: Vec<(f64, [f64; 2])> = p
            .potential
            .terms
            .iter()
            .filter_map(|t| match t {
                PotentialTerm::FluxLine { flux, position } => Some((*flux, *position)),
                _ => None,
            })
            .collect();
        let mut worst: f64 = 0.0;
        for &(_, centre) in &lines {
            for &r in &c.radii {
                let enclosed: f64 = lines
                    .iter()
                    .filter(|(_, q)| (q[0] - centre[0]).hypot(q[1] - centre[1]) < r)
                    .map(|(f, _)| f)
                    .sum();
                let got = p.potential.loop_integral(&circle(centre, r, c.segments))?;
                worst = worst.max((got - enclosed).abs());
            }
        }
        out.push(MonitorResult::new("flux_loop", worst <= c.tol, worst, c.tol, "largest |loop integral of A - enclosed flux|"));
    }
    if let Some(g) = &m.gauge_invariance {
        let (psi2, a2) = gauge_transform(&p.psi, &p.species, &p.potential, &g.chi)?;
        let mut points: Vec<Configuration> = starts.iter().take(g.points).cloned().collect();
        if points.len() < g.points {
            let extra = sample_initial(&p.psi, t0, g.points - points.len(), p.seed.wrapping_add(1))?;
            points.extend(extra);
        }
        let mut worst: f64 = 0.0;
        let mut compared = 0;
        for x in &points {
            let (Ok(v), Ok(w)) = (
                velocity_field(&p.psi, &p.species, &p.potential, x, t0),
                velocity_field(&psi2, &p.species, &a2, x, t0),
            ) else {
                continue;
            };
            compared += 1;
            for (a, b) in v.iter().zip(&w) {
                worst = worst.max((a - b).abs());
            }
        }
        out.push(MonitorResult::new(
            "gauge_invariance",
            compared > 0 && worst <= g.tol,
            worst,
            g.tol,
            format!("largest velocity difference over {compared} configurations"),
        ));
    }
    if let Some(na) = &m.node_aborts {
        out.push(MonitorResult::new(
            "node_aborts",
            report.node_aborts <= na.max,
            report.node_aborts as f64,
            na.max as f64,
            "trajectories ended on a node",
        ));
    }
    Ok(out)
}

/// One entry of the state catalogue.
#[derive(Debug, Clone, Serialize)]
pub struct ModelInfo {
    pub name: &'static str,
    pub parameters: &'static [&'static str],
    pub symmetry: &'static [&'static str],
    pub description: &'static str,
}

pub fn catalogue() -> Vec<ModelInfo> {
    vec![
        ModelInfo {
            name: "gaussian",
            parameters: &["center", "momentum", "width", "mass"],
            symmetry: &["none"],
            description: "free Gaussian packet in d = 1..3",
        },
        ModelInfo {
            name: "oscillator",
            parameters: &["levels", "frequency", "mass"],
            symmetry: &["none"],
            description: "isotropic harmonic-oscillator eigenstate, one level per axis",
        },
        ModelInfo {
            name: "product",
            parameters: &["factors"],
            symmetry: &["none"],
            description: "labelled product of single-particle states",
        },
        ModelInfo {
            name: "symmetrize",
            parameters: &["orbitals"],
            symmetry: &["symmetric"],
            description: "normalised bosonic symmetrisation of a product",
        },
        ModelInfo {
            name: "antisymmetrize",
            parameters: &["orbitals"],
            symmetry: &["antisymmetric"],
            description: "normalised fermionic antisymmetrisation (Slater determinant)",
        },
        ModelInfo {
            name: "anyon_pair",
            parameters: &["nu", "k", "frequency", "mass"],
            symmetry: &["anyonic(nu)"],
            description: "two anyons in a planar harmonic trap, relative angular momentum nu + 2k",
        },
        ModelInfo {
            name: "superpose",
            parameters: &["terms[re, im, state]"],
            symmetry: &["inherited"],
            description: "normalised linear combination of states sharing N, d and symmetry",
        },
        ModelInfo {
            name: "gauge_transform",
            parameters: &["chi"],
            symmetry: &["inherited"],
            description: "gauge-dressed copy of a state with the compensating vector potential",
        },
        ModelInfo {
            name: "time_reversed",
            parameters: &["t_pivot"],
            symmetry: &["inherited, anyonic nu -> 2 - nu"],
            description: "complex-conjugated state with mirrored time",
        },
    ]
}

pub fn list_models_text() -> String {
    let mut s = String::new();
    for m in catalogue() {
        s.push_str(&format!(
            "{:<16} params: {:<32} symmetry: {:<24} {}\n",
            m.name,
            m.parameters.join(", "),
            m.symmetry.join(", "),
            m.description
        ));
    }
    s
}

pub fn list_models_json() -> String {
    serde_json::to_string_pretty(&catalogue()).expect("catalogue serialises")
}

/// Scenario files shipped with the library, as `(name, json)`.
pub fn bundled_scenarios() -> Vec<(&'static str, &'static str)> {
    vec![
        ("fermion_noncross", include_str!("../../scenarios/fermion_noncross.json")),
        ("boson_noncross", include_str!("../../scenarios/boson_noncross.json")),
        ("boson_coincident_forever", include_str!("../../scenarios/boson_coincident_forever.json")),
        ("anyon_circulation", include_str!("../../scenarios/anyon_circulation.json")),
        ("ab_gauge_invariance", include_str!("../../scenarios/ab_gauge_invariance.json")),
        ("equivariance_superposition", include_str!("../../scenarios/equivariance_superposition.json")),
        ("distinguishable_cross", include_str!("../../scenarios/distinguishable_cross.json")),
        ("time_reversal_roundtrip", include_str!("../../scenarios/time_reversal_roundtrip.json")),
        ("permutation_equivariance", include_str!("../../scenarios/permutation_equivariance.json")),
    ]
}

pub fn bundled_scenario(name: &str) -> Option<Scenario> {
    bundled_scenarios()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_scenario(text).expect("bundled scenarios parse"))
}
