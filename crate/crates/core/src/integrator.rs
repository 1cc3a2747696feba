//! Trajectory integration of `dX/dt = v(X, t)`.
//!
//! Embedded Dormand-Prince 5(4) pair with a PI step controller and the
//! standard fourth-order continuous extension for dense output. Steps that
//! would evaluate the field on a node are retried with a smaller step; a
//! step point on a node ends the trajectory with [`Termination::NodeAbort`].

use std::io::Write;

use serde::Serialize;

use crate::configspace::min_pairwise_distance_flat;
use crate::configuration::{distance, Configuration};
use crate::error::{param, Error, Result};
use crate::guidance::{velocity_and_modulus, SpeciesTable, VectorPotential};
use crate::tolerances::{
    COINCIDENCE_THRESHOLD, DEFAULT_CADENCE, DEFAULT_TOL, NEAR_COINCIDENCE, STEP_MAX_RATIO, STEP_MIN_RATIO,
    STEP_SAFETY, STEP_UNDERFLOW_RELATIVE,
};
use crate::wavefunctions::PilotWave;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    NodeAbort,
    /// The step size fell below `1e-14 |t1 - t0|`, or the step budget ran out.
    StepUnderflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recording {
    /// Samples at the output cadence plus both endpoints.
    Dense,
    /// Only the start and the end point; monitors still see the dense grid.
    Endpoints,
}

#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    pub tol: f64,
    /// Output samples per unit time.
    pub cadence: f64,
    pub recording: Recording,
    /// Keep initially coincident identical corpuscles exactly together by
    /// replacing each coincident group with its mean after every step.
    pub merge_coincident: bool,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            cadence: DEFAULT_CADENCE,
            recording: Recording::Dense,
            merge_coincident: false,
            max_steps: 5_000_000,
        }
    }
}

impl IntegrateOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn endpoints(mut self) -> Self {
        self.recording = Recording::Endpoints;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: Configuration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub evaluations: usize,
    pub min_abs_psi: f64,
    /// Smallest pair distance seen on step points and the dense grid.
    pub min_pair_distance: f64,
    /// Two initially separated corpuscles met: they came within the
    /// coincidence threshold, or (d = 1) changed order.
    pub crossed: bool,
    pub termination: Termination,
}

/// Time-ordered samples in the direction of integration (times decrease
/// for backward runs).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub(crate) fn single(x: Configuration, t: f64) -> Self {
        Trajectory {
            samples: vec![Sample { t, x }],
            meta: TrajectoryMeta {
                accepted_steps: 0,
                rejected_steps: 0,
                evaluations: 0,
                min_abs_psi: f64::NAN,
                min_pair_distance: f64::INFINITY,
                crossed: false,
                termination: Termination::Completed,
            },
        }
    }

    pub fn start(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn end(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn particles(&self) -> usize {
        self.start().x.particles()
    }

    pub fn dim(&self) -> usize {
        self.start().x.dim()
    }

    /// Position at time `t`, interpolated between stored samples with a
    /// cubic through the four nearest samples.
    pub fn interpolate(&self, t: f64) -> Configuration {
        let s = &self.samples;
        if s.len() == 1 {
            return s[0].x.clone();
        }
        let ascending = s[s.len() - 1].t > s[0].t;
        let key = |i: usize| if ascending { s[i].t } else { -s[i].t };
        let tk = if ascending { t } else { -t };
        let idx = (0..s.len()).rposition(|i| key(i) <= tk).unwrap_or(0).min(s.len() - 2);
        let lo = idx.saturating_sub(1);
        let hi = (lo + 4).min(s.len());
        let lo = hi.saturating_sub(4);
        let nodes: Vec<usize> = (lo..hi).collect();
        let mut out = vec![0.0; s[0].x.coords().len()];
        for &i in &nodes {
            let mut w = 1.0;
            for &j in &nodes {
                if i != j {
                    w *= (t - s[j].t) / (s[i].t - s[j].t);
                }
            }
            for (o, c) in out.iter_mut().zip(s[i].x.coords()) {
                *o += w * c;
            }
        }
        s[0].x.with_coords_unchecked(out)
    }
}

/// Writes `t,particle,axis,value` rows, 17 significant digits per number.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut out: W) -> std::io::Result<()> {
    write_trajectory_rows(traj, &mut out)
}

pub(crate) fn write_trajectory_rows<W: Write>(traj: &Trajectory, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "t,particle,axis,value")?;
    let d = traj.dim();
    for s in &traj.samples {
        for (i, v) in s.x.coords().iter().enumerate() {
            writeln!(out, "{:.16e},{},{},{:.16e}", s.t, i / d, i % d, v)?;
        }
    }
    Ok(())
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller exponents.
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;

struct Field<'a> {
    psi: &'a PilotWave,
    species: &'a SpeciesTable,
    potential: &'a VectorPotential,
    n: usize,
    d: usize,
    evaluations: usize,
}

impl Field<'_> {
    fn eval(&mut self, t: f64, y: &[f64]) -> Result<(Vec<f64>, f64)> {
        self.evaluations += 1;
        let x = Configuration::from_raw(self.n, self.d, y.to_vec());
        velocity_and_modulus(self.psi, self.species, self.potential, &x, t)
    }
}

fn axpy(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        let hc = h * c;
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += hc * ki;
        }
    }
    out
}

struct Monitor {
    n: usize,
    d: usize,
    min_pair: f64,
    crossed: bool,
    previous: Vec<f64>,
    initially_apart: Vec<bool>,
}

impl Monitor {
    fn new(n: usize, d: usize, y0: &[f64]) -> Self {
        let mut apart = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                apart.push(distance(&y0[i * d..(i + 1) * d], &y0[j * d..(j + 1) * d]) >= COINCIDENCE_THRESHOLD);
            }
        }
        Self {
            n,
            d,
            min_pair: min_pairwise_distance_flat(y0, n, d),
            crossed: false,
            previous: y0.to_vec(),
            initially_apart: apart,
        }
    }

    fn observe(&mut self, y: &[f64]) {
        let (n, d) = (self.n, self.d);
        let mut pair = 0;
        for i in 0..n {
            for j in i + 1..n {
                let dist = distance(&y[i * d..(i + 1) * d], &y[j * d..(j + 1) * d]);
                self.min_pair = self.min_pair.min(dist);
                if self.initially_apart[pair] {
                    if dist < COINCIDENCE_THRESHOLD {
                        self.crossed = true;
                    }
                    if d == 1 && (self.previous[i] - self.previous[j]) * (y[i] - y[j]) < 0.0 {
                        self.crossed = true;
                    }
                }
                pair += 1;
            }
        }
        self.previous.copy_from_slice(y);
    }
}

/// Groups of identical particles sitting exactly on top of each other.
fn coincident_groups(x: &Configuration, species: &SpeciesTable) -> Vec<Vec<usize>> {
    let n = x.particles();
    let mut assigned = vec![false; n];
    let mut groups = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let mut g = vec![i];
        for j in i + 1..n {
            if !assigned[j] && species.identical(i, j) && x.position(i) == x.position(j) {
                g.push(j);
                assigned[j] = true;
            }
        }
        if g.len() > 1 {
            groups.push(g);
        }
    }
    groups
}

fn merge_groups(y: &mut [f64], d: usize, groups: &[Vec<usize>]) {
    for g in groups {
        for a in 0..d {
            let mean = g.iter().map(|&k| y[k * d + a]).sum::<f64>() / g.len() as f64;
            for &k in g {
                y[k * d + a] = mean;
            }
        }
    }
}

/// Largest step that keeps the closest approaching pair from closing more
/// than half its gap, applied only below the near-coincidence distance.
fn coincidence_cap(y: &[f64], v: &[f64], n: usize, d: usize) -> f64 {
    let mut cap = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let dx: Vec<f64> = (0..d).map(|a| y[i * d + a] - y[j * d + a]).collect();
            let dist = dx.iter().map(|c| c * c).sum::<f64>().sqrt();
            if dist > 0.0 && dist < NEAR_COINCIDENCE {
                let closing = -(0..d).map(|a| dx[a] * (v[i * d + a] - v[j * d + a])).sum::<f64>() / dist;
                if closing > 0.0 {
                    cap = cap.min(0.5 * dist / closing);
                }
            }
        }
    }
    cap
}

/// Integrates the guidance equation from `(x0, t0)` to `t1` (either direction).
pub fn integrate(
    psi: &PilotWave,
    species: &SpeciesTable,
    potential: &VectorPotential,
    x0: &Configuration,
    t0: f64,
    t1: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    species.check_compatible(psi)?;
    if x0.particles() != psi.particles() || x0.dim() != psi.dim() {
        return param("initial configuration does not match the state");
    }
    if !(opts.tol > 0.0) || !(opts.cadence > 0.0) {
        return param("tolerance and cadence must be positive");
    }
    if !(t0.is_finite() && t1.is_finite()) {
        return param("integration window must be finite");
    }
    let (n, d) = (x0.particles(), x0.dim());
    let mut field = Field { psi, species, potential, n, d, evaluations: 0 };
    let (mut f, modulus0) = field.eval(t0, x0.coords())?;
    let groups = if opts.merge_coincident { coincident_groups(x0, species) } else { Vec::new() };

    let mut meta = TrajectoryMeta {
        accepted_steps: 0,
        rejected_steps: 0,
        evaluations: 0,
        min_abs_psi: modulus0,
        min_pair_distance: f64::INFINITY,
        crossed: false,
        termination: Termination::Completed,
    };
    let mut samples = vec![Sample { t: t0, x: x0.clone() }];
    let mut monitor = Monitor::new(n, d, x0.coords());

    let span = (t1 - t0).abs();
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = x0.coords().to_vec();
    let tol = opts.tol;
    let scale = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter().zip(b).map(|(u, v)| tol + tol * u.abs().max(v.abs())).collect()
    };
    let rms = |e: &[f64], sc: &[f64]| -> f64 {
        (e.iter().zip(sc).map(|(a, s)| (a / s) * (a / s)).sum::<f64>() / e.len() as f64).sqrt()
    };

    let mut h = if span > 0.0 { initial_step(&mut field, t, &y, &f, dir, span, tol) } else { 0.0 };
    let mut err_old: f64 = 1e-4;
    let mut last_rejected = false;
    let mut next_grid = 1usize;
    let grid_time = |j: usize| t0 + dir * j as f64 / opts.cadence;
    let t_end_guard = 1e-12 * span.max(1.0);

    while span > 0.0 && dir * (t1 - t) > 0.0 {
        if meta.accepted_steps + meta.rejected_steps >= opts.max_steps || h < STEP_UNDERFLOW_RELATIVE * span {
            meta.termination = Termination::StepUnderflow;
            break;
        }
        let remaining = (t1 - t).abs();
        let mut hh = h.min(remaining);
        hh = hh.min(coincidence_cap(&y, &f, n, d));
        if hh < STEP_UNDERFLOW_RELATIVE * span {
            meta.termination = Termination::StepUnderflow;
            break;
        }
        let last = hh >= remaining;
        let hs = dir * hh;

        let stages = (|| -> Result<_> {
            let k1 = &f;
            let y2 = axpy(&y, hs, &[(A21, k1)]);
            let (k2, _) = field.eval(t + C2 * hs, &y2)?;
            let y3 = axpy(&y, hs, &[(A31, k1), (A32, &k2)]);
            let (k3, _) = field.eval(t + C3 * hs, &y3)?;
            let y4 = axpy(&y, hs, &[(A41, k1), (A42, &k2), (A43, &k3)]);
            let (k4, _) = field.eval(t + C4 * hs, &y4)?;
            let y5 = axpy(&y, hs, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            let (k5, _) = field.eval(t + C5 * hs, &y5)?;
            let y6 = axpy(&y, hs, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
            let (k6, _) = field.eval(t + hs, &y6)?;
            let ynew = axpy(&y, hs, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            Ok((k3, k4, k5, k6, ynew))
        })();
        let (k3, k4, k5, k6, ynew) = match stages {
            Ok(s) => s,
            Err(Error::Node { .. }) | Err(Error::Domain(_)) => {
                meta.rejected_steps += 1;
                h = hh * 0.25;
                last_rejected = true;
                continue;
            }
            Err(e) => return Err(e),
        };
        let t_new = if last { t1 } else { t + hs };
        let (k7, modulus) = match field.eval(t_new, &ynew) {
            Ok(r) => r,
            Err(Error::Node { modulus, .. }) => {
                // Step point on a node: the phase is undefined from here on.
                meta.min_abs_psi = meta.min_abs_psi.min(modulus);
                monitor.observe(&ynew);
                t = t_new;
                y = ynew;
                meta.accepted_steps += 1;
                meta.termination = Termination::NodeAbort;
                break;
            }
            Err(Error::Domain(_)) => {
                meta.rejected_steps += 1;
                h = hh * 0.25;
                last_rejected = true;
                continue;
            }
            Err(e) => return Err(e),
        };
        let e = axpy(&vec![0.0; y.len()], hs, &[(E1, &f), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
        let err = rms(&e, &scale(&y, &ynew));

        if err <= 1.0 {
            // Dense output over the accepted step.
            let dy: Vec<f64> = ynew.iter().zip(&y).map(|(a, b)| a - b).collect();
            let r3: Vec<f64> = (0..y.len()).map(|i| hs * f[i] - dy[i]).collect();
            let r4: Vec<f64> = (0..y.len()).map(|i| dy[i] - hs * k7[i] - r3[i]).collect();
            let r5 = axpy(&vec![0.0; y.len()], hs, &[(D1, &f), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)]);
            loop {
                let tg = grid_time(next_grid);
                if dir * (tg - t_new) > 0.0 || dir * (t1 - tg) <= t_end_guard {
                    break;
                }
                let theta = (tg - t) / hs;
                let th1 = 1.0 - theta;
                let yg: Vec<f64> = (0..y.len())
                    .map(|i| y[i] + theta * (dy[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i]))))
                    .collect();
                monitor.observe(&yg);
                if opts.recording == Recording::Dense {
                    samples.push(Sample { t: tg, x: Configuration::from_raw(n, d, yg) });
                }
                next_grid += 1;
            }

            t = t_new;
            y = ynew;
            if !groups.is_empty() {
                merge_groups(&mut y, d, &groups);
            }
            f = k7;
            meta.accepted_steps += 1;
            meta.min_abs_psi = meta.min_abs_psi.min(modulus);
            monitor.observe(&y);

            let fac11 = err.max(1e-300).powf(EXPO1);
            let mut fac = fac11 / err_old.powf(BETA);
            fac = (fac / STEP_SAFETY).clamp(1.0 / STEP_MAX_RATIO, 1.0 / STEP_MIN_RATIO);
            let mut h_new = hh / fac;
            if last_rejected {
                h_new = h_new.min(hh);
            }
            err_old = err.max(1e-4);
            last_rejected = false;
            h = h_new;
        } else {
            meta.rejected_steps += 1;
            let fac11 = if err.is_finite() { err.powf(EXPO1) } else { 1.0 / STEP_MIN_RATIO };
            h = hh / (fac11 / STEP_SAFETY).min(1.0 / STEP_MIN_RATIO);
            last_rejected = true;
        }
    }

    if samples.last().map(|s| s.t) != Some(t) {
        samples.push(Sample { t, x: Configuration::from_raw(n, d, y) });
    }
    meta.evaluations = field.evaluations;
    meta.min_pair_distance = monitor.min_pair;
    meta.crossed = monitor.crossed;
    Ok(Trajectory { samples, meta })
}

fn initial_step(field: &mut Field<'_>, t: f64, y: &[f64], f: &[f64], dir: f64, span: f64, tol: f64) -> f64 {
    let sc: Vec<f64> = y.iter().map(|v| tol + tol * v.abs()).collect();
    let norm = |v: &[f64]| (v.iter().zip(&sc).map(|(a, s)| (a / s) * (a / s)).sum::<f64>() / v.len() as f64).sqrt();
    let d0 = norm(y);
    let d1 = norm(f);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(span);
    let y1: Vec<f64> = y.iter().zip(f).map(|(a, b)| a + dir * h0 * b).collect();
    let d2 = match field.eval(t + dir * h0, &y1) {
        Ok((f1, _)) => {
            let diff: Vec<f64> = f1.iter().zip(f).map(|(a, b)| a - b).collect();
            norm(&diff) / h0
        }
        Err(_) => return h0.min(1e-6 * span.max(1.0)),
    };
    let m = d1.max(d2);
    let h1 = if m <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / m).powf(0.2) };
    (100.0 * h0).min(h1).min(span)
}

/// Fixed-step integration with the fifth-order Dormand-Prince formula and no
/// error control. Used for convergence-order diagnostics.
pub fn integrate_fixed_steps(
    psi: &PilotWave,
    species: &SpeciesTable,
    potential: &VectorPotential,
    x0: &Configuration,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<Configuration> {
    species.check_compatible(psi)?;
    if steps == 0 {
        return param("need at least one step");
    }
    let (n, d) = (x0.particles(), x0.dim());
    let mut field = Field { psi, species, potential, n, d, evaluations: 0 };
    let hs = (t1 - t0) / steps as f64;
    let mut y = x0.coords().to_vec();
    for s in 0..steps {
        let t = t0 + s as f64 * hs;
        let (k1, _) = field.eval(t, &y)?;
        let (k2, _) = field.eval(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
        let (k3, _) = field.eval(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let (k4, _) = field.eval(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let (k5, _) = field.eval(t + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let (k6, _) = field.eval(t + hs, &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        y = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    }
    Ok(Configuration::from_raw(n, d, y))
}

/// `psi'(x, t) = conj(psi(x, 2 t_pivot - t))`; its velocity field at `(x, t)`
/// is `-v(x, 2 t_pivot - t)` (pair it with [`VectorPotential::reversed`]).
pub fn time_reversed_wave(psi: &PilotWave, t_pivot: f64) -> PilotWave {
    psi.time_reversed(t_pivot)
}

/// Forward run `t0 -> t1`, then the reversed wave from the endpoint over the
/// mirrored interval. Returns both runs and the distance of the return
/// point from `x0` (largest single-particle displacement).
pub fn round_trip(
    psi: &PilotWave,
    species: &SpeciesTable,
    potential: &VectorPotential,
    x0: &Configuration,
    t0: f64,
    t1: f64,
    opts: &IntegrateOptions,
) -> Result<(Trajectory, Trajectory, f64)> {
    let forward = integrate(psi, species, potential, x0, t0, t1, opts)?;
    if forward.meta.termination != Termination::Completed {
        return Err(Error::Precondition(format!(
            "forward run ended with {:?}; no round trip",
            forward.meta.termination
        )));
    }
    let reversed = time_reversed_wave(psi, t1);
    let back = integrate(&reversed, species, &potential.reversed(), &forward.end().x, t1, 2.0 * t1 - t0, opts)?;
    let mismatch = back.end().x.max_particle_distance(x0);
    Ok((forward, back, mismatch))
}

/// Smallest pair distance along a trajectory and when it happens, refined
/// between samples to a thousandth of the sample spacing.
pub fn min_distance_monitor(traj: &Trajectory) -> Result<(f64, f64)> {
    if traj.particles() < 2 {
        return param("pair distances need at least two particles");
    }
    let s = &traj.samples;
    let (n, d) = (traj.particles(), traj.dim());
    let dist = |x: &Configuration| min_pairwise_distance_flat(x.coords(), n, d);
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for (i, sample) in s.iter().enumerate() {
        let v = dist(&sample.x);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut best_t = s[best_i].t;
    if s.len() >= 2 {
        let a = s[best_i.saturating_sub(1)].t;
        let b = s[(best_i + 1).min(s.len() - 1)].t;
        const SUBDIVISIONS: usize = 2000;
        for j in 0..=SUBDIVISIONS {
            let tj = a + (b - a) * j as f64 / SUBDIVISIONS as f64;
            let v = dist(&traj.interpolate(tj));
            if v < best {
                best = v;
                best_t = tj;
            }
        }
    }
    Ok((best, best_t))
}
