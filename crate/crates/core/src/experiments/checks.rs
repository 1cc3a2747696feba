//! The invariant battery behind `pilotwave check`.
//!
//! Every check is a plain function of a [`CheckContext`]. The context
//! carries a velocity bias used only to confirm that the checks notice a
//! broken guidance field: the bias adds `bias * (dS/dx / m + 1)` to the
//! first coordinate of particle 0, which is neither gauge covariant nor
//! compatible with the continuity equation.

use std::f64::consts::PI;
use std::fmt::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::configuration::{distance, Configuration};
use crate::ensemble::{density_distance, sample_initial, Binning};
use crate::error::{Error, Result};
use crate::guidance::{
    circle, circulation, gauge_transform, make_flux_line, velocity_field, GaugeFunction, SpeciesTable, Statistics,
    VectorPotential,
};
use crate::integrator::{integrate, round_trip, IntegrateOptions, Termination};
use crate::permutations::{antisymmetrize, exchange_phase, symmetrize, ExchangePath, Permutation};
use crate::tolerances::*;
use crate::wavefunctions::{PilotWave, SingleParticleState};

#[derive(Debug, Clone)]
pub struct CheckContext {
    pub seed: u64,
    /// Added to the guidance velocity in the field-level checks.
    pub bias: f64,
    /// Samples for the ensemble equivariance check.
    pub ensemble_size: usize,
    /// Sampled pairs per statistics in the non-crossing check.
    pub crossing_pairs: usize,
}

impl Default for CheckContext {
    fn default() -> Self {
        Self { seed: 2024, bias: 0.0, ensemble_size: 10_000, crossing_pairs: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CheckRow {
    pub claim: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
}

impl CheckRow {
    fn at_most(claim: &str, measured: f64, threshold: f64) -> Self {
        Self { claim: claim.into(), passed: measured <= threshold, measured, threshold }
    }

    fn above(claim: &str, measured: f64, threshold: f64) -> Self {
        Self { claim: claim.into(), passed: measured > threshold, measured, threshold }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub run: fn(&CheckContext) -> Result<Vec<CheckRow>>,
}

#[derive(Debug, Clone, Default)]
pub struct CheckRegistry {
    checks: Vec<Check>,
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register("gradients", gradients);
        r.register("exchange_phases", exchange_phases);
        r.register("coincidence_stationarity", coincidence_stationarity);
        r.register("gauge_invariance", gauge_invariance);
        r.register("continuity", continuity);
        r.register("ensemble_equivariance", ensemble_equivariance);
        r.register("non_crossing", non_crossing);
        r.register("coincidence_persistence", coincidence_persistence);
        r.register("time_reversal", time_reversal);
        r.register("circulation", circulation_quantisation);
        r.register("permutation_equivariance", permutation_equivariance);
        r
    }

    pub fn register(&mut self, name: &'static str, run: fn(&CheckContext) -> Result<Vec<CheckRow>>) {
        self.checks.push(Check { name, run });
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.name).collect()
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub rows: Vec<CheckRow>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<58} {:<6} {:>12} {:>12}", "claim", "status", "measured", "threshold");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<58} {:<6} {:>12.3e} {:>12.3e}",
                r.claim,
                if r.passed { "pass" } else { "FAIL" },
                r.measured,
                r.threshold
            );
        }
        s
    }
}

/// Runs every registered check. An empty registry is a configuration error.
pub fn check_suite(registry: &CheckRegistry, ctx: &CheckContext) -> Result<CheckReport> {
    if registry.is_empty() {
        return Err(Error::Config("check registry is empty".into()));
    }
    let mut rows = Vec::new();
    for c in &registry.checks {
        rows.extend((c.run)(ctx)?);
    }
    Ok(CheckReport { rows })
}

fn velocity(
    psi: &PilotWave,
    sp: &SpeciesTable,
    a: &VectorPotential,
    x: &Configuration,
    t: f64,
    bias: f64,
) -> Result<Vec<f64>> {
    let mut v = velocity_field(psi, sp, a, x, t)?;
    if bias != 0.0 {
        let (value, grad) = psi.value_and_gradient(x, t)?;
        v[0] += bias * ((grad[0] / value).im / sp.mass(0) + 1.0);
    }
    Ok(v)
}

fn gauss(c: &[f64], p: &[f64], w: f64, m: f64) -> SingleParticleState {
    SingleParticleState::gaussian_packet(c, p, w, m).expect("valid packet")
}

fn osc(levels: &[i64]) -> SingleParticleState {
    SingleParticleState::oscillator(levels, 1.0, 1.0).expect("valid oscillator")
}

/// Two unit packets at -4 and +4 heading towards each other.
pub fn colliding_orbitals() -> Vec<SingleParticleState> {
    vec![gauss(&[-4.0], &[2.0], 1.0, 1.0), gauss(&[4.0], &[-2.0], 1.0, 1.0)]
}

/// Three unit packets at -8, 0, 8 converging at speed 4.
pub fn three_boson_orbitals() -> Vec<SingleParticleState> {
    vec![gauss(&[-8.0], &[4.0], 1.0, 1.0), gauss(&[0.0], &[0.0], 1.0, 1.0), gauss(&[8.0], &[-4.0], 1.0, 1.0)]
}

pub fn colliding_pair(antisymmetric: bool) -> PilotWave {
    let product = PilotWave::product(colliding_orbitals()).expect("product");
    if antisymmetric { antisymmetrize(&product) } else { symmetrize(&product) }.expect("orthogonal orbitals")
}

pub fn oscillator_superposition() -> PilotWave {
    let c = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    PilotWave::superpose(vec![(c, PilotWave::single(osc(&[0]))), (c, PilotWave::single(osc(&[1])))]).expect("superposition")
}

/// The states used by the field-level checks, with matching species.
pub fn catalogue_states() -> Vec<(&'static str, PilotWave, SpeciesTable)> {
    let boson = |n| SpeciesTable::uniform(n, 1.0, 0.0, Statistics::Boson).unwrap();
    let fermion = |n| SpeciesTable::uniform(n, 1.0, 0.0, Statistics::Fermion).unwrap();
    let lone = |m| SpeciesTable::uniform(1, m, 0.0, Statistics::Distinguishable { label: "a".into() }).unwrap();
    let dressed = {
        let base = PilotWave::single(gauss(&[0.5, -0.3], &[0.7, 0.2], 1.1, 1.0));
        let sp = SpeciesTable::uniform(1, 1.0, 1.0, Statistics::Distinguishable { label: "e".into() }).unwrap();
        let chi = GaugeFunction::FluxAngle { flux: 2.0 * PI, position: [-2.0, 1.5] };
        gauge_transform(&base, &sp, &VectorPotential::zero(), &chi).unwrap().0
    };
    let three_bosons = symmetrize(&PilotWave::product(vec![osc(&[0]), osc(&[1]), osc(&[2])]).unwrap()).unwrap();
    vec![
        ("gaussian d=1", PilotWave::single(gauss(&[0.3], &[1.2], 0.8, 1.0)), lone(1.0)),
        ("gaussian d=3", PilotWave::single(gauss(&[0.1, -0.2, 0.3], &[0.5, 0.0, -1.0], 1.3, 2.0)), lone(2.0)),
        ("oscillator (2,1)", PilotWave::single(osc(&[2, 1])), lone(1.0)),
        ("symmetric pair", colliding_pair(false), boson(2)),
        ("antisymmetric pair", colliding_pair(true), fermion(2)),
        ("three bosons", three_bosons, boson(3)),
        ("anyon pair nu=1/2", PilotWave::anyon_pair(0.5, 0, 1.0, 1.0).unwrap(), SpeciesTable::uniform(2, 1.0, 0.0, Statistics::Anyon { nu: 0.5 }).unwrap()),
        ("superposition", oscillator_superposition(), lone(1.0)),
        ("gauge dressed", dressed, SpeciesTable::uniform(1, 1.0, 1.0, Statistics::Distinguishable { label: "e".into() }).unwrap()),
    ]
}

/// A point near the bulk of `|psi|^2` that is not a node.
fn bulk_point(psi: &PilotWave, t: f64, rng: &mut ChaCha8Rng) -> Configuration {
    let (n, d) = (psi.particles(), psi.dim());
    let centre = psi.centre_guess(t);
    let l = psi.length_scale(t);
    loop {
        let c: Vec<f64> = centre.iter().map(|c| c + l * rng.sample::<f64, _>(StandardNormal)).collect();
        let x = Configuration::new(n, d, c).expect("finite");
        if let Ok(v) = psi.evaluate(&x, t) {
            if v.norm() > 1e-6 * psi.peak_estimate(t) {
                return x;
            }
        }
    }
}

/// Largest relative difference between analytic and central-difference gradients.
pub fn gradient_error(psi: &PilotWave, x: &Configuration, t: f64) -> Result<f64> {
    let (value, grad) = psi.value_and_gradient(x, t)?;
    let h = GRADIENT_FD_STEP;
    let mut diff = 0.0;
    let mut size = 0.0;
    for i in 0..grad.len() {
        let mut plus = x.coords().to_vec();
        let mut minus = x.coords().to_vec();
        plus[i] += h;
        minus[i] -= h;
        let fp = psi.evaluate(&x.with_coords_unchecked(plus), t)?;
        let fm = psi.evaluate(&x.with_coords_unchecked(minus), t)?;
        let fd = (fp - fm) / (2.0 * h);
        diff += (fd - grad[i]).norm_sqr();
        size += grad[i].norm_sqr();
    }
    let floor = value.norm() / psi.length_scale(t);
    Ok(diff.sqrt() / size.sqrt().max(floor))
}

fn gradients(ctx: &CheckContext) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut worst: f64 = 0.0;
    for (_, psi, _) in catalogue_states() {
        for _ in 0..20 {
            let x = bulk_point(&psi, 0.7, &mut rng);
            worst = worst.max(gradient_error(&psi, &x, 0.7)?);
        }
    }
    Ok(vec![CheckRow::at_most("analytic gradients match central differences", worst, GRADIENT_FD_RELATIVE)])
}

fn exchange_phases(ctx: &CheckContext) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed + 1);
    let swap = Permutation::transposition(2, 0, 1)?;
    let mut sym: f64 = 0.0;
    let mut anti: f64 = 0.0;
    for (psi, target, acc) in [(colliding_pair(false), 1.0, &mut sym), (colliding_pair(true), -1.0, &mut anti)] {
        for _ in 0..20 {
            let x = bulk_point(&psi, 0.0, &mut rng);
            let g = exchange_phase(&psi, &x, 0.0, &swap, None)?;
            *acc = acc.max((g - Complex64::new(target, 0.0)).norm());
        }
    }
    let anyon = PilotWave::anyon_pair(0.5, 0, 1.0, 1.0)?;
    let x = Configuration::new(2, 2, vec![0.4, 0.1, -0.4, -0.1])?;
    let path = ExchangePath::semicircle([0.8, 0.2], true, 32);
    let g = exchange_phase(&anyon, &x, 0.0, &swap, Some(&path))?;
    let any = (g - Complex64::from_polar(1.0, PI / 2.0)).norm();
    Ok(vec![
        CheckRow::at_most("symmetric states exchange with +1", sym, EXCHANGE_PHASE_TOL),
        CheckRow::at_most("antisymmetric states exchange with -1", anti, EXCHANGE_PHASE_TOL),
        CheckRow::at_most("anyon nu=1/2 counterclockwise exchange gives exp(i pi/2)", any, ANYON_EXCHANGE_TOL),
    ])
}

/// Relative speed of a pair centred at `mid` with separation `r` along `dir`.
pub fn relative_speed(psi: &PilotWave, sp: &SpeciesTable, mid: &[f64], dir: &[f64], r: f64, t: f64) -> Result<f64> {
    let d = mid.len();
    let mut c = Vec::with_capacity(2 * d);
    c.extend((0..d).map(|a| mid[a] + 0.5 * r * dir[a]));
    c.extend((0..d).map(|a| mid[a] - 0.5 * r * dir[a]));
    let x = Configuration::new(2, d, c)?;
    let v = velocity_field(psi, sp, &VectorPotential::zero(), &x, t)?;
    Ok((0..d).map(|a| (v[a] - v[d + a]).powi(2)).sum::<f64>().sqrt())
}

fn coincidence_stationarity(_: &CheckContext) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for (label, anti) in [("symmetric", false), ("antisymmetric", true)] {
        let psi = colliding_pair(anti);
        let sp = SpeciesTable::uniform(2, 1.0, 0.0, if anti { Statistics::Fermion } else { Statistics::Boson })?;
        let mut worst_ratio: f64 = 0.0;
        let mut monotone = true;
        for &(mid, t) in &[(0.3, 1.0), (-0.2, 2.5), (1.1, 0.4)] {
            let speeds: Vec<f64> = [1e-2, 1e-3, 1e-4]
                .iter()
                .map(|&r| relative_speed(&psi, &sp, &[mid], &[1.0], r, t))
                .collect::<Result<_>>()?;
            monotone &= speeds.windows(2).all(|w| w[1] < w[0] || w[1] == 0.0);
            let c = speeds[0] / 1e-2;
            worst_ratio = worst_ratio.max(speeds[2] / (c * 1e-4 * 1.01));
        }
        rows.push(CheckRow {
            claim: format!("{label} pair relative speed vanishes linearly at coincidence"),
            passed: monotone && worst_ratio <= 1.0,
            measured: worst_ratio,
            threshold: 1.0,
        });
    }
    Ok(rows)
}

fn gauge_invariance(ctx: &CheckContext) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed + 2);
    let flux = make_flux_line(0.7 * 2.0 * PI, [1.0, -0.5]);
    let charged = SpeciesTable::uniform(1, 1.3, 0.8, Statistics::Distinguishable { label: "e".into() })?;
    let pair = SpeciesTable::uniform(2, 1.0, 1.0, Statistics::Boson)?;
    let packet = PilotWave::single(gauss(&[0.2, 0.1], &[1.0, -0.4], 1.2, 1.3));
    let two = symmetrize(&PilotWave::product(vec![gauss(&[-4.0, 0.0], &[2.0, 0.5], 1.0, 1.0), gauss(&[4.0, 0.0], &[-2.0, 0.0], 1.0, 1.0)])?)?;
    let cases: Vec<(PilotWave, SpeciesTable, VectorPotential, GaugeFunction)> = vec![
        (packet.clone(), charged.clone(), flux.clone(), GaugeFunction::Linear { slope: vec![0.3, -1.7], offset: 0.2 }),
        (packet.clone(), charged.clone(), flux.clone(), GaugeFunction::FluxAngle { flux: -0.7 * 2.0 * PI, position: [1.0, -0.5] }),
        (packet, charged, VectorPotential::zero(), GaugeFunction::FluxAngle { flux: 2.0 * PI, position: [-1.0, 2.0] }),
        (two, pair, flux, GaugeFunction::Linear { slope: vec![-0.4, 0.9], offset: 0.0 }),
    ];
    let mut worst: f64 = 0.0;
    for (psi, sp, a, chi) in cases {
        let (psi2, a2) = gauge_transform(&psi, &sp, &a, &chi)?;
        let mut done = 0;
        while done < 25 {
            let x = bulk_point(&psi, 0.3, &mut rng);
            let (Ok(v), Ok(w)) = (velocity(&psi, &sp, &a, &x, 0.3, ctx.bias), velocity(&psi2, &sp, &a2, &x, 0.3, ctx.bias)) else {
                continue;
            };
            done += 1;
            for (p, q) in v.iter().zip(&w) {
                worst = worst.max((p - q).abs());
            }
        }
    }
    Ok(vec![CheckRow::at_most("velocity field is gauge invariant (incl. flux line)", worst, GAUGE_INVARIANCE_TOL)])
}

/// Relative residual of `d rho/dt + div(rho v) = 0` by central differences.
pub fn continuity_residual(psi: &PilotWave, sp: &SpeciesTable, x: &Configuration, t: f64, bias: f64) -> Result<f64> {
    let h = 1e-4;
    let rho = |c: &[f64], t: f64| -> Result<f64> { Ok(psi.evaluate(&x.with_coords_unchecked(c.to_vec()), t)?.norm_sqr()) };
    let c0 = x.coords();
    let dt = (rho(c0, t + h)? - rho(c0, t - h)?) / (2.0 * h);
    let mut div = 0.0;
    let mut scale = dt.abs();
    for i in 0..c0.len() {
        let flux = |s: f64| -> Result<f64> {
            let mut c = c0.to_vec();
            c[i] += s;
            let y = x.with_coords_unchecked(c.clone());
            Ok(rho(&c, t)? * velocity(psi, sp, &VectorPotential::zero(), &y, t, bias)?[i])
        };
        let term = (flux(h)? - flux(-h)?) / (2.0 * h);
        div += term;
        scale += term.abs();
    }
    let floor = rho(c0, t)? / psi.length_scale(t);
    Ok((dt + div).abs() / scale.max(floor))
}

fn continuity(ctx: &CheckContext) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed + 3);
    let lone = SpeciesTable::uniform(1, 1.0, 0.0, Statistics::Distinguishable { label: "a".into() })?;
    let cases = vec![
        (oscillator_superposition(), lone.clone()),
        (PilotWave::single(gauss(&[0.0], &[1.0], 1.0, 1.0)), lone),
        (colliding_pair(true), SpeciesTable::uniform(2, 1.0, 0.0, Statistics::Fermion)?),
    ];
    let mut worst: f64 = 0.0;
    for (psi, sp) in cases {
        for _ in 0..20 {
            let x = bulk_point(&psi, 1.3, &mut rng);
            worst = worst.max(continuity_residual(&psi, &sp, &x, 1.3, ctx.bias)?);
        }
    }
    Ok(vec![CheckRow::at_most("velocity field satisfies the continuity equation", worst, 1e-5)])
}

fn ensemble_equivariance(ctx: &CheckContext) -> Result<Vec<CheckRow>> {
    let psi = oscillator_superposition();
    let sp = SpeciesTable::uniform(1, 1.0, 0.0, Statistics::Distinguishable { label: "a".into() })?;
    let start = sample_initial(&psi, 0.0, ctx.ensemble_size, ctx.seed)?;
    let opts = IntegrateOptions::default().endpoints();
    let finals: Vec<Configuration> = start
        .par_iter()
        .map(|x| Ok(integrate(&psi, &sp, &VectorPotential::zero(), x, 0.0, PI, &opts)?.end().x.clone()))
        .collect::<Result<_>>()?;
    let d0 = density_distance(&start, &psi, 0.0, &Binning::covering(&psi, 0.0)?)?;
    let d1 = density_distance(&finals, &psi, PI, &Binning::covering(&psi, PI)?)?;
    Ok(vec![
        CheckRow::at_most("ensemble stays |psi|^2 distributed (L1 at t = pi)", d1.value, EQUIVARIANCE_MAX_DISTANCE),
        CheckRow::at_most("L1 distance grows by no more than noise", d1.value - d0.value, EQUIVARIANCE_MAX_INCREASE),
    ])
}

fn non_crossing(ctx: &CheckContext) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for (label, anti) in [("fermion", true), ("boson", false)] {
        let psi = colliding_pair(anti);
        let sp = SpeciesTable::uniform(2, 1.0, 0.0, if anti { Statistics::Fermion } else { Statistics::Boson })?;
        let starts = sample_initial(&psi, 0.0, ctx.crossing_pairs, ctx.seed + 4)?;
        let opts = IntegrateOptions::default().endpoints();
        let mins: Vec<f64> = starts
            .par_iter()
            .map(|x| {
                let tr = integrate(&psi, &sp, &VectorPotential::zero(), x, 0.0, 5.0, &opts)?;
                Ok(if tr.meta.termination == Termination::Completed { tr.meta.min_pair_distance } else { 0.0 })
            })
            .collect::<Result<_>>()?;
        let m = mins.iter().cloned().fold(f64::INFINITY, f64::min);
        rows.push(CheckRow::above(&format!("sampled {label} pairs never meet (min distance)"), m, COINCIDENCE_THRESHOLD));
    }
    Ok(rows)
}

fn coincidence_persistence(_: &CheckContext) -> Result<Vec<CheckRow>> {
    let sp1 = SpeciesTable::uniform(2, 1.0, 0.0, Statistics::Boson)?;
    let cases = vec![
        (colliding_pair(false), vec![0.4, 0.4]),
        (colliding_pair(false), vec![-3.1, -3.1]),
        (
            symmetrize(&PilotWave::product(vec![gauss(&[-4.0, 0.5], &[2.0, 0.0], 1.0, 1.0), gauss(&[4.0, -0.5], &[-2.0, 0.3], 1.0, 1.0)])?)?,
            vec![0.2, 0.1, 0.2, 0.1],
        ),
    ];
    let mut worst: f64 = 0.0;
    for (psi, c) in cases {
        let d = psi.dim();
        let x = Configuration::new(2, d, c)?;
        let tr = integrate(&psi, &sp1, &VectorPotential::zero(), &x, 0.0, 5.0, &IntegrateOptions::default())?;
        if tr.meta.termination != Termination::Completed {
            worst = f64::INFINITY;
        }
        for s in &tr.samples {
            worst = worst.max(distance(s.x.position(0), s.x.position(1)));
        }
    }
    Ok(vec![CheckRow::at_most("coincident bosons stay coincident on [0, 5]", worst, DIAGONAL_TOL)])
}

fn time_reversal(_: &CheckContext) -> Result<Vec<CheckRow>> {
    let lone = SpeciesTable::uniform(1, 1.0, 0.0, Statistics::Distinguishable { label: "a".into() })?;
    let charged = SpeciesTable::uniform(1, 1.0, 1.0, Statistics::Distinguishable { label: "e".into() })?;
    let opts = IntegrateOptions::default();
    let cases: Vec<(PilotWave, SpeciesTable, VectorPotential, Vec<f64>, f64)> = vec![
        (PilotWave::single(gauss(&[0.0], &[1.0], 1.0, 1.0)), lone.clone(), VectorPotential::zero(), vec![0.7], 2.0),
        (oscillator_superposition(), lone, VectorPotential::zero(), vec![-0.4], PI),
        (colliding_pair(true), SpeciesTable::uniform(2, 1.0, 0.0, Statistics::Fermion)?, VectorPotential::zero(), vec![-3.5, 4.2], 5.0),
        (
            PilotWave::anyon_pair(0.5, 0, 1.0, 1.0)?,
            SpeciesTable::uniform(2, 1.0, 0.0, Statistics::Anyon { nu: 0.5 })?,
            VectorPotential::zero(),
            vec![0.6, 0.1, -0.5, -0.2],
            2.0,
        ),
        (
            PilotWave::single(gauss(&[-2.0, 0.3], &[1.5, 0.0], 1.0, 1.0)),
            charged,
            make_flux_line(PI, [0.0, 0.0]),
            vec![-2.2, 0.8],
            2.5,
        ),
    ];
    let mut worst: f64 = 0.0;
    for (psi, sp, a, c, t1) in cases {
        let x = Configuration::new(psi.particles(), psi.dim(), c)?;
        let (_, _, e) = round_trip(&psi, &sp, &a, &x, 0.0, t1, &opts)?;
        worst = worst.max(e);
    }
    Ok(vec![CheckRow::at_most("time-reversed wave retraces trajectories", worst, ROUND_TRIP_FACTOR * DEFAULT_TOL)])
}

fn circulation_quantisation(_: &CheckContext) -> Result<Vec<CheckRow>> {
    let mut worst: f64 = 0.0;
    for nu in [0.5, 1.0] {
        let psi = PilotWave::anyon_pair(nu, 0, 1.0, 1.0)?;
        let sp = SpeciesTable::uniform(2, 1.0, 0.0, Statistics::Anyon { nu })?;
        let a = psi.as_anyon_pair().expect("anyon pair");
        let expected = 2.0 * PI * a.ell() / a.reduced_mass();
        for r in [0.5, 1.0, 2.0] {
            let got = circulation(&psi, &sp, &VectorPotential::zero(), &circle([0.0, 0.0], r, 64), [0.0, 0.0], 0.0)?;
            worst = worst.max((got - expected).abs());
        }
    }
    let mut flux_err: f64 = 0.0;
    for phi in [0.3, 2.0 * PI, -5.0] {
        let a = make_flux_line(phi, [0.4, -0.2]);
        for r in [0.5, 1.0, 2.0] {
            flux_err = flux_err.max((a.loop_integral(&circle([0.4, -0.2], r, 64))? - phi).abs());
        }
    }
    Ok(vec![
        CheckRow::at_most("anyon relative circulation equals 2 pi l / mu", worst, CIRCULATION_TOL),
        CheckRow::at_most("flux-line loop integral equals the flux", flux_err, FLUX_LOOP_TOL),
    ])
}

fn permutation_equivariance(_: &CheckContext) -> Result<Vec<CheckRow>> {
    let opts = IntegrateOptions::default();
    let three = symmetrize(&PilotWave::product(three_boson_orbitals())?)?;
    let sp = SpeciesTable::uniform(3, 1.0, 0.0, Statistics::Boson)?;
    let p = Permutation::from_one_based(&[2, 3, 1])?;
    let x0 = Configuration::new(3, 1, vec![-7.6, 0.3, 8.4])?;
    let a = integrate(&three, &sp, &VectorPotential::zero(), &x0, 0.0, 3.0, &opts)?;
    let b = integrate(&three, &sp, &VectorPotential::zero(), &p.apply(&x0)?, 0.0, 3.0, &opts)?;
    let same = p.apply(&a.end().x)?.max_particle_distance(&b.end().x);

    let dist = PilotWave::product(vec![gauss(&[-2.0], &[2.0], 1.0, 1.0), gauss(&[2.0], &[-2.0], 1.0, 2.0)])?;
    let dsp = SpeciesTable::new(vec![
        crate::guidance::Species { mass: 1.0, charge: 0.0, statistics: Statistics::Distinguishable { label: "light".into() } },
        crate::guidance::Species { mass: 2.0, charge: 0.0, statistics: Statistics::Distinguishable { label: "heavy".into() } },
    ])?;
    let swap = Permutation::transposition(2, 0, 1)?;
    let y0 = Configuration::new(2, 1, vec![-1.8, 1.9])?;
    let c = integrate(&dist, &dsp, &VectorPotential::zero(), &y0, 0.0, 1.0, &opts)?;
    let d = integrate(&dist, &dsp, &VectorPotential::zero(), &swap.apply(&y0)?, 0.0, 1.0, &opts)?;
    let differ = swap.apply(&c.end().x)?.max_particle_distance(&d.end().x);
    let crossed = integrate(&dist, &dsp, &VectorPotential::zero(), &y0, 0.0, 3.0, &opts)?.meta.crossed;
    Ok(vec![
        CheckRow::at_most("identical particles: run from Px0 = P(run from x0)", same, TRAJECTORY_EQUIVARIANCE_FACTOR * DEFAULT_TOL),
        CheckRow::above("distinguishable particles break it by t = 1", differ, DISTINGUISHABLE_MISMATCH),
        CheckRow::above("distinguishable particles cross in physical space", if crossed { 1.0 } else { 0.0 }, 0.5),
    ])
}
