//! Independent numerical oracles for the analytic states and the integrator.

use std::f64::consts::PI;

use pilotwave::{
    antisymmetrize, integrate, integrate_fixed_steps, sample_initial, velocity_field, Complex64, Configuration,
    IntegrateOptions, PilotWave, SingleParticleState, SpeciesTable, Statistics, VectorPotential,
};

fn lone() -> SpeciesTable {
    SpeciesTable::uniform(1, 1.0, 0.0, Statistics::Distinguishable { label: "a".into() }).unwrap()
}

fn cfg(n: usize, d: usize, c: &[f64]) -> Configuration {
    Configuration::new(n, d, c.to_vec()).unwrap()
}

fn free_packet(p: f64) -> PilotWave {
    PilotWave::single(SingleParticleState::gaussian_packet(&[0.0], &[p], 1.0, 1.0).unwrap())
}

/// Classical fourth-order Runge-Kutta on the guidance field.
fn rk4(psi: &PilotWave, sp: &SpeciesTable, x0: f64, t1: f64, h: f64) -> f64 {
    let a = VectorPotential::zero();
    let v = |t: f64, x: f64| velocity_field(psi, sp, &a, &cfg(1, 1, &[x]), t).unwrap()[0];
    let steps = (t1 / h).round() as usize;
    let (mut t, mut x) = (0.0, x0);
    for _ in 0..steps {
        let k1 = v(t, x);
        let k2 = v(t + h / 2.0, x + h / 2.0 * k1);
        let k3 = v(t + h / 2.0, x + h / 2.0 * k2);
        let k4 = v(t + h, x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    x
}

#[test]
fn spreading_trajectory_matches_closed_form_and_rk4() {
    let psi = free_packet(0.0);
    let traj = integrate(&psi, &lone(), &VectorPotential::zero(), &cfg(1, 1, &[1.0]), 0.0, 2.0, &IntegrateOptions::with_tol(1e-9)).unwrap();
    let end = traj.end().x.coords()[0];
    assert!((end - 2f64.sqrt()).abs() < 1e-6, "{end}");
    let reference = rk4(&psi, &lone(), 1.0, 2.0, 1e-5);
    assert!((reference - 2f64.sqrt()).abs() < 1e-10, "{reference}");
    for s in &traj.samples {
        let exact = (1.0 + s.t * s.t / 4.0).sqrt();
        assert!((s.x.coords()[0] - exact).abs() < 1e-6, "t={} x={}", s.t, s.x.coords()[0]);
    }
}

#[test]
fn boosted_packet_trajectory_is_shifted_spreading() {
    // x(t) = p t / m + x0 sqrt(1 + tau^2) for a packet centred at 0.
    let psi = free_packet(1.5);
    let traj = integrate(&psi, &lone(), &VectorPotential::zero(), &cfg(1, 1, &[-0.6]), 0.0, 3.0, &IntegrateOptions::with_tol(1e-10)).unwrap();
    let exact = 1.5 * 3.0 - 0.6 * (1.0f64 + 9.0 / 4.0).sqrt();
    assert!((traj.end().x.coords()[0] - exact).abs() < 1e-7);
}

#[test]
fn fixed_step_formula_converges_at_fifth_order() {
    let psi = free_packet(0.0);
    let exact = 2f64.sqrt();
    let err = |steps| {
        (integrate_fixed_steps(&psi, &lone(), &VectorPotential::zero(), &cfg(1, 1, &[1.0]), 0.0, 2.0, steps).unwrap().coords()[0] - exact).abs()
    };
    let (e1, e2, e3) = (err(10), err(20), err(40));
    assert!(e1 / e2 > 16.0 && e2 / e3 > 16.0, "{e1} {e2} {e3}");
}

#[test]
fn adaptive_error_follows_the_tolerance() {
    let psi = free_packet(0.0);
    let err = |tol| {
        let t = integrate(&psi, &lone(), &VectorPotential::zero(), &cfg(1, 1, &[1.0]), 0.0, 2.0, &IntegrateOptions::with_tol(tol)).unwrap();
        (t.end().x.coords()[0] - 2f64.sqrt()).abs()
    };
    let errors: Vec<f64> = [1e-5, 1e-6, 1e-7, 1e-8, 1e-9].iter().map(|&t| err(t)).collect();
    for (e, tol) in errors.iter().zip([1e-5, 1e-6, 1e-7, 1e-8, 1e-9]) {
        assert!(*e < 10.0 * tol, "tol {tol}: {e}");
    }
    // Sixteen times tighter tolerance buys at least a factor of four.
    let coarse = err(1.6e-7);
    let fine = err(1e-8);
    assert!(coarse / fine >= 4.0, "{coarse} {fine}");
}

/// Crank-Nicolson for i dpsi/dt = -psi''/(2m) + V psi on a uniform grid
/// with zero boundary values.
fn crank_nicolson(psi0: &[Complex64], dx: f64, dt: f64, steps: usize, mass: f64, potential: &[f64]) -> Vec<Complex64> {
    let n = psi0.len();
    let i = Complex64::new(0.0, 1.0);
    let k = 1.0 / (2.0 * mass * dx * dx);
    let diag: Vec<Complex64> = potential.iter().map(|v| i * dt / 2.0 * (2.0 * k + v)).collect();
    let off = -i * dt / 2.0 * k;
    let mut psi = psi0.to_vec();
    let one = Complex64::new(1.0, 0.0);
    for _ in 0..steps {
        // rhs = (1 - i dt H / 2) psi
        let rhs: Vec<Complex64> = (0..n)
            .map(|j| {
                let left = if j > 0 { psi[j - 1] } else { Complex64::new(0.0, 0.0) };
                let right = if j + 1 < n { psi[j + 1] } else { Complex64::new(0.0, 0.0) };
                (one - diag[j]) * psi[j] - off * (left + right)
            })
            .collect();
        // Thomas algorithm for (1 + i dt H / 2) psi_new = rhs.
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        let mut d = vec![Complex64::new(0.0, 0.0); n];
        let b0 = one + diag[0];
        c[0] = off / b0;
        d[0] = rhs[0] / b0;
        for j in 1..n {
            let m = one + diag[j] - off * c[j - 1];
            c[j] = off / m;
            d[j] = (rhs[j] - off * d[j - 1]) / m;
        }
        psi[n - 1] = d[n - 1];
        for j in (0..n - 1).rev() {
            psi[j] = d[j] - c[j] * psi[j + 1];
        }
    }
    psi
}

fn grid_check(psi: &PilotWave, frequency: f64, t1: f64) -> f64 {
    let (lo, hi, points) = (-20.0, 20.0, 4001);
    let dx = (hi - lo) / (points - 1) as f64;
    let xs: Vec<f64> = (0..points).map(|j| lo + j as f64 * dx).collect();
    let v: Vec<f64> = xs.iter().map(|x| 0.5 * frequency * frequency * x * x).collect();
    let psi0: Vec<Complex64> = xs.iter().map(|&x| psi.evaluate(&cfg(1, 1, &[x]), 0.0).unwrap()).collect();
    let steps = 2000;
    let out = crank_nicolson(&psi0, dx, t1 / steps as f64, steps, 1.0, &v);
    xs.iter()
        .zip(&out)
        .map(|(&x, g)| (psi.evaluate(&cfg(1, 1, &[x]), t1).unwrap() - g).norm())
        .fold(0.0, f64::max)
}

#[test]
fn free_packet_agrees_with_grid_schrodinger_solution() {
    let err = grid_check(&free_packet(1.0), 0.0, 1.0);
    assert!(err < 2e-3, "{err}");
}

#[test]
fn oscillator_superposition_agrees_with_grid_solution() {
    let c = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    let osc = |n| PilotWave::single(SingleParticleState::oscillator(&[n], 1.0, 1.0).unwrap());
    let psi = PilotWave::superpose(vec![(c, osc(0)), (c, osc(1))]).unwrap();
    let err = grid_check(&psi, 1.0, 1.0);
    assert!(err < 2e-3, "{err}");
}

#[test]
fn two_fermion_determinant_matches_hand_evaluation() {
    let osc = |n| SingleParticleState::oscillator(&[n], 1.0, 1.0).unwrap();
    let psi = antisymmetrize(&PilotWave::product(vec![osc(0), osc(1)]).unwrap()).unwrap();
    let phi0 = |x: f64| PI.powf(-0.25) * (-x * x / 2.0).exp();
    let phi1 = |x: f64| PI.powf(-0.25) * 2f64.sqrt() * x * (-x * x / 2.0).exp();
    let expected = (phi0(0.5) * phi1(-0.5) - phi1(0.5) * phi0(-0.5)) / 2f64.sqrt();
    let got = psi.evaluate(&cfg(2, 1, &[0.5, -0.5]), 0.0).unwrap();
    assert!((got.re - expected).abs() < 1e-14 && got.im.abs() < 1e-14, "{got} vs {expected}");
}

/// Mean and a batch-means standard error for correlated chains.
fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let batches = 100;
    let size = values.len() / batches;
    let means: Vec<f64> = values.chunks(size).take(batches).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|b| (b - m).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (m, (var / batches as f64).sqrt())
}

#[test]
fn ground_state_samples_have_the_analytic_variance() {
    let (m, w) = (1.3, 0.8);
    let psi = PilotWave::single(SingleParticleState::oscillator(&[0, 0], w, m).unwrap());
    let s = sample_initial(&psi, 0.0, 100_000, 17).unwrap();
    for axis in 0..2 {
        let sq: Vec<f64> = s.iter().map(|x| x.coords()[axis].powi(2)).collect();
        let (mean, se) = mean_and_stderr(&sq);
        let target = 1.0 / (2.0 * m * w);
        assert!((mean - target).abs() < 3.0 * se, "axis {axis}: {mean} vs {target} (se {se})");
    }
}

#[test]
fn free_ensemble_variance_doubles_by_t_two() {
    let psi = free_packet(0.0);
    let s = sample_initial(&psi, 0.0, 20_000, 5).unwrap();
    let opts = IntegrateOptions::default().endpoints();
    let ends: Vec<f64> = s
        .iter()
        .map(|x| integrate(&psi, &lone(), &VectorPotential::zero(), x, 0.0, 2.0, &opts).unwrap().end().x.coords()[0])
        .collect();
    let before: Vec<f64> = s.iter().map(|x| x.coords()[0].powi(2)).collect();
    let after: Vec<f64> = ends.iter().map(|x| x * x).collect();
    let (m0, _) = mean_and_stderr(&before);
    let (m1, se1) = mean_and_stderr(&after);
    // Each trajectory scales by exactly sqrt(2), so the ratio is pathwise.
    assert!((m1 / m0 - 2.0).abs() < 1e-6, "{}", m1 / m0);
    // Initial variance is width^2 = 1.
    assert!((m1 - 2.0).abs() < 3.0 * se1, "{m1} (se {se1})");
}

#[test]
fn fermion_samples_respect_the_exclusion_mass() {
    let osc = |n| SingleParticleState::oscillator(&[n], 1.0, 1.0).unwrap();
    let psi = antisymmetrize(&PilotWave::product(vec![osc(0), osc(1)]).unwrap()).unwrap();
    let eps = 1e-1;
    let s = sample_initial(&psi, 0.0, 50_000, 9).unwrap();
    let hits: Vec<f64> = s.iter().map(|x| if (x.coords()[0] - x.coords()[1]).abs() < eps { 1.0 } else { 0.0 }).collect();
    let (frac, se) = mean_and_stderr(&hits);
    // |psi|^2 mass of the strip |x1 - x2| < eps by 2D midpoint quadrature.
    let (n, half) = (1200, 8.0);
    let h = 2.0 * half / n as f64;
    let mut mass = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (-half + (i as f64 + 0.5) * h, -half + (j as f64 + 0.5) * h);
            if (a - b).abs() < eps {
                mass += psi.evaluate(&cfg(2, 1, &[a, b]), 0.0).unwrap().norm_sqr() * h * h;
            }
        }
    }
    assert!(frac <= mass + 3.0 * se.max(1e-4), "{frac} vs {mass}");
}

#[test]
fn anyon_relative_velocity_is_purely_azimuthal() {
    let psi = PilotWave::anyon_pair(0.5, 0, 1.0, 1.0).unwrap();
    let sp = SpeciesTable::uniform(2, 1.0, 0.0, Statistics::Anyon { nu: 0.5 }).unwrap();
    let a = psi.as_anyon_pair().unwrap();
    let (ell, mu) = (a.ell(), a.reduced_mass());
    for &(rho, phi) in &[(1e-3, 0.3), (0.1, 2.0), (0.8, -1.2), (1.7, 3.0)] {
        let r = [rho * f64::cos(phi), rho * f64::sin(phi)];
        let x = cfg(2, 2, &[0.2 + r[0] / 2.0, -0.1 + r[1] / 2.0, 0.2 - r[0] / 2.0, -0.1 - r[1] / 2.0]);
        let v = velocity_field(&psi, &sp, &VectorPotential::zero(), &x, 0.4).unwrap();
        let rel = [v[0] - v[2], v[1] - v[3]];
        let radial = (rel[0] * r[0] + rel[1] * r[1]) / rho;
        let tangential = (-rel[0] * r[1] + rel[1] * r[0]) / rho;
        assert!(radial.abs() < 1e-9 * tangential.abs(), "rho {rho}: radial {radial}");
        assert!((tangential - ell / (mu * rho)).abs() < 1e-9 * tangential.abs(), "rho {rho}: {tangential}");
    }
}
