//! Fixtures shared by the benchmarks: a few representative states with
//! matching species tables and start points.

use pilotwave::{
    antisymmetrize, symmetrize, Configuration, PilotWave, SingleParticleState, SpeciesTable, Statistics,
};

pub struct Fixture {
    pub name: &'static str,
    pub psi: PilotWave,
    pub species: SpeciesTable,
    pub start: Configuration,
}

fn packet(c: f64, p: f64) -> SingleParticleState {
    SingleParticleState::gaussian_packet(&[c], &[p], 1.0, 1.0).expect("valid packet")
}

fn oscillator(n: i64) -> SingleParticleState {
    SingleParticleState::oscillator(&[n], 1.0, 1.0).expect("valid oscillator")
}

pub fn free_packet() -> Fixture {
    Fixture {
        name: "free packet",
        psi: PilotWave::single(packet(0.0, 0.0)),
        species: SpeciesTable::uniform(1, 1.0, 0.0, Statistics::Distinguishable { label: "a".into() }).unwrap(),
        start: Configuration::new(1, 1, vec![1.0]).unwrap(),
    }
}

pub fn fermion_pair() -> Fixture {
    let product = PilotWave::product(vec![packet(-4.0, 2.0), packet(4.0, -2.0)]).unwrap();
    Fixture {
        name: "fermion pair",
        psi: antisymmetrize(&product).unwrap(),
        species: SpeciesTable::uniform(2, 1.0, 0.0, Statistics::Fermion).unwrap(),
        start: Configuration::new(2, 1, vec![-3.6, 4.3]).unwrap(),
    }
}

/// Symmetrised product of `n` oscillator levels; the permanent costs `n!`.
pub fn oscillator_bosons(n: usize) -> Fixture {
    let product = PilotWave::product((0..n as i64).map(oscillator).collect()).unwrap();
    let coords = (0..n).map(|k| -1.0 + 2.0 * k as f64 / n.max(2) as f64 + 0.013 * k as f64).collect();
    Fixture {
        name: "oscillator bosons",
        psi: symmetrize(&product).unwrap(),
        species: SpeciesTable::uniform(n, 1.0, 0.0, Statistics::Boson).unwrap(),
        start: Configuration::new(n, 1, coords).unwrap(),
    }
}

pub fn anyon_pair() -> Fixture {
    Fixture {
        name: "anyon pair",
        psi: PilotWave::anyon_pair(0.5, 0, 1.0, 1.0).unwrap(),
        species: SpeciesTable::uniform(2, 1.0, 0.0, Statistics::Anyon { nu: 0.5 }).unwrap(),
        start: Configuration::new(2, 2, vec![0.6, 0.1, -0.5, -0.2]).unwrap(),
    }
}
