use proptest::prelude::*;

use pilotwave::{
    gauge_transform, make_flux_line, min_pairwise_distance, reduced_representative, symmetrize, velocity_field,
    Configuration, GaugeFunction, Permutation, PilotWave, SingleParticleState, SpeciesTable, Statistics,
};

fn configuration(max_n: usize) -> impl Strategy<Value = Configuration> {
    (1..=max_n, 1..=3usize).prop_flat_map(|(n, d)| {
        prop::collection::vec(-10.0..10.0f64, n * d).prop_map(move |c| Configuration::new(n, d, c).unwrap())
    })
}

fn brute_min_distance(x: &Configuration) -> f64 {
    let mut best = f64::INFINITY;
    for a in 0..x.particles() {
        for b in (a + 1)..x.particles() {
            let d2: f64 = x.position(a).iter().zip(x.position(b)).map(|(p, q)| (p - q) * (p - q)).sum();
            best = best.min(d2.sqrt());
        }
    }
    best
}

proptest! {
    #[test]
    fn canonical_form_is_idempotent_and_label_blind(x in configuration(5), seed in 0usize..120) {
        let rep = reduced_representative(&x);
        prop_assert_eq!(&reduced_representative(rep.representative()), &rep);
        let perms: Vec<Permutation> = Permutation::all(x.particles()).collect();
        let p = &perms[seed % perms.len()];
        prop_assert_eq!(reduced_representative(&p.apply(&x).unwrap()), rep);
    }

    #[test]
    fn min_distance_matches_brute_force(x in configuration(6)) {
        prop_assume!(x.particles() >= 2);
        prop_assert_eq!(min_pairwise_distance(&x).unwrap(), brute_min_distance(&x));
    }

    #[test]
    fn inverse_undoes_apply(x in configuration(5), seed in 0usize..120) {
        let perms: Vec<Permutation> = Permutation::all(x.particles()).collect();
        let p = &perms[seed % perms.len()];
        prop_assert_eq!(p.inverse().apply(&p.apply(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn flux_line_gauge_leaves_velocity_unchanged(
        coords in prop::collection::vec(-3.0..3.0f64, 4),
        slope in prop::collection::vec(-2.0..2.0f64, 2),
        flux in -4.0..4.0f64,
        t in 0.0..2.0f64,
    ) {
        let g = |c: [f64; 2], p: [f64; 2]| SingleParticleState::gaussian_packet(&c, &p, 1.0, 1.0).unwrap();
        let psi = symmetrize(&PilotWave::product(vec![g([-4.0, 0.0], [2.0, 0.0]), g([4.0, 0.0], [-2.0, 0.0])]).unwrap()).unwrap();
        let species = SpeciesTable::uniform(2, 1.0, 1.0, Statistics::Boson).unwrap();
        let a = make_flux_line(1.3, [0.1, -0.2]);
        let x = Configuration::new(2, 2, coords).unwrap();
        prop_assume!(!psi.is_node(&x, t).unwrap());
        for k in 0..2 {
            let p = x.position(k);
            prop_assume!(((p[0] - 0.1).powi(2) + (p[1] + 0.2).powi(2)).sqrt() > 1e-3);
        }
        let base = velocity_field(&psi, &species, &a, &x, t).unwrap();
        for chi in [
            GaugeFunction::Linear { slope: slope.clone(), offset: 0.7 },
            GaugeFunction::FluxAngle { flux, position: [0.1, -0.2] },
        ] {
            let (psi2, a2) = gauge_transform(&psi, &species, &a, &chi).unwrap();
            let v = velocity_field(&psi2, &species, &a2, &x, t).unwrap();
            for (u, w) in base.iter().zip(&v) {
                prop_assert!((u - w).abs() <= 1e-10 * (1.0 + u.abs()), "{} vs {}", u, w);
            }
        }
    }
}
