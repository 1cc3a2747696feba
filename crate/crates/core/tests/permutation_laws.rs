use pilotwave::{
    antisymmetrize, exchange_phase, reduced_representative, symmetrize, Configuration, Permutation, PilotWave,
    SingleParticleState,
};

fn sample_configuration(n: usize, d: usize) -> Configuration {
    let coords = (0..n * d).map(|i| ((i * 7 + 3) % 11) as f64 * 0.37 - 1.9 + i as f64 * 1e-3).collect();
    Configuration::new(n, d, coords).unwrap()
}

#[test]
fn group_laws_hold_exhaustively_up_to_four() {
    for n in 1..=4 {
        let all: Vec<Permutation> = Permutation::all(n).collect();
        assert_eq!(all.len(), (1..=n).product::<usize>());
        let id = Permutation::identity(n);
        let x = sample_configuration(n, 2);
        for p in &all {
            assert_eq!(p.compose(&id).unwrap(), *p);
            assert_eq!(id.compose(p).unwrap(), *p);
            assert!(p.compose(&p.inverse()).unwrap().is_identity());
            assert_eq!(p.inverse().parity(), p.parity());
            for q in &all {
                let pq = p.compose(q).unwrap();
                assert_eq!(pq.parity(), p.parity() * q.parity());
                assert_eq!(pq.apply(&x).unwrap(), p.apply(&q.apply(&x).unwrap()).unwrap());
                for r in &all {
                    assert_eq!(pq.compose(r).unwrap(), p.compose(&q.compose(r).unwrap()).unwrap());
                }
            }
        }
    }
}

#[test]
fn transpositions_are_odd() {
    for n in 2..=5 {
        for a in 0..n {
            for b in (a + 1)..n {
                let t = Permutation::transposition(n, a, b).unwrap();
                assert_eq!(t.parity(), -1);
                assert!(t.compose(&t).unwrap().is_identity());
            }
        }
    }
}

#[test]
fn canonical_representative_is_label_blind() {
    for n in 1..=4 {
        for d in 1..=3 {
            let x = sample_configuration(n, d);
            let rep = reduced_representative(&x);
            for p in Permutation::all(n) {
                assert_eq!(reduced_representative(&p.apply(&x).unwrap()), rep);
            }
            let again = reduced_representative(rep.representative());
            assert_eq!(again, rep);
        }
    }
}

fn three_orbitals() -> PilotWave {
    let g = |c: f64, p: f64| SingleParticleState::gaussian_packet(&[c], &[p], 1.0, 1.0).unwrap();
    PilotWave::product(vec![g(-8.0, 4.0), g(0.0, 0.0), g(8.0, -4.0)]).unwrap()
}

#[test]
fn every_permutation_multiplies_by_its_character() {
    let product = three_orbitals();
    let bosons = symmetrize(&product).unwrap();
    let fermions = antisymmetrize(&product).unwrap();
    let x = Configuration::new(3, 1, vec![-7.5, 0.3, 8.2]).unwrap();
    for p in Permutation::all(3) {
        let b = exchange_phase(&bosons, &x, 0.4, &p, None).unwrap();
        let f = exchange_phase(&fermions, &x, 0.4, &p, None).unwrap();
        assert!((b.re - 1.0).abs() < 1e-12 && b.im.abs() < 1e-12, "{p}: {b}");
        assert!((f.re - p.parity() as f64).abs() < 1e-12 && f.im.abs() < 1e-12, "{p}: {f}");
    }
}

#[test]
fn one_based_images_are_parsed() {
    let p = Permutation::from_one_based(&[2, 3, 1]).unwrap();
    assert_eq!(p.images(), &[1, 2, 0]);
    assert!(Permutation::from_one_based(&[1, 1, 2]).is_err());
    assert!(Permutation::from_one_based(&[0, 1]).is_err());
}
