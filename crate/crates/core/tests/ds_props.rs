use cpi_core::ds::{
    bel_from_mass, combine_evidence, dempster_combine, mass_from_bel, DsError, Frame, MassFunction, Representation, Subset,
};
use cpi_core::rational::ratio;
use cpi_core::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn frame(n: usize) -> Frame {
    Frame::new(["a", "b", "c", "d"][..n].iter().map(|s| s.to_string()).collect()).unwrap()
}

fn random_mass(rng: &mut ChaCha8Rng, f: &Frame) -> MassFunction {
    let focal = rng.gen_range(1..=4);
    let weights: Vec<i64> = (0..focal).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = weights.iter().sum();
    let entries: Vec<(Subset, Rational)> =
        weights.iter().map(|&w| (rng.gen_range(1..=f.full()), ratio(w, total))).collect();
    MassFunction::new(f.clone(), entries).unwrap()
}

fn combine(a: &MassFunction, b: &MassFunction) -> Option<MassFunction> {
    match dempster_combine(a, b) {
        Ok((m, _)) => Some(m),
        Err(DsError::TotalConflict { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn belief_is_two_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..200 {
        let f = frame(rng.gen_range(1..=4));
        let bel = bel_from_mass(&random_mass(&mut rng, &f));
        for a in 0..=f.full() {
            for b in 0..=f.full() {
                assert!(bel.bel(a | b) + bel.bel(a & b) >= bel.bel(a) + bel.bel(b));
            }
            assert_eq!(bel.pl(a), Rational::from_integer(1.into()) - bel.bel(f.complement(a)));
        }
    }
}

#[test]
fn moebius_inverts_belief() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..200 {
        let f = frame(rng.gen_range(1..=4));
        let m = random_mass(&mut rng, &f);
        let envelope = bel_from_mass(&m).to_envelope();
        assert_eq!(mass_from_bel(&envelope), Representation::Representable(m));
    }
}

#[test]
fn dempster_rule_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let mut associative_checks = 0;
    for _ in 0..100 {
        let f = frame(rng.gen_range(1..=4));
        let (m1, m2, m3) = (random_mass(&mut rng, &f), random_mass(&mut rng, &f), random_mass(&mut rng, &f));
        assert_eq!(combine(&m1, &m2), combine(&m2, &m1));
        assert_eq!(combine(&m1, &MassFunction::vacuous(f.clone())), Some(m1.clone()));
        assert_eq!(combine(&MassFunction::vacuous(f.clone()), &m1), Some(m1.clone()));
        let left = combine(&m1, &m2).and_then(|m| combine(&m, &m3));
        let right = combine(&m2, &m3).and_then(|m| combine(&m1, &m));
        if let (Some(l), Some(r)) = (&left, &right) {
            assert_eq!(l, r);
            associative_checks += 1;
        } else {
            // with total conflict on one side, the other side conflicts too
            assert!(left.is_none() && right.is_none());
        }
    }
    assert!(associative_checks >= 50);
}

#[test]
fn contradictory_certainties_conflict_totally() {
    let f = frame(3);
    let certain = |name: &str| MassFunction::new(f.clone(), [(f.subset(&[name]).unwrap(), ratio(1, 1))]).unwrap();
    let vacuous = MassFunction::vacuous(f.clone());
    assert_eq!(dempster_combine(&certain("a"), &certain("b")), Err(DsError::TotalConflict { source_index: 1 }));
    assert_eq!(
        combine_evidence(&[certain("a"), vacuous, certain("c")]).map(|(m, _)| m),
        Err(DsError::TotalConflict { source_index: 2 })
    );
}
