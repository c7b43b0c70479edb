mod common;

use common::{random_consistent_kb, random_sentence, world_space};
use cpi_core::oracle::{grid_bounds, GridSearchConfig, OracleBounds};
use cpi_core::rational::ratio;
use cpi_core::{AssumptionConstraint, AugmentedEntailment, AugmentedOptions, EntailError, LinearEntailment, Rational, Sentence};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_assumption(rng: &mut ChaCha8Rng, atoms: usize) -> AssumptionConstraint {
    let a = random_sentence(rng, atoms, 1);
    let b = random_sentence(rng, atoms, 1);
    match rng.gen_range(0..3) {
        0 => AssumptionConstraint::CondIndependence { left: a, right: b, given: Sentence::True },
        1 => AssumptionConstraint::PositiveCorrelation(a, b),
        _ => AssumptionConstraint::NegativeCorrelation(a, b),
    }
}

#[test]
fn branch_and_bound_is_sound_against_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let opts = AugmentedOptions { tolerance: ratio(1, 1000), node_cap: 2000 };
    let grid = GridSearchConfig { step: ratio(1, 40), slack: Rational::zero(), refinements: 0 };
    let mut compared = 0;
    for _ in 0..40 {
        let n = rng.gen_range(1..=3);
        let mut kb = random_consistent_kb(&mut rng, 2, n, false);
        kb.assumptions.push(random_assumption(&mut rng, 2));
        let ws = world_space(&kb);
        let t = random_sentence(&mut rng, 2, 2);
        let aug = AugmentedEntailment::new(&kb, &ws).unwrap();
        let outer = match aug.entail(&t, &Sentence::True, &opts) {
            Ok(r) => r.result.interval.unwrap(),
            Err(EntailError::InfeasibleAugmented) => {
                // no exactly feasible grid point may exist either
                let g = grid_bounds(&kb, &ws, &t, &Sentence::True, &grid).unwrap();
                assert_eq!(g, OracleBounds::Infeasible);
                continue;
            }
            Err(e) => panic!("{e}"),
        };
        if let OracleBounds::Interval(inner) = grid_bounds(&kb, &ws, &t, &Sentence::True, &grid).unwrap() {
            assert!(outer.is_superset_of(&inner), "{t}: bound {outer} misses grid {inner}");
            compared += 1;
        }
    }
    assert!(compared >= 20, "only {compared} comparisons");
}

#[test]
fn assumptions_only_narrow_the_linear_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let opts = AugmentedOptions { tolerance: ratio(1, 1000), node_cap: 2000 };
    for _ in 0..40 {
        let atoms = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=3);
        let mut kb = random_consistent_kb(&mut rng, atoms, n, true);
        let linear_kb = kb.clone();
        kb.assumptions.push(random_assumption(&mut rng, atoms));
        let ws = world_space(&kb);
        let t = random_sentence(&mut rng, atoms, 2);
        let lin = LinearEntailment::new(&linear_kb, &ws).unwrap().entail_unconditional(&t).unwrap();
        match AugmentedEntailment::new(&kb, &ws).unwrap().entail(&t, &Sentence::True, &opts) {
            Ok(r) => {
                let (l, a) = (lin.interval.unwrap(), r.result.interval.unwrap());
                assert!(l.is_superset_of(&a), "{t}: linear {l} augmented {a}");
            }
            Err(EntailError::InfeasibleAugmented) => {}
            Err(e) => panic!("{e}"),
        }
    }
}
