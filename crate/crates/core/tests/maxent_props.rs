mod common;

use common::{empty_kb, mass_of, random_consistent_kb, random_distribution, random_sentence, world_space};
use cpi_core::kb::linearize_all;
use cpi_core::maxent::entropy;
use cpi_core::rational::to_f64;
use cpi_core::{solve_maxent, CpiAxiom, KnowledgeBase, LinearEntailment, MaxEntOptions, ProbabilityInterval, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Theory whose unconditional bounds cover every one of `hidden`, so any
/// mixture of them is feasible.
fn theory_around(rng: &mut ChaCha8Rng, atoms: usize, hidden: &[Vec<Rational>]) -> KnowledgeBase {
    let mut kb = empty_kb(atoms);
    let ws = world_space(&kb);
    let ten = Rational::from_integer(10.into());
    for _ in 0..rng.gen_range(1..=4) {
        let s = random_sentence(rng, atoms, 2);
        let values: Vec<Rational> = hidden.iter().map(|x| mass_of(&ws, x, &s)).collect();
        let lo = values.iter().min().unwrap();
        let hi = values.iter().max().unwrap();
        let bounds = if lo == hi {
            ProbabilityInterval::point(lo.clone()).unwrap()
        } else {
            ProbabilityInterval::new((lo * &ten).floor() / &ten, (hi * &ten).ceil() / &ten).unwrap()
        };
        kb.axioms.push(CpiAxiom::unconditional(s, bounds));
    }
    kb
}

fn mixture(rng: &mut ChaCha8Rng, hidden: &[Vec<Rational>]) -> Vec<f64> {
    let w: Vec<f64> = hidden.iter().map(|_| rng.gen::<f64>()).collect();
    let total: f64 = w.iter().sum();
    (0..hidden[0].len()).map(|i| hidden.iter().zip(&w).map(|(x, wi)| to_f64(&x[i]) * wi / total).sum()).collect()
}

#[test]
fn maxent_beats_sampled_feasible_distributions() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let opts = MaxEntOptions::default();
    for _ in 0..20 {
        let atoms = rng.gen_range(1..=3);
        let worlds = 1 << atoms;
        let k = rng.gen_range(1..=3);
        let hidden: Vec<Vec<Rational>> = (0..k).map(|_| random_distribution(&mut rng, worlds, 20)).collect();
        let kb = theory_around(&mut rng, atoms, &hidden);
        let ws = world_space(&kb);
        let sol = solve_maxent(&kb, &ws, &opts).unwrap();
        assert!(sol.converged && sol.kkt_residual < 1e-8, "residual {}", sol.kkt_residual);
        for _ in 0..1000 {
            let x = mixture(&mut rng, &hidden);
            assert!(sol.entropy >= entropy(&x) - 1e-9, "{} < {}", sol.entropy, entropy(&x));
        }
    }
}

#[test]
fn maxent_is_feasible_and_inside_entailed_intervals() {
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    let opts = MaxEntOptions::default();
    for _ in 0..60 {
        let atoms = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=5);
        let kb = random_consistent_kb(&mut rng, atoms, n, true);
        let ws = world_space(&kb);
        let sol = solve_maxent(&kb, &ws, &opts).unwrap();
        assert!(sol.converged && sol.kkt_residual < 1e-8, "residual {}", sol.kkt_residual);
        let sum: f64 = sol.distribution.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9 && sol.distribution.iter().all(|&p| p >= 0.0));
        for row in linearize_all(&kb.axioms, &ws).unwrap() {
            assert!(row.violation_f64(&sol.distribution) <= 1e-9, "{row:?}");
        }
        let lin = LinearEntailment::new(&kb, &ws).unwrap();
        for _ in 0..5 {
            let t = random_sentence(&mut rng, atoms, 2);
            let iv = lin.entail_unconditional(&t).unwrap().interval.unwrap();
            let p = sol.probability(&ws.extension(&t).unwrap());
            assert!(to_f64(iv.lower()) - 1e-9 <= p && p <= to_f64(iv.upper()) + 1e-9, "{t}: {p} outside {iv}");
        }
    }
}

#[test]
fn no_constraints_gives_uniform() {
    for atoms in 1..=5 {
        let kb = empty_kb(atoms);
        let ws = world_space(&kb);
        let sol = solve_maxent(&kb, &ws, &MaxEntOptions::default()).unwrap();
        let u = 1.0 / ws.len() as f64;
        assert!(sol.distribution.iter().all(|p| (p - u).abs() < 1e-12));
        assert!((sol.entropy - (ws.len() as f64).ln()).abs() < 1e-12);
    }
}
