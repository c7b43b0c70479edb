#![allow(dead_code)]

use cpi_core::rational::ratio;
use cpi_core::{Atom, CpiAxiom, KnowledgeBase, ProbabilityInterval, Rational, Sentence, WorldSpace, DEFAULT_ATOM_CAP};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const ATOMS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

pub fn random_sentence(rng: &mut ChaCha8Rng, atoms: usize, depth: u32) -> Sentence {
    if depth == 0 || rng.gen_bool(0.3) {
        return Sentence::var(ATOMS[rng.gen_range(0..atoms)]);
    }
    match rng.gen_range(0..5) {
        0 => random_sentence(rng, atoms, depth - 1).negate(),
        1 => Sentence::and((0..rng.gen_range(2..=3)).map(|_| random_sentence(rng, atoms, depth - 1)).collect()),
        2 => Sentence::or((0..rng.gen_range(2..=3)).map(|_| random_sentence(rng, atoms, depth - 1)).collect()),
        3 => Sentence::implies(random_sentence(rng, atoms, depth - 1), random_sentence(rng, atoms, depth - 1)),
        _ => Sentence::iff(random_sentence(rng, atoms, depth - 1), random_sentence(rng, atoms, depth - 1)),
    }
}

pub fn empty_kb(atoms: usize) -> KnowledgeBase {
    KnowledgeBase { atoms: ATOMS[..atoms].iter().map(|a| Atom::new(*a).unwrap()).collect(), ..KnowledgeBase::default() }
}

pub fn world_space(kb: &KnowledgeBase) -> WorldSpace {
    kb.world_space(DEFAULT_ATOM_CAP).unwrap()
}

/// Random distribution whose masses are multiples of `1/den`.
pub fn random_distribution(rng: &mut ChaCha8Rng, worlds: usize, den: i64) -> Vec<Rational> {
    let mut cuts: Vec<i64> = (0..worlds - 1).map(|_| rng.gen_range(0..=den)).collect();
    cuts.push(0);
    cuts.push(den);
    cuts.sort_unstable();
    cuts.windows(2).map(|w| ratio(w[1] - w[0], den)).collect()
}

pub fn mass_of(ws: &WorldSpace, x: &[Rational], s: &Sentence) -> Rational {
    ws.extension(s).unwrap().iter().map(|&i| x[i].clone()).sum()
}

/// Interval around `v` on a tenths grid, sometimes exactly `[v, v]`.
fn bounds_around(rng: &mut ChaCha8Rng, v: &Rational) -> ProbabilityInterval {
    if rng.gen_bool(0.25) {
        return ProbabilityInterval::point(v.clone()).unwrap();
    }
    let ten = Rational::from_integer(10.into());
    let lo = ((v * &ten).floor() - Rational::from_integer(rng.gen_range(0..2).into())) / &ten;
    let hi = ((v * &ten).ceil() + Rational::from_integer(rng.gen_range(0..2).into())) / &ten;
    let lo = if rng.gen_bool(0.2) { Rational::zero() } else { lo.max(Rational::zero()) };
    let hi = if rng.gen_bool(0.2) { Rational::one() } else { hi.min(Rational::one()) };
    ProbabilityInterval::new(lo, hi).unwrap()
}

/// Theory satisfied by a hidden distribution, so it is always consistent.
pub fn random_consistent_kb(rng: &mut ChaCha8Rng, atoms: usize, axioms: usize, conditional: bool) -> KnowledgeBase {
    consistent_axioms_over(rng, empty_kb(atoms), axioms, conditional)
}

/// Adds axioms to `kb` that a hidden distribution over its worlds satisfies.
pub fn consistent_axioms_over(rng: &mut ChaCha8Rng, mut kb: KnowledgeBase, axioms: usize, conditional: bool) -> KnowledgeBase {
    let atoms = kb.atoms.len();
    let ws = world_space(&kb);
    let x = random_distribution(rng, ws.len(), 20);
    let target = kb.axioms.len() + axioms;
    while kb.axioms.len() < target {
        let a = random_sentence(rng, atoms, 2);
        if conditional && rng.gen_bool(0.4) {
            let b = random_sentence(rng, atoms, 1);
            let pb = mass_of(&ws, &x, &b);
            if pb.is_zero() {
                continue;
            }
            let pab = mass_of(&ws, &x, &Sentence::and(vec![a.clone(), b.clone()]));
            let bounds = bounds_around(rng, &(pab / pb));
            kb.axioms.push(CpiAxiom::conditional(a, b, bounds));
        } else {
            let bounds = bounds_around(rng, &mass_of(&ws, &x, &a));
            kb.axioms.push(CpiAxiom::unconditional(a, bounds));
        }
    }
    kb
}

/// Theory with arbitrary bounds; may be inconsistent.
pub fn random_kb(rng: &mut ChaCha8Rng, atoms: usize, axioms: usize) -> KnowledgeBase {
    let mut kb = empty_kb(atoms);
    for _ in 0..axioms {
        let a = random_sentence(rng, atoms, 2);
        let lo = rng.gen_range(0..=10);
        let hi = rng.gen_range(lo..=10);
        let bounds = ProbabilityInterval::new(ratio(lo, 10), ratio(hi, 10)).unwrap();
        if rng.gen_bool(0.3) {
            kb.axioms.push(CpiAxiom::conditional(a, random_sentence(rng, atoms, 1), bounds));
        } else {
            kb.axioms.push(CpiAxiom::unconditional(a, bounds));
        }
    }
    kb
}
