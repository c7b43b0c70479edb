//! Brute-force reference solvers for checking entailment results.
//!
//! Both build their constraints straight from the axioms and world
//! extensions; neither touches the simplex code or the linearisation.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::interval::ProbabilityInterval;
use crate::kb::{AssumptionConstraint, KnowledgeBase};
use crate::logic::{LogicError, Sentence, WorldSpace};
use crate::rational::{ratio, Rational};

pub const GRID_WORLD_LIMIT: usize = 5;
pub const VERTEX_COMBINATION_LIMIT: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("grid search handles at most {limit} worlds, not {worlds}")]
    TooManyWorlds { worlds: usize, limit: usize },
    #[error("vertex enumeration would examine {count} subsystems (limit {limit})")]
    TooManyCombinations { count: u128, limit: u128 },
    #[error("grid step must be 1/n for a positive integer n")]
    InvalidStep,
    #[error("vertex enumeration handles linear constraints only")]
    NonLinear,
    #[error("a bound does not fit in the grid's integer arithmetic")]
    Overflow,
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// What an oracle concludes about a query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleBounds {
    Interval(ProbabilityInterval),
    VacuousByZeroAntecedent,
    Infeasible,
}

impl OracleBounds {
    pub fn interval(&self) -> Option<&ProbabilityInterval> {
        match self {
            OracleBounds::Interval(i) => Some(i),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSearchConfig {
    pub step: Rational,
    /// Allowed violation of an assumption constraint, which a product of
    /// grid masses can rarely meet exactly. Axioms are always exact.
    pub slack: Rational,
    /// Rounds of local search on a grid ten times finer around the best
    /// points found so far.
    pub refinements: u32,
}

impl Default for GridSearchConfig {
    fn default() -> Self {
        GridSearchConfig { step: ratio(1, 200), slack: ratio(1, 100), refinements: 0 }
    }
}

impl GridSearchConfig {
    /// Grid whose denominator is the least multiple of every axiom bound's
    /// denominator that is at least `resolution`, so that point ratios such
    /// as 1/11 lie on the grid.
    pub fn aligned(kb: &KnowledgeBase, resolution: u64) -> Self {
        let l = kb
            .axioms
            .iter()
            .flat_map(|a| [a.bounds.lower().denom(), a.bounds.upper().denom()])
            .fold(BigInt::one(), |l, d| l.lcm(d));
        let n = BigInt::from(resolution.max(1)).div_ceil(&l) * &l;
        GridSearchConfig { step: Rational::new(BigInt::one(), n), ..GridSearchConfig::default() }
    }
}

/// Each refinement multiplies the grid denominator by this factor.
const REFINE_FACTOR: i128 = 10;
/// Half-width, in fine steps, of the box searched around a best point.
const REFINE_RADIUS: i128 = 10;
/// Recentrings allowed per refinement round.
const REFINE_MOVES: usize = 200;

fn mask(ext: &BTreeSet<usize>) -> u32 {
    ext.iter().fold(0, |m, &i| m | (1 << i))
}

fn small(r: &Rational) -> Result<(i128, i128), OracleError> {
    match (r.numer().to_i128(), r.denom().to_i128()) {
        (Some(n), Some(d)) if n.abs() < 1 << 40 && d < 1 << 40 => Ok((n, d)),
        _ => Err(OracleError::Overflow),
    }
}

/// `q <= n_ab / n_b <= r`, checked as `n_ab·den >= num·n_b` etc.
struct GridAxiom {
    ab: u32,
    b: u32,
    lower: Option<(i128, i128)>,
    upper: Option<(i128, i128)>,
}

enum GridAssumption {
    /// `|a·b − c·d| <= slack`; the full mask stands for the constant one.
    Equal([u32; 4]),
    /// `a·b <= c·d + slack`.
    AtMost([u32; 4]),
}

/// Constraints and query as world masks, evaluated on integer counts.
struct GridProblem {
    axioms: Vec<GridAxiom>,
    assumptions: Vec<GridAssumption>,
    slack: (i128, i128),
    given: u32,
    target: u32,
}

fn sum(counts: &[i128], mask: u32) -> i128 {
    counts.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, c)| c).sum()
}

/// `a/b < c/d` for positive denominators.
fn less((a, b): (i128, i128), (c, d): (i128, i128)) -> bool {
    a * d < c * b
}

enum Point {
    Infeasible,
    ZeroAntecedent,
    Ratio(i128, i128),
}

impl GridProblem {
    fn new(kb: &KnowledgeBase, ws: &WorldSpace, target: &Sentence, given: &Sentence, cfg: &GridSearchConfig) -> Result<Self, OracleError> {
        let full = (1u32 << ws.len()) - 1;
        let m = |s: &Sentence| -> Result<u32, OracleError> { Ok(mask(&ws.extension(s)?)) };
        let mut axioms = Vec::new();
        for a in &kb.axioms {
            let b = m(&a.antecedent)?;
            let lo = a.bounds.lower();
            let hi = a.bounds.upper();
            axioms.push(GridAxiom {
                ab: m(&a.consequent)? & b,
                b,
                lower: if lo.is_zero() { None } else { Some(small(lo)?) },
                upper: if hi.is_one() { None } else { Some(small(hi)?) },
            });
        }
        let mut assumptions = Vec::new();
        for a in &kb.assumptions {
            assumptions.push(match a {
                AssumptionConstraint::CondIndependence { left, right, given } => {
                    let g = m(given)?;
                    let (c, d) = (m(left)?, m(right)?);
                    GridAssumption::Equal([c & d & g, g, c & g, d & g])
                }
                AssumptionConstraint::NegativeCorrelation(x, y) => {
                    let (x, y) = (m(x)?, m(y)?);
                    GridAssumption::AtMost([x & y, full, x, y])
                }
                AssumptionConstraint::PositiveCorrelation(x, y) => {
                    let (x, y) = (m(x)?, m(y)?);
                    GridAssumption::AtMost([x, y, x & y, full])
                }
            });
        }
        let g = m(given)?;
        Ok(GridProblem { axioms, assumptions, slack: small(&cfg.slack)?, given: g, target: m(target)? & g })
    }

    /// Counts are masses times `n`.
    fn eval(&self, counts: &[i128], n: i128) -> Point {
        for a in &self.axioms {
            let (nab, nb) = (sum(counts, a.ab), sum(counts, a.b));
            if a.lower.is_some_and(|(q, d)| nab * d < q * nb) || a.upper.is_some_and(|(r, d)| nab * d > r * nb) {
                return Point::Infeasible;
            }
        }
        let (sn, sd) = self.slack;
        for a in &self.assumptions {
            // products are over n², slack over 1: compare p·sd against sn·n²
            let (GridAssumption::Equal(ms) | GridAssumption::AtMost(ms)) = a;
            let v: Vec<i128> = ms.iter().map(|&mk| sum(counts, mk)).collect();
            let (l, r, s) = (v[0] * v[1] * sd, v[2] * v[3] * sd, sn * n * n);
            let ok = match a {
                GridAssumption::Equal(_) => (l - r).abs() <= s,
                GridAssumption::AtMost(_) => l <= r + s,
            };
            if !ok {
                return Point::Infeasible;
            }
        }
        match sum(counts, self.given) {
            0 => Point::ZeroAntecedent,
            den => Point::Ratio(sum(counts, self.target), den),
        }
    }
}

/// Best ratio so far and the counts attaining it.
struct Extreme {
    value: (i128, i128),
    at: Vec<i128>,
}

/// Grid search over distributions with masses in multiples of `cfg.step`,
/// keeping points that satisfy every axiom exactly and every assumption
/// within `cfg.slack`. Refinement rounds hill-climb on finer grids from the
/// coarse extremes, so the result stays inside the true interval.
pub fn grid_bounds(
    kb: &KnowledgeBase,
    ws: &WorldSpace,
    target: &Sentence,
    given: &Sentence,
    cfg: &GridSearchConfig,
) -> Result<OracleBounds, OracleError> {
    let worlds = ws.len();
    if worlds > GRID_WORLD_LIMIT {
        return Err(OracleError::TooManyWorlds { worlds, limit: GRID_WORLD_LIMIT });
    }
    if !cfg.step.is_positive() || !cfg.step.numer().is_one() {
        return Err(OracleError::InvalidStep);
    }
    let mut n = cfg.step.denom().to_i128().filter(|&n| n < 1 << 40).ok_or(OracleError::Overflow)?;
    let finest = (0..cfg.refinements).try_fold(n, |m, _| m.checked_mul(REFINE_FACTOR).filter(|&m| m < 1 << 40));
    if finest.is_none() {
        return Err(OracleError::Overflow);
    }
    let problem = GridProblem::new(kb, ws, target, given, cfg)?;

    let mut counts = vec![0i128; worlds];
    let mut lo: Option<Extreme> = None;
    let mut hi: Option<Extreme> = None;
    let mut any_feasible = false;
    compositions(&mut counts, 0, n, &mut |counts: &[i128]| match problem.eval(counts, n) {
        Point::Infeasible => {}
        Point::ZeroAntecedent => any_feasible = true,
        Point::Ratio(num, den) => {
            any_feasible = true;
            if lo.as_ref().is_none_or(|e| less((num, den), e.value)) {
                lo = Some(Extreme { value: (num, den), at: counts.to_vec() });
            }
            if hi.as_ref().is_none_or(|e| less(e.value, (num, den))) {
                hi = Some(Extreme { value: (num, den), at: counts.to_vec() });
            }
        }
    });
    let (Some(mut lo), Some(mut hi)) = (lo, hi) else {
        return Ok(if any_feasible { OracleBounds::VacuousByZeroAntecedent } else { OracleBounds::Infeasible });
    };
    for _ in 0..cfg.refinements {
        n *= REFINE_FACTOR;
        for e in [&mut lo, &mut hi] {
            e.at.iter_mut().for_each(|c| *c *= REFINE_FACTOR);
        }
        climb(&problem, n, &mut lo, less);
        climb(&problem, n, &mut hi, |a, b| less(b, a));
    }
    Ok(OracleBounds::Interval(
        ProbabilityInterval::new(ratio_i128(lo.value), ratio_i128(hi.value)).expect("grid ratios are probabilities"),
    ))
}

/// Moves `best` to the most `better` feasible point in the box around it
/// until no point in the box improves on it.
fn climb(problem: &GridProblem, n: i128, best: &mut Extreme, better: impl Fn((i128, i128), (i128, i128)) -> bool) {
    let worlds = best.at.len();
    for _ in 0..REFINE_MOVES {
        let center = best.at.clone();
        let mut improved = false;
        let mut counts = vec![0i128; worlds];
        let mut offsets = vec![-REFINE_RADIUS; worlds.saturating_sub(1)];
        loop {
            for (i, d) in offsets.iter().enumerate() {
                counts[i] = center[i] + d;
            }
            let rest: i128 = counts[..worlds - 1].iter().sum();
            counts[worlds - 1] = n - rest;
            if counts.iter().all(|&c| c >= 0) {
                if let Point::Ratio(num, den) = problem.eval(&counts, n) {
                    if better((num, den), best.value) {
                        *best = Extreme { value: (num, den), at: counts.clone() };
                        improved = true;
                    }
                }
            }
            // odometer over the offset box
            let Some(pos) = offsets.iter().position(|&d| d < REFINE_RADIUS) else { break };
            offsets[pos] += 1;
            offsets[..pos].iter_mut().for_each(|d| *d = -REFINE_RADIUS);
        }
        if !improved {
            return;
        }
    }
}

fn ratio_i128((n, d): (i128, i128)) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn compositions(counts: &mut [i128], at: usize, left: i128, visit: &mut impl FnMut(&[i128])) {
    if at + 1 == counts.len() {
        counts[at] = left;
        visit(counts);
        return;
    }
    for c in 0..=left {
        counts[at] = c;
        compositions(counts, at + 1, left - c, visit);
    }
}

/// Gaussian elimination to reduced row echelon form; returns pivot columns.
fn rref(rows: &mut [Vec<Rational>]) -> Vec<usize> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves the augmented rows `[A | b]` when the solution is unique.
fn unique_solution(mut rows: Vec<Vec<Rational>>, vars: usize) -> Option<Vec<Rational>> {
    let pivots = rref(&mut rows);
    if pivots.contains(&vars) || pivots.len() != vars {
        return None;
    }
    Some((0..vars).map(|i| rows[i][vars].clone()).collect())
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Polyhedron `E·z = e`, `G·z >= 0` with `z >= 0` folded into `G`.
struct Polyhedron {
    vars: usize,
    /// Rows with the right-hand side in the last column.
    equalities: Vec<Vec<Rational>>,
    inequalities: Vec<Vec<Rational>>,
}

impl Polyhedron {
    /// Objective values at every vertex; `None` when the polyhedron is empty.
    fn vertex_extremes(&self, objective: &[Rational]) -> Result<Option<(Rational, Rational)>, OracleError> {
        let mut eq = self.equalities.clone();
        let rank_eq = rref(&mut eq).len();
        let eq: Vec<Vec<Rational>> = eq.into_iter().take(rank_eq).collect();
        let k = self.vars - rank_eq;
        let count = binomial(self.inequalities.len(), k);
        if count > VERTEX_COMBINATION_LIMIT {
            return Err(OracleError::TooManyCombinations { count, limit: VERTEX_COMBINATION_LIMIT });
        }
        let mut best: Option<(Rational, Rational)> = None;
        let mut chosen: Vec<usize> = (0..k).collect();
        loop {
            if k <= self.inequalities.len() {
                let mut rows = eq.clone();
                for &i in &chosen {
                    rows.push(self.inequalities[i].clone());
                }
                if let Some(z) = unique_solution(rows, self.vars) {
                    let feasible = self.inequalities.iter().all(|g| {
                        let v: Rational = g[..self.vars].iter().zip(&z).map(|(a, b)| a * b).sum();
                        v >= g[self.vars]
                    });
                    if feasible {
                        let v: Rational = objective.iter().zip(&z).map(|(a, b)| a * b).sum();
                        best = Some(match best {
                            None => (v.clone(), v),
                            Some((lo, hi)) => (lo.min(v.clone()), hi.max(v)),
                        });
                    }
                }
            } else {
                break;
            }
            // next k-combination in lexicographic order
            let m = self.inequalities.len();
            let Some(pos) = (0..k).rev().find(|&i| chosen[i] < m - k + i) else { break };
            chosen[pos] += 1;
            for j in pos + 1..k {
                chosen[j] = chosen[j - 1] + 1;
            }
        }
        Ok(best)
    }
}

fn indicator(ext: &BTreeSet<usize>, worlds: usize, extra: usize) -> Vec<Rational> {
    (0..worlds + extra).map(|i| if ext.contains(&i) { Rational::one() } else { Rational::zero() }).collect()
}

/// Homogeneous axiom rows `a·x (>=|=) 0` over the worlds.
fn axiom_rows(kb: &KnowledgeBase, ws: &WorldSpace) -> Result<(Vec<Vec<Rational>>, Vec<Vec<Rational>>), OracleError> {
    let n = ws.len();
    let (mut eq, mut ge) = (Vec::new(), Vec::new());
    for a in &kb.axioms {
        let b = ws.extension(&a.antecedent)?;
        let ab: BTreeSet<usize> = ws.extension(&a.consequent)?.intersection(&b).copied().collect();
        let row = |t: &Rational| -> Vec<Rational> {
            (0..n)
                .map(|i| {
                    let mut v = Rational::zero();
                    if ab.contains(&i) {
                        v += Rational::one();
                    }
                    if b.contains(&i) {
                        v -= t;
                    }
                    v
                })
                .collect()
        };
        let (q, r) = (a.bounds.lower(), a.bounds.upper());
        if q == r {
            eq.push(row(q));
            continue;
        }
        if q.is_positive() {
            ge.push(row(q));
        }
        if !r.is_one() {
            ge.push(row(r).into_iter().map(|v| -v).collect());
        }
    }
    Ok((eq, ge))
}

/// Exact bounds by enumerating the vertices of the feasible polytope (and of
/// its Charnes-Cooper image for conditional queries).
pub fn vertex_bounds(kb: &KnowledgeBase, ws: &WorldSpace, target: &Sentence, given: &Sentence) -> Result<OracleBounds, OracleError> {
    if !kb.assumptions.is_empty() {
        return Err(OracleError::NonLinear);
    }
    let n = ws.len();
    let (eq, ge) = axiom_rows(kb, ws)?;
    let with_rhs = |row: &[Rational], extra: usize, rhs: Rational| -> Vec<Rational> {
        let mut r = row.to_vec();
        r.resize(n + extra, Rational::zero());
        r.push(rhs);
        r
    };
    let unit = |i: usize, vars: usize| -> Vec<Rational> {
        let mut r = vec![Rational::zero(); vars + 1];
        r[i] = Rational::one();
        r
    };

    let g_ext = ws.extension(given)?;
    let t_ext: BTreeSet<usize> = ws.extension(target)?.intersection(&g_ext).copied().collect();

    // distributions over the worlds
    let mut plain = Polyhedron { vars: n, equalities: Vec::new(), inequalities: Vec::new() };
    plain.equalities.push(with_rhs(&vec![Rational::one(); n], 0, Rational::one()));
    plain.equalities.extend(eq.iter().map(|r| with_rhs(r, 0, Rational::zero())));
    plain.inequalities.extend(ge.iter().map(|r| with_rhs(r, 0, Rational::zero())));
    plain.inequalities.extend((0..n).map(|i| unit(i, n)));

    if given.is_true_literal() || g_ext.len() == n {
        return Ok(match plain.vertex_extremes(&indicator(&t_ext, n, 0))? {
            None => OracleBounds::Infeasible,
            Some((lo, hi)) => OracleBounds::Interval(ProbabilityInterval::new(lo, hi).expect("probabilities")),
        });
    }
    match plain.vertex_extremes(&indicator(&g_ext, n, 0))? {
        None => return Ok(OracleBounds::Infeasible),
        Some((_, hi)) if hi.is_zero() => return Ok(OracleBounds::VacuousByZeroAntecedent),
        Some(_) => {}
    }

    // y = t·x with Σ_given y = 1
    let vars = n + 1;
    let mut cc = Polyhedron { vars, equalities: Vec::new(), inequalities: Vec::new() };
    let mut norm = vec![Rational::one(); n];
    norm.push(-Rational::one());
    norm.push(Rational::zero());
    cc.equalities.push(norm);
    cc.equalities.push(with_rhs(&indicator(&g_ext, n, 0), 1, Rational::one()));
    cc.equalities.extend(eq.iter().map(|r| with_rhs(r, 1, Rational::zero())));
    cc.inequalities.extend(ge.iter().map(|r| with_rhs(r, 1, Rational::zero())));
    cc.inequalities.extend((0..vars).map(|i| unit(i, vars)));
    Ok(match cc.vertex_extremes(&indicator(&t_ext, n, 1))? {
        None => OracleBounds::Infeasible,
        Some((lo, hi)) => OracleBounds::Interval(ProbabilityInterval::new(lo, hi).expect("probabilities")),
    })
}
