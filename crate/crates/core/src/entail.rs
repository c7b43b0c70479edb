//! Tightest entailed probability intervals under linear constraints.
//!
//! Conditional queries `p(target | given)` are linear-fractional in the world
//! probabilities. They are solved through the homogenising substitution
//! `y = x / p(given)`, `t = 1 / p(given)`: every constraint `a·x ~ b` becomes
//! `a·y − b·t ~ 0`, normalisation becomes `Σy = t`, and `Σ_given y = 1` fixes
//! the scale. Every feasible point of the transformed program has `t > 0`, so
//! it maps back to a genuine distribution with positive antecedent mass.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::interval::ProbabilityInterval;
use crate::kb::{linearize_all, KnowledgeBase, LinearConstraint, Query, Relation};
use crate::logic::{LogicError, Sentence, WorldSpace};
use crate::rational::Rational;
use crate::simplex::{solve, LpOutcome, LpProblem, Sense};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EntailError {
    #[error("the knowledge base is inconsistent: no distribution satisfies its axioms")]
    InfeasibleKb,
    #[error("the knowledge base together with its assumptions is inconsistent")]
    InfeasibleAugmented,
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryStatus {
    Determined,
    /// Every admissible distribution gives the antecedent probability zero.
    VacuousByZeroAntecedent,
    Infeasible,
}

impl QueryStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            QueryStatus::Determined => "determined",
            QueryStatus::VacuousByZeroAntecedent => "vacuous_by_zero_antecedent",
            QueryStatus::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Lp,
    BranchAndBound,
    Propagation,
    MaxEnt,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Lp => "lp",
            Method::BranchAndBound => "branch-and-bound",
            Method::Propagation => "propagation",
            Method::MaxEnt => "maxent",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub lp_solves: usize,
    pub lp_pivots: usize,
    pub bnb_nodes: usize,
}

impl SolveStats {
    pub fn absorb(&mut self, other: SolveStats) {
        self.lp_solves += other.lp_solves;
        self.lp_pivots += other.lp_pivots;
        self.bnb_nodes += other.bnb_nodes;
    }

    pub(crate) fn record(&mut self, outcome: &LpOutcome) {
        self.lp_solves += 1;
        self.lp_pivots += outcome.pivots();
    }
}

/// Whether each endpoint is the value of some admissible distribution, as
/// opposed to an outer bound that may only be approached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Attainment {
    pub lower: bool,
    pub upper: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    /// Absent exactly when `status` is `Infeasible`.
    pub interval: Option<ProbabilityInterval>,
    pub status: QueryStatus,
    pub attained: Attainment,
    pub method: Method,
    pub stats: SolveStats,
}

impl QueryResult {
    pub(crate) fn vacuous(method: Method, stats: SolveStats) -> Self {
        QueryResult {
            interval: Some(ProbabilityInterval::vacuous()),
            status: QueryStatus::VacuousByZeroAntecedent,
            attained: Attainment { lower: false, upper: false },
            method,
            stats,
        }
    }
}

/// Linear system over `num_vars` variables whose first `worlds` entries are
/// world probabilities; normalisation `Σ worlds = 1` is implicit.
#[derive(Debug, Clone)]
pub(crate) struct LinearSystem {
    pub num_vars: usize,
    pub worlds: usize,
    pub constraints: Vec<LinearConstraint>,
}

#[derive(Debug, Clone)]
pub(crate) enum RatioOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
}

pub(crate) fn sum_row(indices: impl IntoIterator<Item = usize>) -> BTreeMap<usize, Rational> {
    indices.into_iter().map(|i| (i, Rational::one())).collect()
}

impl LinearSystem {
    /// Optimises `Σ_numer x` (unconditional, `denom = None`) or
    /// `Σ_numer x / Σ_denom x` over the system. For ratios the caller must
    /// already know some feasible point has positive denominator; otherwise
    /// the transformed program is reported infeasible.
    pub fn optimize(
        &self,
        numer: &BTreeSet<usize>,
        denom: Option<&BTreeSet<usize>>,
        sense: Sense,
        stats: &mut SolveStats,
    ) -> RatioOutcome {
        let outcome = match denom {
            None => {
                let mut constraints = self.constraints.clone();
                constraints.push(LinearConstraint::new(sum_row(0..self.worlds), Relation::Eq, Rational::one()));
                let p = LpProblem { num_vars: self.num_vars, constraints, objective: sum_row(numer.iter().copied()), sense };
                let out = solve(&p);
                stats.record(&out);
                match out {
                    LpOutcome::Optimal(s) => RatioOutcome::Optimal { value: s.value, x: s.x },
                    LpOutcome::Infeasible { .. } => RatioOutcome::Infeasible,
                    LpOutcome::Unbounded { .. } => unreachable!("probability objectives are bounded"),
                }
            }
            Some(denom) => {
                let t = self.num_vars;
                let mut constraints: Vec<LinearConstraint> = self
                    .constraints
                    .iter()
                    .map(|c| {
                        let mut coeffs = c.coefficients.clone();
                        if !c.rhs.is_zero() {
                            coeffs.insert(t, -c.rhs.clone());
                        }
                        LinearConstraint::new(coeffs, c.relation, Rational::zero())
                    })
                    .collect();
                let mut norm = sum_row(0..self.worlds);
                norm.insert(t, -Rational::one());
                constraints.push(LinearConstraint::new(norm, Relation::Eq, Rational::zero()));
                constraints.push(LinearConstraint::new(sum_row(denom.iter().copied()), Relation::Eq, Rational::one()));
                let p = LpProblem { num_vars: t + 1, constraints, objective: sum_row(numer.iter().copied()), sense };
                let out = solve(&p);
                stats.record(&out);
                match out {
                    LpOutcome::Optimal(s) => {
                        let scale = s.x[t].clone();
                        let x = s.x[..t].iter().map(|v| v / &scale).collect();
                        RatioOutcome::Optimal { value: s.value, x }
                    }
                    LpOutcome::Infeasible { .. } => RatioOutcome::Infeasible,
                    LpOutcome::Unbounded { .. } => unreachable!("ratio objective is bounded by one"),
                }
            }
        };
        outcome
    }

    /// Maximum of `objective · x` over the distributions satisfying the system.
    pub fn maximize_linear(&self, objective: &BTreeMap<usize, Rational>, stats: &mut SolveStats) -> Option<Rational> {
        let mut constraints = self.constraints.clone();
        constraints.push(LinearConstraint::new(sum_row(0..self.worlds), Relation::Eq, Rational::one()));
        let p = LpProblem { num_vars: self.num_vars, constraints, objective: objective.clone(), sense: Sense::Maximize };
        let out = solve(&p);
        stats.record(&out);
        match out {
            LpOutcome::Optimal(s) => Some(s.value),
            _ => None,
        }
    }

    pub fn is_feasible(&self, stats: &mut SolveStats) -> bool {
        matches!(self.optimize(&BTreeSet::new(), None, Sense::Minimize, stats), RatioOutcome::Optimal { .. })
    }
}

/// Entailment under the linearised axioms `K` (assumptions are ignored here).
#[derive(Debug, Clone)]
pub struct LinearEntailment<'a> {
    kb: &'a KnowledgeBase,
    ws: &'a WorldSpace,
    system: LinearSystem,
}

impl<'a> LinearEntailment<'a> {
    pub fn new(kb: &'a KnowledgeBase, ws: &'a WorldSpace) -> Result<Self, EntailError> {
        let constraints = linearize_all(&kb.axioms, ws)?;
        let system = LinearSystem { num_vars: ws.len(), worlds: ws.len(), constraints };
        Ok(LinearEntailment { kb, ws, system })
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.system.constraints
    }

    pub(crate) fn system(&self) -> &LinearSystem {
        &self.system
    }

    pub fn world_space(&self) -> &WorldSpace {
        self.ws
    }

    /// True iff some distribution over the worlds satisfies every axiom.
    pub fn feasible(&self) -> bool {
        self.system.is_feasible(&mut SolveStats::default())
    }

    pub fn entail_unconditional(&self, target: &Sentence) -> Result<QueryResult, EntailError> {
        let numer = self.ws.extension(target)?;
        let mut stats = SolveStats::default();
        let lo = self.system.optimize(&numer, None, Sense::Minimize, &mut stats);
        let hi = self.system.optimize(&numer, None, Sense::Maximize, &mut stats);
        match (lo, hi) {
            (RatioOutcome::Optimal { value: lo, .. }, RatioOutcome::Optimal { value: hi, .. }) => Ok(QueryResult {
                interval: Some(ProbabilityInterval::new(lo, hi).expect("LP bounds of a probability")),
                status: QueryStatus::Determined,
                attained: Attainment { lower: true, upper: true },
                method: Method::Lp,
                stats,
            }),
            _ => Err(EntailError::InfeasibleKb),
        }
    }

    pub fn entail_conditional(&self, target: &Sentence, given: &Sentence) -> Result<QueryResult, EntailError> {
        let denom = self.ws.extension(given)?;
        let numer: BTreeSet<usize> = self.ws.extension(target)?.intersection(&denom).copied().collect();
        let mut stats = SolveStats::default();
        match self.system.optimize(&denom, None, Sense::Maximize, &mut stats) {
            RatioOutcome::Infeasible => return Err(EntailError::InfeasibleKb),
            RatioOutcome::Optimal { value, .. } if value.is_zero() => {
                return Ok(QueryResult::vacuous(Method::Lp, stats));
            }
            RatioOutcome::Optimal { .. } => {}
        }
        let lo = self.system.optimize(&numer, Some(&denom), Sense::Minimize, &mut stats);
        let hi = self.system.optimize(&numer, Some(&denom), Sense::Maximize, &mut stats);
        match (lo, hi) {
            (RatioOutcome::Optimal { value: lo, .. }, RatioOutcome::Optimal { value: hi, .. }) => Ok(QueryResult {
                interval: Some(ProbabilityInterval::new(lo, hi).expect("LP bounds of a probability")),
                status: QueryStatus::Determined,
                attained: Attainment { lower: true, upper: true },
                method: Method::Lp,
                stats,
            }),
            _ => unreachable!("transformed program is feasible once p(given) > 0 is"),
        }
    }

    pub fn entail_query(&self, q: &Query) -> Result<QueryResult, EntailError> {
        if q.given.is_true_literal() {
            self.entail_unconditional(&q.target)
        } else {
            self.entail_conditional(&q.target, &q.given)
        }
    }

    /// Answers every query registered in the knowledge base, in order.
    pub fn entail_all(&self) -> Result<Vec<(Query, QueryResult)>, EntailError> {
        if !self.feasible() {
            return Err(EntailError::InfeasibleKb);
        }
        self.kb.queries.iter().map(|q| Ok((q.clone(), self.entail_query(q)?))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{parse_kb, CpiAxiom};
    use crate::logic::{parse_sentence, DEFAULT_ATOM_CAP};
    use crate::rational::{int, ratio};

    fn interval(lo: Rational, hi: Rational) -> ProbabilityInterval {
        ProbabilityInterval::new(lo, hi).unwrap()
    }

    fn setup(text: &str) -> (KnowledgeBase, WorldSpace) {
        let kb = parse_kb(text).unwrap();
        let ws = kb.world_space(DEFAULT_ATOM_CAP).unwrap();
        (kb, ws)
    }

    fn s(text: &str) -> Sentence {
        parse_sentence(text).unwrap()
    }

    #[test]
    fn feasibility() {
        let (kb, ws) = setup("atom A\nP(A) = 0.5");
        assert!(LinearEntailment::new(&kb, &ws).unwrap().feasible());
        let (kb, ws) = setup("atom A\nP(A) >= 0.6\nP(A) <= 0.4");
        assert!(!LinearEntailment::new(&kb, &ws).unwrap().feasible());
        let (kb, ws) = setup("atom A");
        assert!(LinearEntailment::new(&kb, &ws).unwrap().feasible());
    }

    #[test]
    fn unconditional_examples() {
        let (kb, ws) = setup("atom A B");
        let e = LinearEntailment::new(&kb, &ws).unwrap();
        assert_eq!(e.entail_unconditional(&s("A")).unwrap().interval, Some(ProbabilityInterval::vacuous()));

        let (kb, ws) = setup("atom A\nP(A) = 0.3");
        let e = LinearEntailment::new(&kb, &ws).unwrap();
        assert_eq!(e.entail_unconditional(&s("!A")).unwrap().interval, Some(interval(ratio(7, 10), ratio(7, 10))));

        let (kb, ws) = setup("atom A B\nP(A) = 0.7\nP(A -> B) = 0.8");
        let e = LinearEntailment::new(&kb, &ws).unwrap();
        assert_eq!(e.entail_unconditional(&s("B")).unwrap().interval, Some(interval(ratio(1, 2), ratio(4, 5))));
    }

    #[test]
    fn conditional_examples() {
        let (kb, ws) = setup("atom A B");
        let e = LinearEntailment::new(&kb, &ws).unwrap();
        let r = e.entail_conditional(&s("A & B"), &s("A & B")).unwrap();
        assert_eq!(r.interval, Some(interval(int(1), int(1))));

        let (kb, ws) = setup("atom A B\nP(B) = 0");
        let e = LinearEntailment::new(&kb, &ws).unwrap();
        let r = e.entail_conditional(&s("A"), &s("B")).unwrap();
        assert_eq!(r.status, QueryStatus::VacuousByZeroAntecedent);
        assert_eq!(r.interval, Some(ProbabilityInterval::vacuous()));

        let (kb, ws) = setup("atom A B\n0.7 <= P(A | B)\nP(B) = 0.5");
        let e = LinearEntailment::new(&kb, &ws).unwrap();
        let r = e.entail_conditional(&s("A & B"), &Sentence::True).unwrap();
        assert_eq!(r.interval, Some(interval(ratio(7, 20), ratio(1, 2))));
        assert_eq!(r, e.entail_unconditional(&s("A & B")).unwrap().with_stats_of(&r));
    }

    #[test]
    fn conditional_ratio_with_vanishing_antecedent_allowed() {
        // p(B) may be zero but need not be; the ratio is bounded over p(B) > 0.
        let (kb, ws) = setup("atom A B\nP(B) <= 0.5\n0.2 <= P(A | B) <= 0.6");
        let e = LinearEntailment::new(&kb, &ws).unwrap();
        let r = e.entail_conditional(&s("A"), &s("B")).unwrap();
        assert_eq!(r.status, QueryStatus::Determined);
        assert_eq!(r.interval, Some(interval(ratio(1, 5), ratio(3, 5))));
    }

    #[test]
    fn entail_all_examples() {
        let (kb, ws) = setup("atom A");
        assert!(LinearEntailment::new(&kb, &ws).unwrap().entail_all().unwrap().is_empty());

        let (kb, ws) = setup("atom A\nP(A) = 0.3\nquery P(A)");
        let all = LinearEntailment::new(&kb, &ws).unwrap().entail_all().unwrap();
        assert_eq!(all[0].1.interval, Some(interval(ratio(3, 10), ratio(3, 10))));

        let (kb, ws) = setup("atom A B\nP(A) = 0.3\nP(B) = 0.5\nquery P((A | B))\nquery P(A & B)");
        let all = LinearEntailment::new(&kb, &ws).unwrap().entail_all().unwrap();
        assert_eq!(all[0].1.interval, Some(interval(ratio(1, 2), ratio(4, 5))));
        assert_eq!(all[1].1.interval, Some(interval(int(0), ratio(3, 10))));

        let (kb, ws) = setup("atom A\nP(A) >= 0.6\nP(A) <= 0.4\nquery P(A)");
        assert_eq!(LinearEntailment::new(&kb, &ws).unwrap().entail_all(), Err(EntailError::InfeasibleKb));
    }

    #[test]
    fn duality_under_negation() {
        let (kb, ws) = setup("atom A B C\n0.2 <= P(A | B) <= 0.9\n0.3 <= P((B | C))\nP(C) <= 0.4");
        let e = LinearEntailment::new(&kb, &ws).unwrap();
        for text in ["A", "A & B", "B | C", "A -> C"] {
            let pos = e.entail_unconditional(&s(text)).unwrap().interval.unwrap();
            let neg = e.entail_unconditional(&s(text).negate()).unwrap().interval.unwrap();
            assert_eq!(neg, pos.complement());
        }
    }

    #[test]
    fn axiom_builder_matches_dsl() {
        let kb = KnowledgeBase::new(vec![crate::logic::Atom::new("A").unwrap()])
            .with_axiom(CpiAxiom::unconditional(s("A"), interval(ratio(3, 10), ratio(3, 10))));
        let ws = kb.world_space(DEFAULT_ATOM_CAP).unwrap();
        let e = LinearEntailment::new(&kb, &ws).unwrap();
        assert_eq!(e.entail_unconditional(&s("A")).unwrap().interval, Some(interval(ratio(3, 10), ratio(3, 10))));
    }

    impl QueryResult {
        fn with_stats_of(mut self, other: &QueryResult) -> QueryResult {
            self.stats = other.stats;
            self
        }
    }
}
