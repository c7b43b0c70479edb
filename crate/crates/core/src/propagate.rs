//! Local interval propagation over a finite set of tracked sentences.
//!
//! Sound rules: negation, Fréchet bounds for conjunction and disjunction, and
//! forward chaining through conditional axioms. The fuzzy min/max rule is
//! available for comparison but is unsound in general.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::entail::{EntailError, LinearEntailment};
use crate::interval::ProbabilityInterval;
use crate::kb::{CpiAxiom, KnowledgeBase};
use crate::logic::{Sentence, WorldSpace};
use crate::rational::Rational;

pub const DEFAULT_SWEEP_CAP: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Axiom,
    Negation,
    FrechetConjunction,
    FrechetDisjunction,
    ConditionalChain,
    Fuzzy,
}

impl Rule {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::Axiom => "axiom",
            Rule::Negation => "negation",
            Rule::FrechetConjunction => "frechet-conjunction",
            Rule::FrechetDisjunction => "frechet-disjunction",
            Rule::ConditionalChain => "conditional-chain",
            Rule::Fuzzy => "fuzzy",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropagationError {
    #[error("{rule} rule empties the interval of {sentence}: {existing} against derived [{lower}, {upper}]")]
    Inconsistent { rule: Rule, sentence: Sentence, existing: ProbabilityInterval, lower: Rational, upper: Rational },
    #[error("the fuzzy rule needs point values; {sentence} has {interval}")]
    NonPoint { sentence: Sentence, interval: ProbabilityInterval },
    #[error("the fuzzy rule cannot run together with the Fréchet rules")]
    ConflictingRules,
    #[error("unknown rule `{0}` (expected negation, frechet, frechet_conj, frechet_disj, chain, fuzzy or sound)")]
    UnknownRule(String),
    #[error("{0} is not tracked")]
    Untracked(Sentence),
    #[error("{0} appears in only one of the tables being compared")]
    CoverageMismatch(Sentence),
}

/// Which rule families run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleSet {
    pub negation: bool,
    pub frechet_conjunction: bool,
    pub frechet_disjunction: bool,
    pub conditional_chain: bool,
    pub fuzzy_minmax: bool,
}

impl RuleSet {
    /// Every sound family, no fuzzy rule.
    pub fn sound() -> Self {
        RuleSet { negation: true, frechet_conjunction: true, frechet_disjunction: true, conditional_chain: true, fuzzy_minmax: false }
    }

    pub fn none() -> Self {
        RuleSet { negation: false, frechet_conjunction: false, frechet_disjunction: false, conditional_chain: false, fuzzy_minmax: false }
    }

    pub fn validate(&self) -> Result<(), PropagationError> {
        if self.fuzzy_minmax && (self.frechet_conjunction || self.frechet_disjunction) {
            return Err(PropagationError::ConflictingRules);
        }
        Ok(())
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        Self::sound()
    }
}

impl FromStr for RuleSet {
    type Err = PropagationError;

    /// Comma-separated families; empty means the sound set.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Ok(Self::sound());
        }
        let mut r = Self::none();
        for part in s.split(',').map(str::trim) {
            match part {
                "negation" => r.negation = true,
                "frechet" => {
                    r.frechet_conjunction = true;
                    r.frechet_disjunction = true;
                }
                "frechet_conj" => r.frechet_conjunction = true,
                "frechet_disj" => r.frechet_disjunction = true,
                "chain" => r.conditional_chain = true,
                "fuzzy" => r.fuzzy_minmax = true,
                "sound" => {
                    let fuzzy = r.fuzzy_minmax;
                    r = Self::sound();
                    r.fuzzy_minmax = fuzzy;
                }
                other => return Err(PropagationError::UnknownRule(other.to_string())),
            }
        }
        r.validate()?;
        Ok(r)
    }
}

/// Flattens nested conjunctions and disjunctions and sorts their operands,
/// so syntactic variants of the same formula share one table entry.
pub fn canonical(s: &Sentence) -> Sentence {
    fn gather(s: &Sentence, conj: bool, out: &mut BTreeSet<Sentence>) {
        match (s, conj) {
            (Sentence::And(ps), true) | (Sentence::Or(ps), false) => {
                for p in ps {
                    gather(p, conj, out);
                }
            }
            _ => {
                out.insert(canonical(s));
            }
        }
    }
    match s {
        Sentence::And(_) | Sentence::Or(_) => {
            let conj = matches!(s, Sentence::And(_));
            let mut parts = BTreeSet::new();
            gather(s, conj, &mut parts);
            let parts: Vec<Sentence> = parts.into_iter().collect();
            if conj {
                Sentence::and(parts)
            } else {
                Sentence::or(parts)
            }
        }
        Sentence::Not(x) => Sentence::Not(Box::new(canonical(x))),
        Sentence::Implies(a, b) => Sentence::Implies(Box::new(canonical(a)), Box::new(canonical(b))),
        Sentence::Iff(a, b) => Sentence::Iff(Box::new(canonical(a)), Box::new(canonical(b))),
        other => other.clone(),
    }
}

/// Canonical negation: `¬¬s` is `s`.
fn negation_of(s: &Sentence) -> Sentence {
    match s {
        Sentence::Not(x) => (**x).clone(),
        other => Sentence::Not(Box::new(other.clone())),
    }
}

/// Current interval for every tracked sentence, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsTable {
    entries: BTreeMap<Sentence, ProbabilityInterval>,
    order: Vec<Sentence>,
}

impl BoundsTable {
    /// Every sentence starts at `[0, 1]`.
    pub fn new<'a>(tracked: impl IntoIterator<Item = &'a Sentence>) -> Self {
        let mut t = BoundsTable { entries: BTreeMap::new(), order: Vec::new() };
        for s in tracked {
            t.track(s);
        }
        t
    }

    pub fn track(&mut self, s: &Sentence) {
        let c = canonical(s);
        if !self.entries.contains_key(&c) {
            self.entries.insert(c.clone(), ProbabilityInterval::vacuous());
            self.order.push(c);
        }
    }

    pub fn get(&self, s: &Sentence) -> Option<&ProbabilityInterval> {
        self.entries.get(&canonical(s))
    }

    fn get_or_vacuous(&self, s: &Sentence) -> ProbabilityInterval {
        self.entries.get(s).cloned().unwrap_or_else(ProbabilityInterval::vacuous)
    }

    pub fn contains(&self, s: &Sentence) -> bool {
        self.entries.contains_key(&canonical(s))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Tracked sentences in insertion order with their intervals.
    pub fn iter(&self) -> impl Iterator<Item = (&Sentence, &ProbabilityInterval)> {
        self.order.iter().map(|s| (s, &self.entries[s]))
    }

    /// Intersects the interval of `s` with `[lower, upper]`. Untracked
    /// sentences are ignored. Returns whether the interval shrank.
    pub fn narrow(&mut self, rule: Rule, s: &Sentence, lower: Rational, upper: Rational) -> Result<bool, PropagationError> {
        let key = canonical(s);
        let Some(cur) = self.entries.get(&key) else { return Ok(false) };
        let lo = cur.lower().clone().max(lower.clone()).max(Rational::zero());
        let hi = cur.upper().clone().min(upper.clone()).min(Rational::one());
        if lo > hi {
            return Err(PropagationError::Inconsistent { rule, sentence: key, existing: cur.clone(), lower, upper });
        }
        if lo == *cur.lower() && hi == *cur.upper() {
            return Ok(false);
        }
        self.entries.insert(key, ProbabilityInterval::new(lo, hi).expect("narrowed interval"));
        Ok(true)
    }
}

fn interval_of(t: &BoundsTable, s: &Sentence) -> ProbabilityInterval {
    t.get_or_vacuous(&canonical(s))
}

/// `¬s` from `s` and `s` from `¬s`.
pub fn apply_rule_negation(t: &mut BoundsTable, s: &Sentence) -> Result<bool, PropagationError> {
    let s = canonical(s);
    let n = negation_of(&s);
    let a = interval_of(t, &s);
    let b = interval_of(t, &n);
    let c1 = t.narrow(Rule::Negation, &n, Rational::one() - a.upper(), Rational::one() - a.lower())?;
    let c2 = t.narrow(Rule::Negation, &s, Rational::one() - b.upper(), Rational::one() - b.lower())?;
    Ok(c1 || c2)
}

fn frechet_conj(t: &mut BoundsTable, parts: &[Sentence]) -> Result<bool, PropagationError> {
    let conj = canonical(&Sentence::and(parts.to_vec()));
    let ivs: Vec<ProbabilityInterval> = parts.iter().map(|p| interval_of(t, p)).collect();
    let n = Rational::from_integer((parts.len() as i64 - 1).into());
    let lower = ivs.iter().map(|i| i.lower()).sum::<Rational>() - n;
    let upper = ivs.iter().map(|i| i.upper().clone()).min().unwrap_or_else(Rational::one);
    let mut changed = t.narrow(Rule::FrechetConjunction, &conj, lower, upper)?;
    // each conjunct is at least as probable as the conjunction
    let c = interval_of(t, &conj);
    for p in parts {
        changed |= t.narrow(Rule::FrechetConjunction, p, c.lower().clone(), Rational::one())?;
    }
    Ok(changed)
}

fn frechet_disj(t: &mut BoundsTable, parts: &[Sentence]) -> Result<bool, PropagationError> {
    let disj = canonical(&Sentence::or(parts.to_vec()));
    let ivs: Vec<ProbabilityInterval> = parts.iter().map(|p| interval_of(t, p)).collect();
    let lower = ivs.iter().map(|i| i.lower().clone()).max().unwrap_or_else(Rational::zero);
    let upper = ivs.iter().map(|i| i.upper()).sum::<Rational>();
    let mut changed = t.narrow(Rule::FrechetDisjunction, &disj, lower, upper)?;
    let d = interval_of(t, &disj);
    for p in parts {
        changed |= t.narrow(Rule::FrechetDisjunction, p, Rational::zero(), d.upper().clone())?;
    }
    Ok(changed)
}

/// Fréchet bounds for the conjunction and disjunction of `parts`
/// (`max(0, Σl − (n−1)) ≤ p(∧) ≤ min u`, `max l ≤ p(∨) ≤ min(1, Σu)`),
/// plus the converse bounds on the parts.
pub fn apply_rule_frechet(t: &mut BoundsTable, parts: &[Sentence]) -> Result<bool, PropagationError> {
    Ok(frechet_conj(t, parts)? | frechet_disj(t, parts)?)
}

fn fuzzy(t: &mut BoundsTable, parts: &[Sentence], conj: bool) -> Result<bool, PropagationError> {
    let mut values = Vec::with_capacity(parts.len());
    for p in parts {
        let iv = interval_of(t, p);
        if !iv.is_point() {
            return Err(PropagationError::NonPoint { sentence: canonical(p), interval: iv });
        }
        values.push(iv.lower().clone());
    }
    let v = if conj { values.into_iter().min() } else { values.into_iter().max() }.unwrap_or_else(Rational::zero);
    let target = if conj { Sentence::and(parts.to_vec()) } else { Sentence::or(parts.to_vec()) };
    t.narrow(Rule::Fuzzy, &target, v.clone(), v)
}

/// `p(∧) = min`, `p(∨) = max` over point-valued parts. Unsound in general.
pub fn apply_rule_fuzzy(t: &mut BoundsTable, parts: &[Sentence]) -> Result<bool, PropagationError> {
    Ok(fuzzy(t, parts, true)? | fuzzy(t, parts, false)?)
}

/// Forward chaining through `q <= p(A | B) <= r` with `p(B) ∈ [lb, ub]`:
/// `q·lb <= p(A) <= 1 − (1 − r)·lb`, and `q·lb <= p(A∧B) <= r·ub` when the
/// conjunction is tracked.
pub fn apply_rule_conditional_chain(t: &mut BoundsTable, axiom: &CpiAxiom) -> Result<bool, PropagationError> {
    let b = interval_of(t, &axiom.antecedent);
    let (q, r) = (axiom.bounds.lower(), axiom.bounds.upper());
    let lower = q * b.lower();
    let upper = Rational::one() - (Rational::one() - r) * b.lower();
    let mut changed = t.narrow(Rule::ConditionalChain, &axiom.consequent, lower.clone(), upper)?;
    let both = Sentence::and(vec![axiom.consequent.clone(), axiom.antecedent.clone()]);
    changed |= t.narrow(Rule::ConditionalChain, &both, lower, r * b.upper())?;
    Ok(changed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationOptions {
    pub rules: RuleSet,
    pub sweep_cap: usize,
    /// Visit sentences and axioms last-to-first (for order-independence checks).
    pub reverse: bool,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        PropagationOptions { rules: RuleSet::sound(), sweep_cap: DEFAULT_SWEEP_CAP, reverse: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Propagation {
    pub table: BoundsTable,
    /// Sweeps that changed at least one interval.
    pub sweeps: usize,
    /// False if the sweep cap stopped propagation before a fixpoint.
    pub converged: bool,
}

/// Tracked sentences plus every sentence named by an axiom.
pub fn tracked_sentences(kb: &KnowledgeBase, extra: &[Sentence]) -> Vec<Sentence> {
    let mut out: Vec<Sentence> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |s: &Sentence| {
        let c = canonical(s);
        if seen.insert(c.clone()) {
            out.push(c);
        }
    };
    for s in extra {
        push(s);
    }
    for a in &kb.axioms {
        push(&a.consequent);
        if a.is_conditional() {
            push(&a.antecedent);
        }
    }
    out
}

pub fn propagate_fixpoint(kb: &KnowledgeBase, rules: RuleSet, tracked: &[Sentence]) -> Result<Propagation, PropagationError> {
    propagate_with(kb, tracked, &PropagationOptions { rules, ..PropagationOptions::default() })
}

pub fn propagate_with(kb: &KnowledgeBase, tracked: &[Sentence], opts: &PropagationOptions) -> Result<Propagation, PropagationError> {
    opts.rules.validate()?;
    let sentences = tracked_sentences(kb, tracked);
    let mut table = BoundsTable::new(&sentences);
    let mut order = sentences.clone();
    let mut conditionals: Vec<&CpiAxiom> = Vec::new();
    for a in &kb.axioms {
        if a.is_conditional() {
            conditionals.push(a);
        } else {
            table.narrow(Rule::Axiom, &a.consequent, a.bounds.lower().clone(), a.bounds.upper().clone())?;
        }
    }
    if opts.reverse {
        order.reverse();
        conditionals.reverse();
    }
    let rules = opts.rules;
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.sweep_cap {
        let mut changed = false;
        for s in &order {
            if rules.negation && table.contains(&negation_of(s)) {
                changed |= apply_rule_negation(&mut table, s)?;
            }
            match s {
                Sentence::And(parts) => {
                    if rules.frechet_conjunction {
                        changed |= frechet_conj(&mut table, parts)?;
                    }
                    if rules.fuzzy_minmax && parts.iter().all(|p| interval_of(&table, p).is_point()) {
                        changed |= fuzzy(&mut table, parts, true)?;
                    }
                }
                Sentence::Or(parts) => {
                    if rules.frechet_disjunction {
                        changed |= frechet_disj(&mut table, parts)?;
                    }
                    if rules.fuzzy_minmax && parts.iter().all(|p| interval_of(&table, p).is_point()) {
                        changed |= fuzzy(&mut table, parts, false)?;
                    }
                }
                _ => {}
            }
        }
        if rules.conditional_chain {
            for a in &conditionals {
                changed |= apply_rule_conditional_chain(&mut table, a)?;
            }
        }
        if !changed {
            converged = true;
            break;
        }
        sweeps += 1;
    }
    Ok(Propagation { table, sweeps, converged })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    SoundAndComplete,
    SoundIncomplete,
    Unsound,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::SoundAndComplete => "sound and complete",
            Verdict::SoundIncomplete => "sound, incomplete",
            Verdict::Unsound => "unsound",
        }
    }
}

pub fn verdict(inferred: &ProbabilityInterval, entailed: &ProbabilityInterval) -> Verdict {
    if !inferred.is_superset_of(entailed) {
        Verdict::Unsound
    } else if entailed.is_superset_of(inferred) {
        Verdict::SoundAndComplete
    } else {
        Verdict::SoundIncomplete
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgement {
    pub per_sentence: Vec<(Sentence, ProbabilityInterval, ProbabilityInterval, Verdict)>,
    /// The worst per-sentence verdict.
    pub aggregate: Verdict,
}

/// Compares propagated against entailed intervals sentence by sentence.
pub fn judge_soundness_completeness(
    propagated: &BoundsTable,
    entailed: &BTreeMap<Sentence, ProbabilityInterval>,
) -> Result<Judgement, PropagationError> {
    let entailed: BTreeMap<Sentence, &ProbabilityInterval> = entailed.iter().map(|(s, i)| (canonical(s), i)).collect();
    if let Some(s) = entailed.keys().find(|s| !propagated.entries.contains_key(*s)) {
        return Err(PropagationError::CoverageMismatch(s.clone()));
    }
    let mut per_sentence = Vec::new();
    let mut aggregate = Verdict::SoundAndComplete;
    for (s, inferred) in propagated.iter() {
        let e = *entailed.get(s).ok_or_else(|| PropagationError::CoverageMismatch(s.clone()))?;
        let v = verdict(inferred, e);
        aggregate = aggregate.max(v);
        per_sentence.push((s.clone(), inferred.clone(), e.clone(), v));
    }
    Ok(Judgement { per_sentence, aggregate })
}

/// LP-entailed interval of every sentence in the table.
pub fn entailed_table(
    kb: &KnowledgeBase,
    ws: &WorldSpace,
    table: &BoundsTable,
) -> Result<BTreeMap<Sentence, ProbabilityInterval>, EntailError> {
    let lin = LinearEntailment::new(kb, ws)?;
    if !lin.feasible() {
        return Err(EntailError::InfeasibleKb);
    }
    table
        .iter()
        .map(|(s, _)| Ok((s.clone(), lin.entail_unconditional(s)?.interval.expect("feasible"))))
        .collect()
}
