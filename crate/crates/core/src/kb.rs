//! Knowledge bases: CPI axioms (`K`), augmenting assumptions (`D`), queries,
//! and the line-oriented DSL they are written in.
//!
//! ```text
//! atom A B C
//! background !(A & B)
//! 0.3 <= P(A)
//! P(A | B) = 7/10
//! 0.2 <= P((A | C)) <= 0.9
//! assume indep(A, B | C)
//! assume negcorr(A, C)
//! query P(B | A)
//! frame a=A, b=B, c=C
//! mass s1 {a}: 0.6, {a,b}: 0.4
//! ```
//!
//! Inside `P(...)` and in the second argument of `indep(...)`, a single
//! top-level `|` is the conditioning bar; a disjunction there must be
//! parenthesised.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::interval::ProbabilityInterval;
use crate::logic::{parse_sentence, Atom, LogicError, Sentence, WorldSpace};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: undeclared atom `{atom}`")]
    UndeclaredAtom { line: usize, atom: String },
    #[error("line {line}: invalid bound: {message}")]
    InvalidBound { line: usize, message: String },
    #[error("line {line}: duplicate atom `{atom}`")]
    DuplicateAtom { line: usize, atom: String },
}

/// `consequent | antecedent` with a probability interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CpiAxiom {
    pub consequent: Sentence,
    pub antecedent: Sentence,
    pub bounds: ProbabilityInterval,
}

impl CpiAxiom {
    pub fn unconditional(consequent: Sentence, bounds: ProbabilityInterval) -> Self {
        CpiAxiom { consequent, antecedent: Sentence::True, bounds }
    }

    pub fn conditional(consequent: Sentence, antecedent: Sentence, bounds: ProbabilityInterval) -> Self {
        CpiAxiom { consequent, antecedent, bounds }
    }

    pub fn is_conditional(&self) -> bool {
        !self.antecedent.is_true_literal()
    }
}

/// Renders back into a DSL line that parses to the same axiom.
impl fmt::Display for CpiAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = format_probability(&self.consequent, &self.antecedent);
        let (lo, hi) = (self.bounds.lower(), self.bounds.upper());
        if lo == hi {
            write!(f, "{p} = {lo}")
        } else if hi.is_one() {
            write!(f, "{lo} <= {p}")
        } else if lo.is_zero() {
            write!(f, "{p} <= {hi}")
        } else {
            write!(f, "{lo} <= {p} <= {hi}")
        }
    }
}

/// `P(target)` or `P(target | given)`, parenthesising top-level disjunctions
/// so the text reads back unambiguously.
pub fn format_probability(target: &Sentence, given: &Sentence) -> String {
    let wrap = |s: &Sentence| match s {
        Sentence::Or(_) | Sentence::Implies(..) | Sentence::Iff(..) => format!("({s})"),
        _ => s.to_string(),
    };
    if given.is_true_literal() {
        format!("P({})", wrap(target))
    } else {
        format!("P({} | {})", wrap(target), wrap(given))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AssumptionConstraint {
    /// `left` and `right` independent conditional on `given` (`True` for
    /// unconditional independence).
    CondIndependence { left: Sentence, right: Sentence, given: Sentence },
    PositiveCorrelation(Sentence, Sentence),
    NegativeCorrelation(Sentence, Sentence),
}

impl AssumptionConstraint {
    pub fn sentences(&self) -> Vec<&Sentence> {
        match self {
            AssumptionConstraint::CondIndependence { left, right, given } => vec![left, right, given],
            AssumptionConstraint::PositiveCorrelation(a, b) | AssumptionConstraint::NegativeCorrelation(a, b) => {
                vec![a, b]
            }
        }
    }
}

impl fmt::Display for AssumptionConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssumptionConstraint::CondIndependence { left, right, given } if given.is_true_literal() => {
                write!(f, "assume indep({left}, {right})")
            }
            AssumptionConstraint::CondIndependence { left, right, given } => {
                let wrap = |s: &Sentence| match s {
                    Sentence::Or(_) | Sentence::Implies(..) | Sentence::Iff(..) => format!("({s})"),
                    _ => s.to_string(),
                };
                write!(f, "assume indep({left}, {} | {})", wrap(right), wrap(given))
            }
            AssumptionConstraint::PositiveCorrelation(a, b) => write!(f, "assume poscorr({a}, {b})"),
            AssumptionConstraint::NegativeCorrelation(a, b) => write!(f, "assume negcorr({a}, {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub target: Sentence,
    pub given: Sentence,
}

impl Query {
    pub fn unconditional(target: Sentence) -> Self {
        Query { target, given: Sentence::True }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_probability(&self.target, &self.given))
    }
}

/// One element of a declared frame of discernment, optionally bound to the
/// sentence that denotes it in the world space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameElement {
    pub name: String,
    pub sentence: Option<Sentence>,
}

/// A `mass` line: focal sets given by element names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassSpec {
    pub name: String,
    pub entries: Vec<(BTreeSet<String>, Rational)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub atoms: Vec<Atom>,
    pub background: Vec<Sentence>,
    pub axioms: Vec<CpiAxiom>,
    pub assumptions: Vec<AssumptionConstraint>,
    pub queries: Vec<Query>,
    pub frame: Vec<FrameElement>,
    pub masses: Vec<MassSpec>,
}

impl KnowledgeBase {
    pub fn new(atoms: Vec<Atom>) -> Self {
        KnowledgeBase { atoms, ..Default::default() }
    }

    pub fn with_axiom(mut self, axiom: CpiAxiom) -> Self {
        self.axioms.push(axiom);
        self
    }

    pub fn with_assumption(mut self, assumption: AssumptionConstraint) -> Self {
        self.assumptions.push(assumption);
        self
    }

    pub fn with_background(mut self, s: Sentence) -> Self {
        self.background.push(s);
        self
    }

    pub fn with_query(mut self, q: Query) -> Self {
        self.queries.push(q);
        self
    }

    /// Copy of this knowledge base keeping only the axioms at `keep`.
    pub fn restricted_to(&self, keep: &[usize]) -> KnowledgeBase {
        let mut kb = self.clone();
        kb.axioms = keep.iter().map(|&i| self.axioms[i].clone()).collect();
        kb
    }

    pub fn world_space(&self, atom_cap: usize) -> Result<WorldSpace, LogicError> {
        WorldSpace::build(self.atoms.clone(), self.background.clone(), atom_cap)
    }
}

// ---------------------------------------------------------------------------
// Linearization

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// `Σ coefficients[i]·x_i  relation  rhs`. Zero coefficients are omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coefficients: BTreeMap<usize, Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coefficients: BTreeMap<usize, Rational>, relation: Relation, rhs: Rational) -> Self {
        let coefficients = coefficients.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        LinearConstraint { coefficients, relation, rhs }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coefficients.iter().map(|(&i, c)| c * &x[i]).sum()
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }

    /// Amount by which `x` (floating point) violates the constraint.
    pub fn violation_f64(&self, x: &[f64]) -> f64 {
        let lhs: f64 = self.coefficients.iter().map(|(&i, c)| crate::rational::to_f64(c) * x[i]).sum();
        let rhs = crate::rational::to_f64(&self.rhs);
        match self.relation {
            Relation::Le => (lhs - rhs).max(0.0),
            Relation::Eq => (lhs - rhs).abs(),
            Relation::Ge => (rhs - lhs).max(0.0),
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coefficients.keys().next_back().copied()
    }
}

/// Homogeneous constraints over world probabilities encoding
/// `q·p(B) <= p(A∧B) <= r·p(B)`. Vacuous sides (`q = 0`, `r = 1`) are dropped.
pub fn linearize(axiom: &CpiAxiom, ws: &WorldSpace) -> Result<Vec<LinearConstraint>, LogicError> {
    let joint = ws.indicator(&Sentence::and(vec![axiom.consequent.clone(), axiom.antecedent.clone()]))?;
    let cond = ws.indicator(&axiom.antecedent)?;
    let row = |t: &Rational| -> BTreeMap<usize, Rational> {
        (0..ws.len())
            .map(|i| {
                let mut c = Rational::zero();
                if joint[i] {
                    c += Rational::one();
                }
                if cond[i] {
                    c -= t;
                }
                (i, c)
            })
            .collect()
    };
    let mut out = Vec::new();
    let (q, r) = (axiom.bounds.lower(), axiom.bounds.upper());
    if !q.is_zero() {
        out.push(LinearConstraint::new(row(q), Relation::Ge, Rational::zero()));
    }
    if !r.is_one() {
        out.push(LinearConstraint::new(row(r), Relation::Le, Rational::zero()));
    }
    Ok(out)
}

pub fn linearize_all(axioms: &[CpiAxiom], ws: &WorldSpace) -> Result<Vec<LinearConstraint>, LogicError> {
    let mut out = Vec::new();
    for a in axioms {
        out.extend(linearize(a, ws)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// DSL

struct LineCtx<'a> {
    line: usize,
    declared: &'a BTreeSet<Atom>,
}

impl LineCtx<'_> {
    fn parse_err(&self, message: impl Into<String>) -> KbError {
        KbError::Parse { line: self.line, message: message.into() }
    }

    fn sentence(&self, text: &str) -> Result<Sentence, KbError> {
        let s = parse_sentence(text.trim()).map_err(|e| self.parse_err(format!("in `{}`: {e}", text.trim())))?;
        if let Some(a) = s.atoms().into_iter().find(|a| !self.declared.contains(a)) {
            return Err(KbError::UndeclaredAtom { line: self.line, atom: a.name().to_string() });
        }
        Ok(s)
    }

    fn number(&self, text: &str) -> Result<Rational, KbError> {
        parse_rational(text).map_err(|e| self.parse_err(e.to_string()))
    }

    /// Splits `target | given` on a single top-level bar.
    fn conditional(&self, text: &str) -> Result<(Sentence, Sentence), KbError> {
        let bars = top_level_positions(text, '|');
        match bars.as_slice() {
            [] => Ok((self.sentence(text)?, Sentence::True)),
            [at] => Ok((self.sentence(&text[..*at])?, self.sentence(&text[at + 1..])?)),
            _ => Err(self.parse_err("more than one top-level `|`; parenthesise disjunctions inside P(...)")),
        }
    }
}

fn top_level_positions(text: &str, needle: char) -> Vec<usize> {
    let mut depth = 0i32;
    let mut out = Vec::new();
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == needle && depth == 0 => out.push(i),
            _ => {}
        }
    }
    out
}

/// Finds `P(` at a word boundary and returns (prefix, inner, suffix).
fn split_probability(text: &str) -> Option<(&str, &str, &str)> {
    let bytes = text.as_bytes();
    let start = (0..bytes.len().saturating_sub(1)).find(|&i| {
        bytes[i] == b'P'
            && bytes[i + 1] == b'('
            && (i == 0 || !(bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'_'))
    })?;
    let mut depth = 0;
    for (off, c) in text[start + 1..].char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    let close = start + 1 + off;
                    return Some((&text[..start], &text[start + 2..close], &text[close + 1..]));
                }
            }
            _ => {}
        }
    }
    None
}

fn split_operator(text: &str) -> Option<(Relation, &str)> {
    let t = text.trim();
    for (op, rel) in [("<=", Relation::Le), (">=", Relation::Ge), ("=", Relation::Eq)] {
        if let Some(rest) = t.strip_prefix(op) {
            return Some((rel, rest.trim()));
        }
    }
    None
}

fn split_trailing_operator(text: &str) -> Option<(&str, Relation)> {
    let t = text.trim();
    for (op, rel) in [("<=", Relation::Le), (">=", Relation::Ge), ("=", Relation::Eq)] {
        if let Some(rest) = t.strip_suffix(op) {
            return Some((rest.trim(), rel));
        }
    }
    None
}

fn parse_bound_statement(ctx: &LineCtx<'_>, text: &str) -> Result<Option<CpiAxiom>, KbError> {
    let Some((prefix, inner, suffix)) = split_probability(text) else {
        return Ok(None);
    };
    let (consequent, antecedent) = ctx.conditional(inner)?;
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    let set = |slot: &mut Option<Rational>, v: Rational| -> Result<(), KbError> {
        if slot.is_some() {
            return Err(ctx.parse_err("bound given twice"));
        }
        *slot = Some(v);
        Ok(())
    };
    // `<num> <op> P(...)`: the number is on the left of the relation.
    if !prefix.trim().is_empty() {
        let (num, rel) = split_trailing_operator(prefix).ok_or_else(|| ctx.parse_err("expected `<num> <=` before P(...)"))?;
        let v = ctx.number(num)?;
        match rel {
            Relation::Le => set(&mut lower, v)?,
            Relation::Ge => set(&mut upper, v)?,
            Relation::Eq => {
                set(&mut lower, v.clone())?;
                set(&mut upper, v)?;
            }
        }
    }
    if !suffix.trim().is_empty() {
        let (rel, num) = split_operator(suffix).ok_or_else(|| ctx.parse_err("expected `<= <num>` after P(...)"))?;
        let v = ctx.number(num)?;
        match rel {
            Relation::Le => set(&mut upper, v)?,
            Relation::Ge => set(&mut lower, v)?,
            Relation::Eq => {
                set(&mut lower, v.clone())?;
                set(&mut upper, v)?;
            }
        }
    }
    if lower.is_none() && upper.is_none() {
        return Err(ctx.parse_err("P(...) without a bound"));
    }
    let lower = lower.unwrap_or_else(Rational::zero);
    let upper = upper.unwrap_or_else(Rational::one);
    let bounds = ProbabilityInterval::new(lower, upper)
        .map_err(|e| KbError::InvalidBound { line: ctx.line, message: e.to_string() })?;
    Ok(Some(CpiAxiom { consequent, antecedent, bounds }))
}

fn parse_call<'t>(ctx: &LineCtx<'_>, text: &'t str, name: &str) -> Result<Vec<&'t str>, KbError> {
    let rest = text.trim().strip_prefix(name).unwrap().trim_start();
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| ctx.parse_err(format!("expected `{name}(...)`")))?;
    let commas = top_level_positions(inner, ',');
    let mut parts = Vec::new();
    let mut start = 0;
    for c in commas {
        parts.push(&inner[start..c]);
        start = c + 1;
    }
    parts.push(&inner[start..]);
    Ok(parts)
}

fn parse_assumption(ctx: &LineCtx<'_>, text: &str) -> Result<AssumptionConstraint, KbError> {
    let t = text.trim();
    let keyword = t.split(|c: char| c == '(' || c.is_whitespace()).next().unwrap_or("");
    let args = parse_call(ctx, t, keyword)?;
    if args.len() != 2 {
        return Err(ctx.parse_err(format!("`{keyword}` takes two arguments")));
    }
    match keyword {
        "indep" => {
            let left = ctx.sentence(args[0])?;
            let (right, given) = ctx.conditional(args[1])?;
            Ok(AssumptionConstraint::CondIndependence { left, right, given })
        }
        "poscorr" => Ok(AssumptionConstraint::PositiveCorrelation(ctx.sentence(args[0])?, ctx.sentence(args[1])?)),
        "negcorr" => Ok(AssumptionConstraint::NegativeCorrelation(ctx.sentence(args[0])?, ctx.sentence(args[1])?)),
        other => Err(ctx.parse_err(format!("unknown assumption `{other}`"))),
    }
}

fn parse_frame(ctx: &LineCtx<'_>, text: &str) -> Result<Vec<FrameElement>, KbError> {
    let mut out: Vec<FrameElement> = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(ctx.parse_err("empty frame element"));
        }
        let (name, sentence) = match item.split_once('=') {
            Some((n, s)) => (n.trim(), Some(ctx.sentence(s)?)),
            None => {
                let default = Atom::new(item).ok().filter(|a| ctx.declared.contains(a)).map(Sentence::Atom);
                (item, default)
            }
        };
        if Atom::new(name).is_err() {
            return Err(ctx.parse_err(format!("invalid frame element name `{name}`")));
        }
        if out.iter().any(|e| e.name == name) {
            return Err(ctx.parse_err(format!("duplicate frame element `{name}`")));
        }
        out.push(FrameElement { name: name.to_string(), sentence });
    }
    Ok(out)
}

fn parse_mass(ctx: &LineCtx<'_>, text: &str) -> Result<MassSpec, KbError> {
    let text = text.trim();
    let (name, rest) = text.split_once(char::is_whitespace).ok_or_else(|| ctx.parse_err("expected `mass <name> {..}: <num>, ...`"))?;
    if Atom::new(name).is_err() {
        return Err(ctx.parse_err(format!("invalid source name `{name}`")));
    }
    let mut entries = Vec::new();
    let mut rest = rest.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('{').ok_or_else(|| ctx.parse_err("expected `{`"))?;
        let (set, after) = body.split_once('}').ok_or_else(|| ctx.parse_err("unclosed `{`"))?;
        let elements: BTreeSet<String> = set.split(',').map(|e| e.trim().to_string()).filter(|e| !e.is_empty()).collect();
        let after = after.trim_start().strip_prefix(':').ok_or_else(|| ctx.parse_err("expected `:` after focal set"))?;
        let (num, tail) = match after.find(',') {
            Some(i) => (&after[..i], after[i + 1..].trim()),
            None => (after, ""),
        };
        entries.push((elements, ctx.number(num)?));
        rest = tail;
    }
    if entries.is_empty() {
        return Err(ctx.parse_err("mass line without focal sets"));
    }
    Ok(MassSpec { name: name.to_string(), entries })
}

/// Parses the knowledge-base DSL. Errors carry 1-based line numbers.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, KbError> {
    let mut kb = KnowledgeBase::default();
    let mut declared = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let keyword = content.split_whitespace().next().unwrap();
        let rest = content[keyword.len()..].trim();
        if keyword == "atom" {
            if rest.is_empty() {
                return Err(KbError::Parse { line, message: "`atom` needs at least one name".into() });
            }
            for name in rest.split(|c: char| c.is_whitespace() || c == ',').filter(|n| !n.is_empty()) {
                let atom = Atom::new(name).map_err(|e| KbError::Parse { line, message: e.to_string() })?;
                if !declared.insert(atom.clone()) {
                    return Err(KbError::DuplicateAtom { line, atom: name.to_string() });
                }
                kb.atoms.push(atom);
            }
            continue;
        }
        let ctx = LineCtx { line, declared: &declared };
        match keyword {
            "background" => kb.background.push(ctx.sentence(rest)?),
            "assume" => kb.assumptions.push(parse_assumption(&ctx, rest)?),
            "query" => {
                let (prefix, inner, suffix) = split_probability(rest).ok_or_else(|| ctx.parse_err("expected `query P(...)`"))?;
                if !prefix.trim().is_empty() || !suffix.trim().is_empty() {
                    return Err(ctx.parse_err("unexpected text around P(...) in query"));
                }
                let (target, given) = ctx.conditional(inner)?;
                kb.queries.push(Query { target, given });
            }
            "frame" => {
                if !kb.frame.is_empty() {
                    return Err(ctx.parse_err("frame declared twice"));
                }
                kb.frame = parse_frame(&ctx, rest)?;
            }
            "mass" => kb.masses.push(parse_mass(&ctx, rest)?),
            _ => match parse_bound_statement(&ctx, content)? {
                Some(axiom) => kb.axioms.push(axiom),
                None => return Err(ctx.parse_err(format!("unrecognised statement `{content}`"))),
            },
        }
    }
    Ok(kb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::DEFAULT_ATOM_CAP;
    use crate::rational::{int, ratio};

    fn interval(lo: Rational, hi: Rational) -> ProbabilityInterval {
        ProbabilityInterval::new(lo, hi).unwrap()
    }

    #[test]
    fn parse_examples() {
        let kb = parse_kb("atom A\n0.3 <= P(A)").unwrap();
        assert_eq!(kb.axioms, vec![CpiAxiom::unconditional(Sentence::var("A"), interval(ratio(3, 10), int(1)))]);

        let kb = parse_kb("atom A B\nP(A | B) = 0.7").unwrap();
        assert_eq!(
            kb.axioms,
            vec![CpiAxiom::conditional(Sentence::var("A"), Sentence::var("B"), interval(ratio(7, 10), ratio(7, 10)))]
        );

        assert!(matches!(parse_kb("atom A\nP(A) >= 1.2"), Err(KbError::InvalidBound { line: 2, .. })));
    }

    #[test]
    fn bound_forms() {
        let kb = parse_kb(
            "atom A B\n\
             P(A) <= 0.4\n\
             0.1 <= P(A) <= 1/2\n\
             P(A) >= 0.6\n\
             0.8 >= P(B)\n\
             P((A | B)) = 3/4\n\
             0.2 <= P(A & B | !B)\n",
        )
        .unwrap();
        let b: Vec<_> = kb.axioms.iter().map(|a| (a.bounds.lower().clone(), a.bounds.upper().clone())).collect();
        assert_eq!(
            b,
            vec![
                (int(0), ratio(2, 5)),
                (ratio(1, 10), ratio(1, 2)),
                (ratio(3, 5), int(1)),
                (int(0), ratio(4, 5)),
                (ratio(3, 4), ratio(3, 4)),
                (ratio(1, 5), int(1)),
            ]
        );
        assert_eq!(kb.axioms[4].consequent, Sentence::Or(vec![Sentence::var("A"), Sentence::var("B")]));
        assert_eq!(kb.axioms[5].antecedent, Sentence::var("B").negate());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_kb("atom A\nP(B) = 0.5"), Err(KbError::UndeclaredAtom { line: 2, .. })));
        assert!(matches!(parse_kb("atom A\n0.6 <= P(A) <= 0.4"), Err(KbError::InvalidBound { .. })));
        assert!(matches!(parse_kb("atom A\nP(A) = x"), Err(KbError::Parse { line: 2, .. })));
        assert!(matches!(parse_kb("atom A B\nP(A | B | A) = 0.5"), Err(KbError::Parse { .. })));
        assert!(matches!(parse_kb("atom A\natom A"), Err(KbError::DuplicateAtom { line: 2, .. })));
        assert!(matches!(parse_kb("atom A\nfoo bar"), Err(KbError::Parse { .. })));
        assert!(matches!(parse_kb("atom A\nP(A)"), Err(KbError::Parse { .. })));
        assert!(matches!(parse_kb("atom A\nP(A & ) = 0.5"), Err(KbError::Parse { .. })));
        assert!(matches!(parse_kb("atom A\nassume indep(A)"), Err(KbError::Parse { .. })));
    }

    #[test]
    fn assumptions_queries_frames_masses() {
        let kb = parse_kb(
            "# comment line\n\
             atom A B C   # trailing comment\n\
             background !(A & B)\n\
             assume indep(A, B | C)\n\
             assume indep(A, (B | C))\n\
             assume poscorr(A, B | C)\n\
             assume negcorr(A, B)\n\
             query P(A)\n\
             query P(A | B)\n\
             frame a=A, b=B, c=C\n\
             mass s1 {a}: 0.6, {a,b}: 0.4\n",
        )
        .unwrap();
        assert_eq!(kb.background.len(), 1);
        assert_eq!(
            kb.assumptions[0],
            AssumptionConstraint::CondIndependence { left: Sentence::var("A"), right: Sentence::var("B"), given: Sentence::var("C") }
        );
        assert!(matches!(&kb.assumptions[1], AssumptionConstraint::CondIndependence { given: Sentence::True, .. }));
        assert_eq!(
            kb.assumptions[2],
            AssumptionConstraint::PositiveCorrelation(Sentence::var("A"), Sentence::Or(vec![Sentence::var("B"), Sentence::var("C")]))
        );
        assert_eq!(kb.queries[1], Query { target: Sentence::var("A"), given: Sentence::var("B") });
        assert_eq!(kb.frame.len(), 3);
        assert_eq!(kb.frame[1].sentence, Some(Sentence::var("B")));
        assert_eq!(kb.masses[0].entries.len(), 2);
        assert_eq!(kb.masses[0].entries[1].1, ratio(2, 5));
    }

    #[test]
    fn display_reparses() {
        let text = "atom A B\nP(A | B) = 0.7\n0.3 <= P((A | B))\nP(A) <= 1/3\n1/5 <= P(!A) <= 1/2\nassume indep(A, B | (A | B))\nassume negcorr(A, B)";
        let kb = parse_kb(text).unwrap();
        let mut rendered = String::from("atom A B\n");
        for a in &kb.axioms {
            rendered.push_str(&format!("{a}\n"));
        }
        for d in &kb.assumptions {
            rendered.push_str(&format!("{d}\n"));
        }
        let again = parse_kb(&rendered).unwrap();
        assert_eq!(again.axioms, kb.axioms);
        assert_eq!(again.assumptions, kb.assumptions);
    }

    #[test]
    fn linearize_examples() {
        let ws = WorldSpace::build(vec![Atom::new("A").unwrap(), Atom::new("B").unwrap()], vec![], DEFAULT_ATOM_CAP).unwrap();
        let point = CpiAxiom::conditional(Sentence::var("A"), Sentence::var("B"), interval(ratio(7, 10), ratio(7, 10)));
        let cs = linearize(&point, &ws).unwrap();
        assert_eq!(cs.len(), 2);
        // worlds: 0=¬A¬B 1=¬AB 2=A¬B 3=AB; p(A∧B) − 0.7 p(B) = 0.3 x3 − 0.7 x1
        let expected: BTreeMap<usize, Rational> = [(1, ratio(-7, 10)), (3, ratio(3, 10))].into_iter().collect();
        assert_eq!(cs[0].coefficients, expected);
        assert_eq!(cs[0].relation, Relation::Ge);
        assert_eq!(cs[1].coefficients, expected);
        assert_eq!(cs[1].relation, Relation::Le);
        assert!(cs.iter().all(|c| c.rhs == int(0)));

        let vac = CpiAxiom::unconditional(Sentence::var("A"), ProbabilityInterval::vacuous());
        assert!(linearize(&vac, &ws).unwrap().is_empty());

        let ws1 = WorldSpace::build(vec![Atom::new("A").unwrap()], vec![], DEFAULT_ATOM_CAP).unwrap();
        let lower = CpiAxiom::unconditional(Sentence::var("A"), interval(ratio(3, 10), int(1)));
        let cs = linearize(&lower, &ws1).unwrap();
        assert_eq!(cs.len(), 1);
        let expected: BTreeMap<usize, Rational> = [(0, ratio(-3, 10)), (1, ratio(7, 10))].into_iter().collect();
        assert_eq!(cs[0].coefficients, expected);
        assert_eq!(cs[0].relation, Relation::Ge);
    }
}
