//! Entailment under augmenting assumptions that are bilinear in aggregate
//! probabilities (conditional independence, correlation signs).
//!
//! Each assumption becomes `u·v ~ w·z` over aggregates `p(S) = Σ_{ext S} x_i`.
//! Every product of two aggregates gets an auxiliary variable bounded by its
//! McCormick envelope over the current aggregate box; the resulting LP is a
//! relaxation, so its optimum is a sound bound. Spatial branch-and-bound
//! splits aggregate boxes to tighten the relaxation until the bound and the
//! best (nearly) feasible point agree within tolerance.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::entail::{
    sum_row, Attainment, EntailError, LinearEntailment, LinearSystem, Method, QueryResult, QueryStatus, RatioOutcome,
    SolveStats,
};
use crate::interval::ProbabilityInterval;
use crate::kb::{AssumptionConstraint, KnowledgeBase, LinearConstraint, Relation};
use crate::logic::{LogicError, Sentence, WorldSpace};
use crate::rational::{ratio, Rational};
use crate::simplex::Sense;

pub const DEFAULT_NODE_CAP: usize = 10_000;

pub fn default_tolerance() -> Rational {
    ratio(1, 1_000_000)
}

/// Aggregate probability `p(sentence)` with its current box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateVariable {
    pub sentence: Sentence,
    pub bounds: ProbabilityInterval,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    One,
    Aggregate(Sentence),
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::One => f.write_str("1"),
            Factor::Aggregate(s) => write!(f, "p({s})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Product(pub Factor, pub Factor);

impl fmt::Display for Product {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.0, &self.1) {
            (Factor::One, Factor::One) => f.write_str("1"),
            (Factor::One, g) | (g, Factor::One) => write!(f, "{g}"),
            (a, b) => write!(f, "{a}·{b}"),
        }
    }
}

/// `left  relation  right`, each side a product of at most two aggregates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BilinearConstraint {
    pub left: Product,
    pub relation: Relation,
    pub right: Product,
}

impl fmt::Display for BilinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.left, self.relation, self.right)
    }
}

fn factor(s: Sentence, ws: &WorldSpace) -> Result<Factor, LogicError> {
    Ok(if ws.extension(&s)?.len() == ws.len() { Factor::One } else { Factor::Aggregate(s) })
}

/// Clears denominators: `indep(C, D | G)` becomes
/// `p(C∧D∧G)·p(G) = p(C∧G)·p(D∧G)`, which holds vacuously when `p(G) = 0`.
pub fn encode_assumption(a: &AssumptionConstraint, ws: &WorldSpace) -> Result<Vec<BilinearConstraint>, LogicError> {
    for s in a.sentences() {
        ws.check(s)?;
    }
    let and = |parts: Vec<&Sentence>| Sentence::and(parts.into_iter().filter(|s| !s.is_true_literal()).cloned().collect());
    Ok(vec![match a {
        AssumptionConstraint::CondIndependence { left, right, given } => BilinearConstraint {
            left: Product(factor(and(vec![left, right, given]), ws)?, factor(given.clone(), ws)?),
            relation: Relation::Eq,
            right: Product(factor(and(vec![left, given]), ws)?, factor(and(vec![right, given]), ws)?),
        },
        AssumptionConstraint::NegativeCorrelation(x, y) => BilinearConstraint {
            left: Product(factor(and(vec![x, y]), ws)?, Factor::One),
            relation: Relation::Le,
            right: Product(factor(x.clone(), ws)?, factor(y.clone(), ws)?),
        },
        AssumptionConstraint::PositiveCorrelation(x, y) => BilinearConstraint {
            left: Product(factor(and(vec![x, y]), ws)?, Factor::One),
            relation: Relation::Ge,
            right: Product(factor(x.clone(), ws)?, factor(y.clone(), ws)?),
        },
    }])
}

type Expr = BTreeMap<usize, Rational>;

fn add_scaled(into: &mut Expr, expr: &Expr, scale: &Rational) {
    for (&i, c) in expr {
        let e = into.entry(i).or_insert_with(Rational::zero);
        *e += c * scale;
    }
}

/// The four McCormick inequalities for `z = u·v` with `u ∈ u_box`, `v ∈ v_box`,
/// where `u`, `v` are linear expressions and `z` is variable `z_var`.
pub fn mccormick_envelope(
    u: &Expr,
    u_box: &ProbabilityInterval,
    v: &Expr,
    v_box: &ProbabilityInterval,
    z_var: usize,
) -> [LinearConstraint; 4] {
    let (ul, uh, vl, vh) = (u_box.lower(), u_box.upper(), v_box.lower(), v_box.upper());
    // z − a·v − b·u  rel  −a·b
    let plane = |a: &Rational, b: &Rational, rel: Relation| {
        let mut e: Expr = [(z_var, Rational::one())].into_iter().collect();
        add_scaled(&mut e, v, &-a.clone());
        add_scaled(&mut e, u, &-b.clone());
        LinearConstraint::new(e, rel, -(a * b))
    };
    [
        plane(ul, vl, Relation::Ge),
        plane(uh, vh, Relation::Ge),
        plane(uh, vl, Relation::Le),
        plane(ul, vh, Relation::Le),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Const,
    Linear(usize),
    Product(usize),
}

/// Index structure shared by every node of the search.
#[derive(Debug, Clone)]
struct Model {
    worlds: usize,
    base: Vec<LinearConstraint>,
    sentences: Vec<Sentence>,
    extensions: Vec<Expr>,
    /// Aggregate pairs; product `k` lives in variable `worlds + k`.
    products: Vec<(usize, usize)>,
    rows: Vec<(Side, Relation, Side)>,
}

impl Model {
    fn new(base: Vec<LinearConstraint>, constraints: &[BilinearConstraint], ws: &WorldSpace) -> Result<Self, LogicError> {
        let mut m = Model {
            worlds: ws.len(),
            base,
            sentences: Vec::new(),
            extensions: Vec::new(),
            products: Vec::new(),
            rows: Vec::new(),
        };
        for c in constraints {
            let l = m.side(&c.left, ws)?;
            let r = m.side(&c.right, ws)?;
            m.rows.push((l, c.relation, r));
        }
        Ok(m)
    }

    fn aggregate(&mut self, s: &Sentence, ws: &WorldSpace) -> Result<usize, LogicError> {
        if let Some(i) = self.sentences.iter().position(|t| t == s) {
            return Ok(i);
        }
        self.sentences.push(s.clone());
        self.extensions.push(sum_row(ws.extension(s)?));
        Ok(self.sentences.len() - 1)
    }

    fn side(&mut self, p: &Product, ws: &WorldSpace) -> Result<Side, LogicError> {
        Ok(match (&p.0, &p.1) {
            (Factor::One, Factor::One) => Side::Const,
            (Factor::One, Factor::Aggregate(s)) | (Factor::Aggregate(s), Factor::One) => Side::Linear(self.aggregate(s, ws)?),
            (Factor::Aggregate(a), Factor::Aggregate(b)) => {
                let (i, j) = (self.aggregate(a, ws)?, self.aggregate(b, ws)?);
                let key = (i.min(j), i.max(j));
                let k = match self.products.iter().position(|&p| p == key) {
                    Some(k) => k,
                    None => {
                        self.products.push(key);
                        self.products.len() - 1
                    }
                };
                Side::Product(k)
            }
        })
    }

    fn num_vars(&self) -> usize {
        self.worlds + self.products.len()
    }

    fn branchable(&self) -> BTreeSet<usize> {
        self.products.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// Relaxation of the augmented system over `boxes` (indexed by aggregate).
    fn relaxation(&self, boxes: &[ProbabilityInterval]) -> LinearSystem {
        let mut constraints = self.base.clone();
        for a in self.branchable() {
            let (lo, hi) = (boxes[a].lower(), boxes[a].upper());
            if lo.is_positive() {
                constraints.push(LinearConstraint::new(self.extensions[a].clone(), Relation::Ge, lo.clone()));
            }
            if !hi.is_one() {
                constraints.push(LinearConstraint::new(self.extensions[a].clone(), Relation::Le, hi.clone()));
            }
        }
        for (k, &(a, b)) in self.products.iter().enumerate() {
            constraints.extend(mccormick_envelope(
                &self.extensions[a],
                &boxes[a],
                &self.extensions[b],
                &boxes[b],
                self.worlds + k,
            ));
        }
        for &(l, rel, r) in &self.rows {
            let mut e = Expr::new();
            let mut rhs = Rational::zero();
            self.add_side(&mut e, &mut rhs, l, &Rational::one());
            self.add_side(&mut e, &mut rhs, r, &-Rational::one());
            constraints.push(LinearConstraint::new(e, rel, rhs));
        }
        LinearSystem { num_vars: self.num_vars(), worlds: self.worlds, constraints }
    }

    /// Adds `scale·side` to the left-hand side (constants go to `rhs`).
    fn add_side(&self, e: &mut Expr, rhs: &mut Rational, side: Side, scale: &Rational) {
        match side {
            Side::Const => *rhs -= scale,
            Side::Linear(a) => add_scaled(e, &self.extensions[a], scale),
            Side::Product(k) => add_scaled(e, &[(self.worlds + k, Rational::one())].into_iter().collect(), scale),
        }
    }

    fn aggregate_value(&self, a: usize, x: &[Rational]) -> Rational {
        self.extensions[a].keys().map(|&i| &x[i]).sum()
    }

    fn side_value(&self, side: Side, x: &[Rational]) -> Rational {
        match side {
            Side::Const => Rational::one(),
            Side::Linear(a) => self.aggregate_value(a, x),
            Side::Product(k) => {
                let (a, b) = self.products[k];
                self.aggregate_value(a, x) * self.aggregate_value(b, x)
            }
        }
    }

    /// Largest violation of the true bilinear constraints at `x`.
    fn violation(&self, x: &[Rational]) -> Rational {
        let mut worst = Rational::zero();
        for &(l, rel, r) in &self.rows {
            let diff = self.side_value(l, x) - self.side_value(r, x);
            let v = match rel {
                Relation::Eq => diff.abs(),
                Relation::Le => diff.max(Rational::zero()),
                Relation::Ge => (-diff).max(Rational::zero()),
            };
            worst = worst.max(v);
        }
        worst
    }
}

/// Public form of the relaxation for a single constraint: the envelopes for
/// each product (fresh variables from `first_aux` on, in order of first
/// appearance) and the linearised constraint itself. Box rows are not included.
pub fn relax_mccormick(
    c: &BilinearConstraint,
    ws: &WorldSpace,
    boxes: &BTreeMap<Sentence, ProbabilityInterval>,
    first_aux: usize,
) -> Result<Vec<LinearConstraint>, LogicError> {
    let mut model = Model::new(Vec::new(), std::slice::from_ref(c), ws)?;
    assert!(first_aux >= model.worlds, "auxiliary variables must follow the world variables");
    let shift = first_aux - model.worlds;
    let b: Vec<ProbabilityInterval> =
        model.sentences.iter().map(|s| boxes.get(s).cloned().unwrap_or_else(ProbabilityInterval::vacuous)).collect();
    model.base.clear();
    let relaxed = model.relaxation(&b);
    let remap = |c: LinearConstraint| {
        let coefficients = c.coefficients.into_iter().map(|(i, v)| if i >= model.worlds { (i + shift, v) } else { (i, v) }).collect();
        LinearConstraint::new(coefficients, c.relation, c.rhs)
    };
    let branchable = model.branchable();
    let box_rows: usize = branchable
        .iter()
        .map(|&a| usize::from(b[a].lower().is_positive()) + usize::from(!b[a].upper().is_one()))
        .sum();
    Ok(relaxed.constraints.into_iter().skip(box_rows).map(remap).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedOptions {
    pub tolerance: Rational,
    pub node_cap: usize,
}

impl Default for AugmentedOptions {
    fn default() -> Self {
        AugmentedOptions { tolerance: default_tolerance(), node_cap: DEFAULT_NODE_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundStatus {
    /// Sound outer bounds; the node cap stopped the search before the gap closed.
    OuterBound,
    /// The bound and the best feasible value agree within the tolerance.
    ConvergedWithin(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedResult {
    pub result: QueryResult,
    pub status: BoundStatus,
    /// Global lower bound after each node, for the minimisation side.
    pub lower_history: Vec<Rational>,
    /// Global upper bound after each node, for the maximisation side.
    pub upper_history: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible,
    /// Node cap reached without a verdict.
    Unknown,
}

struct Node {
    boxes: Vec<ProbabilityInterval>,
    score: Rational,
    x: Vec<Rational>,
}

enum SideOutcome {
    Infeasible,
    Done { bound: Rational, incumbent: Option<(Rational, bool)>, converged: bool, history: Vec<Rational> },
}

/// Entailment under `K` together with the bilinear assumptions `D`.
pub struct AugmentedEntailment<'a> {
    ws: &'a WorldSpace,
    linear: LinearEntailment<'a>,
    model: Model,
    root: Vec<ProbabilityInterval>,
    bilinear: Vec<BilinearConstraint>,
}

impl<'a> AugmentedEntailment<'a> {
    /// Encodes `D` and computes the root aggregate boxes from `K` alone.
    pub fn new(kb: &'a KnowledgeBase, ws: &'a WorldSpace) -> Result<Self, EntailError> {
        let linear = LinearEntailment::new(kb, ws)?;
        let mut bilinear = Vec::new();
        for a in &kb.assumptions {
            bilinear.extend(encode_assumption(a, ws)?);
        }
        let model = Model::new(linear.constraints().to_vec(), &bilinear, ws)?;
        let mut root = vec![ProbabilityInterval::vacuous(); model.sentences.len()];
        let mut stats = SolveStats::default();
        for a in model.branchable() {
            let ext: BTreeSet<usize> = model.extensions[a].keys().copied().collect();
            let lo = linear.system().optimize(&ext, None, Sense::Minimize, &mut stats);
            let hi = linear.system().optimize(&ext, None, Sense::Maximize, &mut stats);
            match (lo, hi) {
                (RatioOutcome::Optimal { value: lo, .. }, RatioOutcome::Optimal { value: hi, .. }) => {
                    root[a] = ProbabilityInterval::new(lo, hi).expect("aggregate bounds");
                }
                _ => return Err(EntailError::InfeasibleKb),
            }
        }
        Ok(AugmentedEntailment { ws, linear, model, root, bilinear })
    }

    pub fn bilinear_constraints(&self) -> &[BilinearConstraint] {
        &self.bilinear
    }

    /// Aggregates that appear in products, with their root boxes.
    pub fn aggregates(&self) -> Vec<AggregateVariable> {
        self.model
            .branchable()
            .into_iter()
            .map(|a| AggregateVariable { sentence: self.model.sentences[a].clone(), bounds: self.root[a].clone() })
            .collect()
    }

    pub fn has_assumptions(&self) -> bool {
        !self.model.rows.is_empty()
    }

    fn evaluate(
        &self,
        boxes: &[ProbabilityInterval],
        numer: &BTreeSet<usize>,
        denom: Option<&BTreeSet<usize>>,
        sense: Sense,
        stats: &mut SolveStats,
    ) -> Option<(Rational, Vec<Rational>)> {
        stats.bnb_nodes += 1;
        match self.model.relaxation(boxes).optimize(numer, denom, sense, stats) {
            RatioOutcome::Optimal { value, x } => Some((if sense == Sense::Minimize { value } else { -value }, x)),
            RatioOutcome::Infeasible => None,
        }
    }

    /// Chooses the aggregate to split and the split point, from the product
    /// whose auxiliary value strays furthest from the true product.
    fn branch_choice(&self, node: &Node) -> Option<(usize, Rational)> {
        let mut best: Option<(Rational, usize)> = None;
        for (k, &(a, b)) in self.model.products.iter().enumerate() {
            let z = &node.x[self.model.worlds + k];
            let prod = self.model.aggregate_value(a, &node.x) * self.model.aggregate_value(b, &node.x);
            let gap = (z - prod).abs();
            if gap.is_positive() && best.as_ref().is_none_or(|(g, _)| gap > *g) {
                best = Some((gap, k));
            }
        }
        let (_, k) = best?;
        let (a, b) = self.model.products[k];
        let agg = if node.boxes[b].width() > node.boxes[a].width() { b } else { a };
        let bx = &node.boxes[agg];
        let width = bx.width();
        if !width.is_positive() {
            return None;
        }
        // Split near the relaxation optimum, snapped to a 1/1024 grid of the
        // box and kept at least 1% of the width away from either edge.
        let at = (self.model.aggregate_value(agg, &node.x) - bx.lower()) / &width;
        let k = (at * Rational::from_integer(BigInt::from(1024))).round().to_integer();
        let k = k.clamp(BigInt::from(11), BigInt::from(1013));
        Some((agg, bx.lower() + width * Rational::new(k, BigInt::from(1024))))
    }

    fn search(
        &self,
        numer: &BTreeSet<usize>,
        denom: Option<&BTreeSet<usize>>,
        sense: Sense,
        opts: &AugmentedOptions,
        stats: &mut SolveStats,
        stop_at_first_feasible: bool,
    ) -> SideOutcome {
        let tol = &opts.tolerance;
        let feasibility_tol = tol / Rational::from_integer(BigInt::from(100));
        let Some((score, x)) = self.evaluate(&self.root, numer, denom, sense, stats) else {
            return SideOutcome::Infeasible;
        };
        let mut nodes = vec![Some(Node { boxes: self.root.clone(), score: score.clone(), x })];
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((score, 0usize)));
        let mut evaluated = 1usize;
        let mut closed_min: Option<Rational> = None;
        let mut incumbent: Option<(Rational, bool)> = None;
        let mut history = Vec::new();
        let global = |heap: &BinaryHeap<Reverse<(Rational, usize)>>, closed: &Option<Rational>| -> Option<Rational> {
            let open = heap.peek().map(|Reverse((s, _))| s.clone());
            match (open, closed.clone()) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            }
        };
        let mut converged = false;
        loop {
            let g = global(&heap, &closed_min);
            if let Some(g) = &g {
                history.push(if sense == Sense::Minimize { g.clone() } else { -g.clone() });
            }
            if let (Some(g), Some((inc, _))) = (&g, &incumbent) {
                if inc - g <= *tol {
                    converged = true;
                    break;
                }
            }
            if (stop_at_first_feasible && incumbent.is_some()) || heap.is_empty() || evaluated >= opts.node_cap {
                break;
            }
            let Reverse((score, id)) = heap.pop().unwrap();
            let node = nodes[id].take().expect("open node");
            if let Some((inc, _)) = &incumbent {
                if score >= inc - tol {
                    closed_min = Some(closed_min.map_or(score.clone(), |c| c.min(score.clone())));
                    continue;
                }
            }
            // Incumbents must be much closer to feasibility than the gap
            // tolerance, or their objective can drift past the true optimum.
            let violation = self.model.violation(&node.x[..self.model.worlds]);
            if violation <= feasibility_tol {
                let exact = violation.is_zero();
                if incumbent.as_ref().is_none_or(|(inc, _)| score < *inc) {
                    incumbent = Some((score.clone(), exact));
                }
                closed_min = Some(closed_min.map_or(score.clone(), |c| c.min(score.clone())));
                continue;
            }
            let Some((agg, split)) = self.branch_choice(&node) else {
                // Degenerate boxes pin every product, so this point is feasible.
                closed_min = Some(closed_min.map_or(score.clone(), |c| c.min(score.clone())));
                continue;
            };
            let halves = [
                ProbabilityInterval::new(node.boxes[agg].lower().clone(), split.clone()),
                ProbabilityInterval::new(split, node.boxes[agg].upper().clone()),
            ];
            for half in halves {
                let mut boxes = node.boxes.clone();
                boxes[agg] = half.expect("split inside box");
                evaluated += 1;
                if let Some((child, x)) = self.evaluate(&boxes, numer, denom, sense, stats) {
                    let child = child.max(node.score.clone());
                    nodes.push(Some(Node { boxes, score: child.clone(), x }));
                    heap.push(Reverse((child, nodes.len() - 1)));
                }
            }
        }
        match global(&heap, &closed_min) {
            None => SideOutcome::Infeasible,
            Some(bound) => SideOutcome::Done { bound, incumbent, converged, history },
        }
    }

    /// Outer interval for `p(target | given)` under `K & D`.
    pub fn entail(&self, target: &Sentence, given: &Sentence, opts: &AugmentedOptions) -> Result<AugmentedResult, EntailError> {
        if !self.has_assumptions() {
            let result = if given.is_true_literal() {
                self.linear.entail_unconditional(target)?
            } else {
                self.linear.entail_conditional(target, given)?
            };
            return Ok(AugmentedResult {
                result,
                status: BoundStatus::ConvergedWithin(opts.tolerance.clone()),
                lower_history: Vec::new(),
                upper_history: Vec::new(),
            });
        }
        let denom_set = self.ws.extension(given)?;
        let numer: BTreeSet<usize> = self.ws.extension(target)?.intersection(&denom_set).copied().collect();
        let mut stats = SolveStats::default();
        let denom = if given.is_true_literal() {
            None
        } else {
            match self.model.relaxation(&self.root).optimize(&denom_set, None, Sense::Maximize, &mut stats) {
                RatioOutcome::Infeasible => return Err(EntailError::InfeasibleAugmented),
                RatioOutcome::Optimal { value, .. } if value.is_zero() => {
                    let mut r = QueryResult::vacuous(Method::BranchAndBound, stats);
                    r.stats.bnb_nodes += 1;
                    return Ok(AugmentedResult {
                        result: r,
                        status: BoundStatus::ConvergedWithin(opts.tolerance.clone()),
                        lower_history: Vec::new(),
                        upper_history: Vec::new(),
                    });
                }
                RatioOutcome::Optimal { .. } => Some(&denom_set),
            }
        };
        let lo = self.search(&numer, denom, Sense::Minimize, opts, &mut stats, false);
        let hi = self.search(&numer, denom, Sense::Maximize, opts, &mut stats, false);
        let (
            SideOutcome::Done { bound: lo, incumbent: lo_inc, converged: lo_conv, history: lower_history },
            SideOutcome::Done { bound: hi, incumbent: hi_inc, converged: hi_conv, history: upper_history },
        ) = (lo, hi)
        else {
            return Err(EntailError::InfeasibleAugmented);
        };
        let hi = -hi;
        let attained_lo = matches!(&lo_inc, Some((v, true)) if *v == lo);
        let attained_hi = matches!(&hi_inc, Some((v, true)) if -v.clone() == hi);
        let interval = ProbabilityInterval::clamped(lo, hi).ok_or(EntailError::InfeasibleAugmented)?;
        Ok(AugmentedResult {
            result: QueryResult {
                interval: Some(interval),
                status: QueryStatus::Determined,
                attained: Attainment { lower: attained_lo, upper: attained_hi },
                method: Method::BranchAndBound,
                stats,
            },
            status: if lo_conv && hi_conv {
                BoundStatus::ConvergedWithin(opts.tolerance.clone())
            } else {
                BoundStatus::OuterBound
            },
            lower_history,
            upper_history,
        })
    }

    /// Searches for a distribution satisfying `K` and `D` (within tolerance).
    pub fn feasibility(&self, opts: &AugmentedOptions) -> Feasibility {
        let mut stats = SolveStats::default();
        match self.search(&BTreeSet::new(), None, Sense::Minimize, opts, &mut stats, true) {
            SideOutcome::Infeasible => Feasibility::Infeasible,
            SideOutcome::Done { incumbent: Some(_), .. } => Feasibility::Feasible,
            SideOutcome::Done { .. } => Feasibility::Unknown,
        }
    }
}

/// One-shot augmented entailment.
pub fn entail_augmented(
    kb: &KnowledgeBase,
    ws: &WorldSpace,
    target: &Sentence,
    given: &Sentence,
    tolerance: Rational,
    node_cap: usize,
) -> Result<AugmentedResult, EntailError> {
    AugmentedEntailment::new(kb, ws)?.entail(target, given, &AugmentedOptions { tolerance, node_cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;
    use crate::logic::{parse_sentence, DEFAULT_ATOM_CAP};
    use crate::rational::{self, int, ratio};

    fn s(text: &str) -> Sentence {
        parse_sentence(text).unwrap()
    }

    fn agg(text: &str) -> Factor {
        Factor::Aggregate(s(text))
    }

    fn setup(text: &str) -> (KnowledgeBase, WorldSpace) {
        let kb = parse_kb(text).unwrap();
        let ws = kb.world_space(DEFAULT_ATOM_CAP).unwrap();
        (kb, ws)
    }

    fn interval(lo: Rational, hi: Rational) -> ProbabilityInterval {
        ProbabilityInterval::new(lo, hi).unwrap()
    }

    #[test]
    fn encoding_examples() {
        let (_, ws) = setup("atom C D G");
        let indep = AssumptionConstraint::CondIndependence { left: s("C"), right: s("D"), given: Sentence::True };
        assert_eq!(
            encode_assumption(&indep, &ws).unwrap(),
            vec![BilinearConstraint {
                left: Product(agg("C & D"), Factor::One),
                relation: Relation::Eq,
                right: Product(agg("C"), agg("D"))
            }]
        );
        let cond = AssumptionConstraint::CondIndependence { left: s("C"), right: s("D"), given: s("G") };
        assert_eq!(
            encode_assumption(&cond, &ws).unwrap(),
            vec![BilinearConstraint {
                left: Product(agg("C & D & G"), agg("G")),
                relation: Relation::Eq,
                right: Product(agg("C & G"), agg("D & G"))
            }]
        );
        let neg = AssumptionConstraint::NegativeCorrelation(s("C"), s("D"));
        let enc = encode_assumption(&neg, &ws).unwrap();
        assert_eq!(enc[0].relation, Relation::Le);
        assert_eq!(enc[0].to_string(), "p(C & D) <= p(C)·p(D)");
        let pos = AssumptionConstraint::PositiveCorrelation(s("C"), s("D"));
        assert_eq!(encode_assumption(&pos, &ws).unwrap()[0].relation, Relation::Ge);
        let bad = AssumptionConstraint::NegativeCorrelation(s("C"), s("Z"));
        assert!(encode_assumption(&bad, &ws).is_err());
    }

    fn single(i: usize) -> Expr {
        [(i, Rational::one())].into_iter().collect()
    }

    fn holds(cs: &[LinearConstraint], x: &[Rational]) -> bool {
        cs.iter().all(|c| c.is_satisfied(x))
    }

    #[test]
    fn envelope_unit_box() {
        // variables: u = 0, v = 1, z = 2
        let env = mccormick_envelope(&single(0), &ProbabilityInterval::vacuous(), &single(1), &ProbabilityInterval::vacuous(), 2);
        // z >= 0 ; z >= u + v - 1 ; z <= v ; z <= u
        let expected = [
            LinearConstraint::new(single(2), Relation::Ge, int(0)),
            LinearConstraint::new([(0, int(-1)), (1, int(-1)), (2, int(1))].into_iter().collect(), Relation::Ge, int(-1)),
            LinearConstraint::new([(1, int(-1)), (2, int(1))].into_iter().collect(), Relation::Le, int(0)),
            LinearConstraint::new([(0, int(-1)), (2, int(1))].into_iter().collect(), Relation::Le, int(0)),
        ];
        assert_eq!(env, expected);
    }

    #[test]
    fn envelope_degenerate_box_is_exact() {
        let half = interval(ratio(1, 2), ratio(1, 2));
        let vb = interval(ratio(1, 5), ratio(3, 5));
        let env = mccormick_envelope(&single(0), &half, &single(1), &vb, 2);
        for v in [ratio(1, 5), ratio(2, 5), ratio(3, 5)] {
            let exact = &v / int(2);
            let at = |z: Rational| vec![ratio(1, 2), v.clone(), z];
            assert!(holds(&env, &at(exact.clone())));
            assert!(!holds(&env, &at(&exact + ratio(1, 1000))));
            assert!(!holds(&env, &at(&exact - ratio(1, 1000))));
        }
    }

    #[test]
    fn envelope_interior_slack() {
        let b = interval(ratio(1, 5), ratio(4, 5));
        let env = mccormick_envelope(&single(0), &b, &single(1), &b, 2);
        let at = |z: Rational| vec![ratio(1, 2), ratio(1, 2), z];
        assert!(holds(&env, &at(ratio(16, 100))));
        assert!(holds(&env, &at(ratio(34, 100))));
        assert!(!holds(&env, &at(ratio(16, 100) - ratio(1, 10_000))));
        assert!(!holds(&env, &at(ratio(34, 100) + ratio(1, 10_000))));
    }

    #[test]
    fn relax_single_constraint() {
        let (_, ws) = setup("atom A B");
        let c = &encode_assumption(&AssumptionConstraint::NegativeCorrelation(s("A"), s("B")), &ws).unwrap()[0];
        let rows = relax_mccormick(c, &ws, &BTreeMap::new(), 4).unwrap();
        // four envelope rows plus the linking row p(A∧B) − z <= 0
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[4].coefficients, [(3, int(1)), (4, int(-1))].into_iter().collect());
        assert_eq!(rows[4].relation, Relation::Le);
    }

    #[test]
    fn no_assumptions_matches_linear() {
        let (kb, ws) = setup("atom A B\n0.7 <= P(A | B)\nP(B) = 0.5");
        let aug = AugmentedEntailment::new(&kb, &ws).unwrap();
        let lin = LinearEntailment::new(&kb, &ws).unwrap();
        for (t, g) in [("A & B", "true"), ("A", "B"), ("B", "A")] {
            let r = aug.entail(&s(t), &s(g), &AugmentedOptions::default()).unwrap();
            let expected = if g == "true" { lin.entail_unconditional(&s(t)) } else { lin.entail_conditional(&s(t), &s(g)) };
            assert_eq!(r.result, expected.unwrap());
        }
    }

    #[test]
    fn independence_pins_product() {
        let (kb, ws) = setup("atom A B\nP(A) = 0.5\nP(B) = 0.4\nassume indep(A, B)");
        let r = entail_augmented(&kb, &ws, &s("A & B"), &Sentence::True, default_tolerance(), 100).unwrap();
        assert_eq!(r.result.interval, Some(interval(ratio(1, 5), ratio(1, 5))));
        assert_eq!(r.status, BoundStatus::ConvergedWithin(default_tolerance()));
        assert!(r.result.stats.bnb_nodes <= 100);
        assert_eq!(r.result.method, Method::BranchAndBound);
    }

    #[test]
    fn negative_correlation_caps_conjunction() {
        let (kb, ws) = setup("atom A B\nP(A) = 0.5\nP(B) = 0.4\nassume negcorr(A, B)");
        let r = entail_augmented(&kb, &ws, &s("A & B"), &Sentence::True, default_tolerance(), 100).unwrap();
        assert_eq!(r.result.interval, Some(interval(int(0), ratio(1, 5))));
        assert!(matches!(r.status, BoundStatus::ConvergedWithin(_)));
    }

    #[test]
    fn independence_with_free_marginals_needs_branching() {
        // p(A∧B) = p(A)p(B) with p(A) >= 0.6, p(B) >= 0.7  ->  p(A∧B) ∈ [0.42, 1]
        let (kb, ws) = setup("atom A B\nP(A) >= 0.6\nP(B) >= 0.7\nassume indep(A, B)");
        let aug = AugmentedEntailment::new(&kb, &ws).unwrap();
        let opts = AugmentedOptions { tolerance: ratio(1, 10_000), node_cap: 2_000 };
        let r = aug.entail(&s("A & B"), &Sentence::True, &opts).unwrap();
        let iv = r.result.interval.unwrap();
        assert!(*iv.lower() <= ratio(42, 100));
        assert!(ratio(42, 100) - iv.lower() <= ratio(1, 10_000));
        assert_eq!(*iv.upper(), int(1));
        assert!(matches!(r.status, BoundStatus::ConvergedWithin(_)));
        // bounds tighten monotonically
        assert!(r.lower_history.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.upper_history.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn node_cap_yields_outer_bound() {
        // u + v - uv = 3/4 puts the maximum of uv = 1/4 inside the box
        let (kb, ws) = setup("atom A B\nP((A | B)) = 0.75\nassume indep(A, B)");
        let aug = AugmentedEntailment::new(&kb, &ws).unwrap();
        let opts = AugmentedOptions { tolerance: ratio(1, 1_000_000_000), node_cap: 3 };
        let r = aug.entail(&s("A & B"), &Sentence::True, &opts).unwrap();
        assert_eq!(r.status, BoundStatus::OuterBound);
        assert!(*r.result.interval.as_ref().unwrap().upper() >= ratio(1, 4));

        let opts = AugmentedOptions { tolerance: ratio(1, 1_000_000), node_cap: 10_000 };
        let r = aug.entail(&s("A & B"), &Sentence::True, &opts).unwrap();
        let iv = r.result.interval.unwrap();
        assert!(matches!(r.status, BoundStatus::ConvergedWithin(_)));
        assert!(*iv.upper() >= ratio(1, 4) && iv.upper() - ratio(1, 4) <= ratio(1, 1_000_000), "{} {}", rational::to_decimal(iv.upper(), 12), r.result.stats.bnb_nodes);
    }

    #[test]
    fn inconsistent_assumption_detected() {
        // p(A∧B) = 0 by background but indep forces p(A∧B) = 0.25
        let (kb, ws) = setup("atom A B\nbackground !(A & B)\nP(A) = 0.5\nP(B) = 0.5\nassume indep(A, B)");
        let aug = AugmentedEntailment::new(&kb, &ws).unwrap();
        assert_eq!(aug.entail(&s("A"), &Sentence::True, &AugmentedOptions::default()).unwrap_err(), EntailError::InfeasibleAugmented);
        assert_eq!(aug.feasibility(&AugmentedOptions::default()), Feasibility::Infeasible);

        let (kb, ws) = setup("atom A B\nP(A) = 0.5\nassume indep(A, B)");
        let aug = AugmentedEntailment::new(&kb, &ws).unwrap();
        assert_eq!(aug.feasibility(&AugmentedOptions::default()), Feasibility::Feasible);
    }

    #[test]
    fn conditional_independence_query() {
        // A ⟂ B | C with p(A|C) = 0.5, p(B|C) = 0.4 pins p(A∧B | C) = 0.2
        let (kb, ws) = setup("atom A B C\nP(A | C) = 0.5\nP(B | C) = 0.4\nP(C) = 0.5\nassume indep(A, B | C)");
        let aug = AugmentedEntailment::new(&kb, &ws).unwrap();
        let opts = AugmentedOptions { tolerance: ratio(1, 100_000), node_cap: 5_000 };
        let r = aug.entail(&s("A & B"), &s("C"), &opts).unwrap();
        let iv = r.result.interval.unwrap();
        assert!(iv.contains(&ratio(1, 5)));
        assert!(iv.width() <= ratio(1, 10_000), "{iv}");
    }

    #[test]
    fn assumption_only_narrows() {
        let (kb, ws) = setup("atom A B\n0.2 <= P(A) <= 0.7\n0.3 <= P(B) <= 0.9\nassume poscorr(A, B)");
        let aug = AugmentedEntailment::new(&kb, &ws).unwrap();
        let lin = LinearEntailment::new(&kb, &ws).unwrap();
        let opts = AugmentedOptions { tolerance: ratio(1, 10_000), node_cap: 2_000 };
        for t in ["A & B", "A | B", "A & !B"] {
            let a = aug.entail(&s(t), &Sentence::True, &opts).unwrap().result.interval.unwrap();
            let l = lin.entail_unconditional(&s(t)).unwrap().interval.unwrap();
            assert!(l.is_superset_of(&a), "{t}: {l} vs {a}");
        }
    }
}
