//! One function per subcommand, each producing a report and an exit code.

use std::collections::BTreeMap;
use std::io::Read;

use cpi_core::augmented::default_tolerance;
use cpi_core::diagnose::diagnose_with;
use cpi_core::ds::{
    combine_evidence, envelope_from_entailment, frame_from_kb, masses_from_kb, mass_from_bel, DsError, Frame, LowerEnvelope,
    MassFunction, Representation, Subset,
};
use cpi_core::kb::format_probability;
use cpi_core::maxent::precision_report;
use cpi_core::oracle::{grid_bounds, vertex_bounds, GridSearchConfig, OracleBounds, GRID_WORLD_LIMIT};
use cpi_core::propagate::{propagate_with, verdict, PropagationError, PropagationOptions, Verdict};
use cpi_core::{
    parse_kb, AugmentedEntailment, AugmentedOptions, BoundStatus, EntailError, Feasibility, KnowledgeBase, LinearEntailment,
    MaxEntOptions, Query, QueryResult, QueryStatus, RuleSet, Sentence, SolveStats, WorldSpace,
};

use crate::report::{
    Attained, Bounds, CliError, Conflict, DsSummary, Exact, FocalMass, MaxentSummary, Outcome, PropagationSummary, QueryLine,
    Report, SetBounds, Stats, WorldMass,
};
use crate::Options;

const EXIT_INCONSISTENT: u8 = 2;
const EXIT_TOTAL_CONFLICT: u8 = 3;

fn load(opts: &Options) -> Result<(KnowledgeBase, WorldSpace), CliError> {
    let kb = load_kb(opts)?;
    let ws = kb.world_space(opts.atom_cap).map_err(logic_error)?;
    Ok((kb, ws))
}

fn load_kb(opts: &Options) -> Result<KnowledgeBase, CliError> {
    let path = &opts.input;
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Input(format!("reading standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
    };
    parse_kb(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn augmented_options(opts: &Options) -> AugmentedOptions {
    AugmentedOptions { tolerance: opts.tolerance.clone().unwrap_or_else(default_tolerance), node_cap: opts.node_cap }
}

fn logic_error(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

enum Consistency {
    Consistent,
    /// The branch-and-bound search neither found a feasible point nor ruled one out.
    Undecided,
    /// 0-based indices of a minimal conflicting axiom set.
    Inconsistent(Vec<usize>),
}

fn consistency(kb: &KnowledgeBase, ws: &WorldSpace, opts: &AugmentedOptions) -> Result<Consistency, CliError> {
    let feasible = if kb.assumptions.is_empty() {
        match LinearEntailment::new(kb, ws) {
            Ok(lin) => Some(lin.feasible()),
            Err(EntailError::Logic(e)) => return Err(logic_error(e)),
            Err(_) => Some(false),
        }
    } else {
        match AugmentedEntailment::new(kb, ws) {
            Ok(aug) => match aug.feasibility(opts) {
                Feasibility::Feasible => Some(true),
                Feasibility::Infeasible => Some(false),
                Feasibility::Unknown => None,
            },
            Err(EntailError::Logic(e)) => return Err(logic_error(e)),
            Err(_) => Some(false),
        }
    };
    match feasible {
        Some(true) => Ok(Consistency::Consistent),
        None => Ok(Consistency::Undecided),
        Some(false) => match diagnose_with(kb, ws, opts) {
            Ok(d) => Ok(Consistency::Inconsistent(d)),
            Err(e) => Err(logic_error(e)),
        },
    }
}

fn base_report(ws: &WorldSpace) -> Report {
    Report { feasible: true, stats: Stats { worlds: ws.len(), ..Stats::default() }, ..Report::default() }
}

fn inconsistent(kb: &KnowledgeBase, ws: &WorldSpace, diagnosis: &[usize]) -> Outcome {
    let mut report = base_report(ws);
    report.feasible = false;
    report.diagnosis = Some(diagnosis.iter().map(|i| i + 1).collect());
    report.head.push("inconsistent: no distribution satisfies the knowledge base".into());
    if diagnosis.is_empty() {
        report.head.push("the background and assumptions conflict on their own".into());
    } else {
        report.head.push("minimal conflicting axioms:".into());
        for &i in diagnosis {
            report.head.push(format!("  axiom {}: {}", i + 1, kb.axioms[i]));
        }
    }
    if !kb.assumptions.is_empty() {
        report.head.push("(assumptions held fixed)".into());
    }
    Outcome { report, code: EXIT_INCONSISTENT }
}

/// Runs `f` over `items` on up to `jobs` threads; results keep input order.
fn in_order<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("query worker panicked")).collect()
    })
}

enum Engine<'a> {
    Linear(LinearEntailment<'a>),
    Augmented(AugmentedEntailment<'a>, AugmentedOptions),
}

impl Engine<'_> {
    fn solve(&self, q: &Query) -> (QueryLine, SolveStats) {
        let text = q.to_string();
        match self {
            Engine::Linear(lin) => match lin.entail_query(q) {
                Ok(r) => (line_from(text, &r, "exact"), r.stats),
                Err(_) => (QueryLine::new(text, QueryStatus::Infeasible.as_str(), "lp"), SolveStats::default()),
            },
            Engine::Augmented(aug, opts) => match aug.entail(&q.target, &q.given, opts) {
                Ok(r) => {
                    let bound = match r.status {
                        _ if r.result.method == cpi_core::Method::Lp => "exact",
                        BoundStatus::ConvergedWithin(_) => "converged",
                        BoundStatus::OuterBound => "outer",
                    };
                    (line_from(text, &r.result, bound), r.result.stats)
                }
                Err(_) => (QueryLine::new(text, QueryStatus::Infeasible.as_str(), "branch-and-bound"), SolveStats::default()),
            },
        }
    }
}

fn line_from(text: String, r: &QueryResult, bound: &'static str) -> QueryLine {
    let mut line = QueryLine::new(text, r.status.as_str(), r.method.as_str());
    if let Some(iv) = &r.interval {
        line = line.with_interval(iv);
    }
    line.attained = Attained { lower: r.attained.lower, upper: r.attained.upper };
    line.bound = bound;
    line.nodes = r.stats.bnb_nodes;
    line
}

fn absorb(stats: &mut Stats, s: &SolveStats) {
    stats.lp_pivots += s.lp_pivots;
    stats.bnb_nodes += s.bnb_nodes;
}

fn parse_rules(opts: &Options) -> Result<Option<RuleSet>, CliError> {
    match &opts.propagate {
        None => Ok(None),
        Some(text) => text.parse().map(Some).map_err(|e: PropagationError| CliError::Usage(e.to_string())),
    }
}

fn check_maxent_allowed(kb: &KnowledgeBase) -> Result<(), CliError> {
    if kb.assumptions.is_empty() {
        Ok(())
    } else {
        Err(CliError::Usage("maximum entropy works on the linear axioms only; remove the `assume` lines".into()))
    }
}

fn world_label(ws: &WorldSpace, i: usize) -> String {
    let values = ws.values(i);
    if values.is_empty() {
        return "(empty assignment)".into();
    }
    ws.atoms()
        .iter()
        .zip(values)
        .map(|(a, v)| if v { a.name().to_string() } else { format!("!{}", a.name()) })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Adds maxent points and precision classes to the query lines.
fn attach_maxent(kb: &KnowledgeBase, ws: &WorldSpace, report: &mut Report, places: u32) -> Result<(), CliError> {
    let (sol, entries) = precision_report(kb, ws, &kb.queries, &MaxEntOptions::default()).map_err(logic_error)?;
    for (line, e) in report.queries.iter_mut().zip(&entries) {
        line.maxent = Some(e.maxent);
        line.precision = Some(e.precision.as_str());
    }
    report.tail.push(format!(
        "maxent: entropy {}, kkt residual {:.3e}, {} iterations{}",
        crate::report::float_text(sol.entropy, places),
        sol.kkt_residual,
        sol.iterations,
        if sol.converged { "" } else { " (iteration cap reached)" }
    ));
    report.maxent = Some(MaxentSummary {
        entropy: sol.entropy,
        kkt_residual: sol.kkt_residual,
        iterations: sol.iterations,
        converged: sol.converged,
        distribution: sol
            .distribution
            .iter()
            .enumerate()
            .map(|(i, &p)| WorldMass { world: world_label(ws, i), p })
            .collect(),
    });
    Ok(())
}

/// Sentences propagation should track for the knowledge base's queries.
fn query_sentences(kb: &KnowledgeBase) -> Vec<Sentence> {
    let mut out = Vec::new();
    for q in &kb.queries {
        out.push(q.target.clone());
        if !q.given.is_true_literal() {
            out.push(q.given.clone());
        }
    }
    out
}

fn propagation_failure(ws: &WorldSpace, rules: RuleSet, err: PropagationError) -> Outcome {
    let mut report = base_report(ws);
    report.head.push(format!("propagation failed: {err}"));
    if rules.fuzzy_minmax {
        report.head.push("the knowledge base itself is consistent; the fuzzy rule produced the contradiction".into());
    }
    report.propagation =
        Some(PropagationSummary { rules: rules_text(rules), sweeps: 0, converged: false, verdict: Some(Verdict::Unsound.as_str()) });
    Outcome { report, code: EXIT_INCONSISTENT }
}

fn rules_text(r: RuleSet) -> String {
    let mut parts = Vec::new();
    for (on, name) in [
        (r.negation, "negation"),
        (r.frechet_conjunction, "frechet_conj"),
        (r.frechet_disjunction, "frechet_disj"),
        (r.conditional_chain, "chain"),
        (r.fuzzy_minmax, "fuzzy"),
    ] {
        if on {
            parts.push(name);
        }
    }
    parts.join(",")
}

pub fn entail(opts: &Options) -> Result<Outcome, CliError> {
    let (kb, ws) = load(opts)?;
    let rules = parse_rules(opts)?;
    if opts.maxent {
        check_maxent_allowed(&kb)?;
    }
    if opts.judge && rules.is_none() {
        return Err(CliError::Usage("--judge needs --propagate".into()));
    }
    let aug_opts = augmented_options(opts);
    let state = consistency(&kb, &ws, &aug_opts)?;
    if let Consistency::Inconsistent(d) = &state {
        return Ok(inconsistent(&kb, &ws, d));
    }
    let mut report = base_report(&ws);
    if matches!(state, Consistency::Undecided) {
        report.head.push("note: consistency with the assumptions is undecided within the node cap".into());
    }
    let engine = if kb.assumptions.is_empty() {
        Engine::Linear(LinearEntailment::new(&kb, &ws).map_err(logic_error)?)
    } else {
        Engine::Augmented(AugmentedEntailment::new(&kb, &ws).map_err(logic_error)?, aug_opts)
    };
    for (line, stats) in in_order(&kb.queries, opts.jobs as usize, |q| engine.solve(q)) {
        absorb(&mut report.stats, &stats);
        report.queries.push(line);
    }
    if opts.maxent {
        attach_maxent(&kb, &ws, &mut report, opts.precision)?;
    }
    if let Some(rules) = rules {
        let popts = PropagationOptions { rules, ..PropagationOptions::default() };
        let prop = match propagate_with(&kb, &query_sentences(&kb), &popts) {
            Ok(p) => p,
            Err(e) => return Ok(propagation_failure(&ws, rules, e)),
        };
        report.stats.sweeps = prop.sweeps;
        let mut worst = Verdict::SoundAndComplete;
        for (line, q) in report.queries.iter_mut().zip(&kb.queries) {
            let propagated = if q.given.is_true_literal() { prop.table.get(&q.target).cloned() } else { None };
            if opts.judge {
                if let (Some(p), Some(lo), Some(hi)) = (&propagated, &line.lower, &line.upper) {
                    let entailed = cpi_core::ProbabilityInterval::new(lo.0.clone(), hi.0.clone()).expect("valid bounds");
                    let v = verdict(p, &entailed);
                    worst = worst.max(v);
                    line.verdict = Some(v.as_str());
                }
            }
            line.propagated = Some(propagated.as_ref().map(Bounds::of));
        }
        let overall = opts.judge.then_some(worst.as_str());
        if let Some(v) = overall {
            report.tail.push(format!("propagation verdict: {v}"));
        }
        report.propagation =
            Some(PropagationSummary { rules: rules_text(rules), sweeps: prop.sweeps, converged: prop.converged, verdict: overall });
    }
    Ok(Outcome::ok(report))
}

pub fn propagate(opts: &Options) -> Result<Outcome, CliError> {
    let (kb, ws) = load(opts)?;
    let rules = parse_rules(opts)?.unwrap_or_default();
    let aug_opts = augmented_options(opts);
    let state = consistency(&kb, &ws, &aug_opts)?;
    if let Consistency::Inconsistent(d) = &state {
        return Ok(inconsistent(&kb, &ws, d));
    }
    let popts = PropagationOptions { rules, ..PropagationOptions::default() };
    let prop = match propagate_with(&kb, &query_sentences(&kb), &popts) {
        Ok(p) => p,
        Err(e) => return Ok(propagation_failure(&ws, rules, e)),
    };
    let mut report = base_report(&ws);
    report.stats.sweeps = prop.sweeps;
    let entailed: Option<BTreeMap<Sentence, cpi_core::ProbabilityInterval>> = if opts.judge {
        let lin = LinearEntailment::new(&kb, &ws).map_err(logic_error)?;
        let mut table = BTreeMap::new();
        for (s, _) in prop.table.iter() {
            let r = lin.entail_unconditional(s).map_err(logic_error)?;
            absorb(&mut report.stats, &r.stats);
            table.insert(s.clone(), r.interval.expect("consistent knowledge base"));
        }
        Some(table)
    } else {
        None
    };
    let mut worst = Verdict::SoundAndComplete;
    for (s, iv) in prop.table.iter() {
        let mut line = QueryLine::new(format_probability(s, &Sentence::True), QueryStatus::Determined.as_str(), "propagation").with_interval(iv);
        line.attained = Attained { lower: false, upper: false };
        if let Some(e) = entailed.as_ref().map(|t| &t[s]) {
            let v = verdict(iv, e);
            worst = worst.max(v);
            line.verdict = Some(v.as_str());
        }
        report.queries.push(line);
    }
    let overall = opts.judge.then_some(worst.as_str());
    if !kb.assumptions.is_empty() {
        report.head.push("note: propagation and judging use the linear axioms only".into());
    }
    report.tail.push(format!(
        "propagation: rules {}, {} changing sweeps, {}",
        rules_text(rules),
        prop.sweeps,
        if prop.converged { "fixpoint reached" } else { "sweep cap reached" }
    ));
    if let Some(v) = overall {
        report.tail.push(format!("verdict: {v}"));
    }
    report.propagation =
        Some(PropagationSummary { rules: rules_text(rules), sweeps: prop.sweeps, converged: prop.converged, verdict: overall });
    Ok(Outcome::ok(report))
}

pub fn maxent(opts: &Options) -> Result<Outcome, CliError> {
    let (kb, ws) = load(opts)?;
    check_maxent_allowed(&kb)?;
    let state = consistency(&kb, &ws, &augmented_options(opts))?;
    if let Consistency::Inconsistent(d) = &state {
        return Ok(inconsistent(&kb, &ws, d));
    }
    let mut report = base_report(&ws);
    let lin = LinearEntailment::new(&kb, &ws).map_err(logic_error)?;
    for q in &kb.queries {
        let r = lin.entail_query(q).map_err(logic_error)?;
        absorb(&mut report.stats, &r.stats);
        report.queries.push(line_from(q.to_string(), &r, "exact"));
    }
    attach_maxent(&kb, &ws, &mut report, opts.precision)?;
    let dist = &report.maxent.as_ref().expect("maxent summary").distribution;
    report.head.push("maximum-entropy distribution:".into());
    for w in dist {
        report.head.push(format!("  {}: {}", w.world, crate::report::float_text(w.p, opts.precision)));
    }
    Ok(Outcome::ok(report))
}

pub fn check(opts: &Options) -> Result<Outcome, CliError> {
    let (kb, ws) = load(opts)?;
    match consistency(&kb, &ws, &augmented_options(opts))? {
        Consistency::Inconsistent(d) => Ok(inconsistent(&kb, &ws, &d)),
        Consistency::Consistent => {
            let mut report = base_report(&ws);
            report.head.push(format!("consistent: {} axioms over {} worlds", kb.axioms.len(), ws.len()));
            Ok(Outcome::ok(report))
        }
        Consistency::Undecided => {
            let mut report = base_report(&ws);
            report.head.push("undecided: no feasible point found and none ruled out within the node cap".into());
            Ok(Outcome::ok(report))
        }
    }
}

pub fn oracle(opts: &Options) -> Result<Outcome, CliError> {
    let (kb, ws) = load(opts)?;
    let mut report = base_report(&ws);
    let lin = LinearEntailment::new(&kb, &ws).map_err(logic_error)?;
    report.feasible = lin.feasible();
    let resolution = if ws.len() == GRID_WORLD_LIMIT { 100 } else { 200 };
    let grid = GridSearchConfig { refinements: 2, ..GridSearchConfig::aligned(&kb, resolution) };
    for q in &kb.queries {
        let text = q.to_string();
        let mut line = if kb.assumptions.is_empty() {
            match vertex_bounds(&kb, &ws, &q.target, &q.given).map_err(logic_error)? {
                OracleBounds::Interval(iv) => QueryLine::new(text, QueryStatus::Determined.as_str(), "vertex").with_interval(&iv),
                OracleBounds::VacuousByZeroAntecedent => QueryLine::new(text, QueryStatus::VacuousByZeroAntecedent.as_str(), "vertex")
                    .with_interval(&cpi_core::ProbabilityInterval::vacuous()),
                OracleBounds::Infeasible => QueryLine::new(text, QueryStatus::Infeasible.as_str(), "vertex"),
            }
        } else {
            QueryLine::new(text, "skipped", "vertex")
        };
        if ws.len() <= GRID_WORLD_LIMIT {
            let g = grid_bounds(&kb, &ws, &q.target, &q.given, &grid).map_err(logic_error)?;
            line.grid = Some(g.interval().map(Bounds::of));
        }
        report.queries.push(line);
    }
    Ok(Outcome::ok(report))
}

fn set_names(frame: &Frame, a: Subset) -> Vec<String> {
    (0..frame.len()).filter(|i| a & (1 << i) != 0).map(|i| frame.names()[i].clone()).collect()
}

fn focal(m: &MassFunction) -> Vec<FocalMass> {
    m.focal().map(|(a, v)| FocalMass { set: set_names(m.frame(), a), mass: Exact(v.clone()) }).collect()
}

fn ds_error(e: DsError) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn ds_combine(opts: &Options) -> Result<Outcome, CliError> {
    let kb = load_kb(opts)?;
    let (frame, _) = frame_from_kb(&kb).map_err(ds_error)?;
    let sources = masses_from_kb(&kb, &frame).map_err(ds_error)?;
    if sources.is_empty() {
        return Err(CliError::Usage("no `mass` lines to combine".into()));
    }
    // evidence combination needs no world space; a file may declare only a frame
    let mut report = Report { feasible: true, ..Report::default() };
    if !kb.atoms.is_empty() {
        let ws = kb.world_space(opts.atom_cap).map_err(logic_error)?;
        report.stats.worlds = ws.len();
        report.feasible = !matches!(consistency(&kb, &ws, &augmented_options(opts))?, Consistency::Inconsistent(_));
    }
    let mut summary = DsSummary { frame: frame.names().to_vec(), ..DsSummary::default() };
    for (name, m) in &sources {
        report.head.push(format!("source {name}: {m}"));
    }
    let masses: Vec<MassFunction> = sources.iter().map(|(_, m)| m.clone()).collect();
    match combine_evidence(&masses) {
        Ok((combined, kappas)) => {
            for ((name, _), k) in sources.iter().skip(1).zip(&kappas) {
                report.tail.push(format!("conflict when adding {name}: κ = {k}"));
                summary.conflicts.push(Conflict { source: name.clone(), kappa: Exact(k.clone()) });
            }
            report.tail.push(format!("combined: {combined}"));
            summary.combined = Some(focal(&combined));
            report.ds = Some(summary);
            Ok(Outcome::ok(report))
        }
        Err(DsError::TotalConflict { source_index }) => {
            let name = &sources[source_index].0;
            report.tail.push(format!("total conflict: source {name} contradicts the evidence combined before it (κ = 1)"));
            summary.total_conflict = Some(name.clone());
            report.ds = Some(summary);
            Ok(Outcome { report, code: EXIT_TOTAL_CONFLICT })
        }
        Err(e) => Err(ds_error(e)),
    }
}

/// Entailed envelope over the frame, or an early outcome for inconsistent input.
fn envelope(opts: &Options) -> Result<Result<(Report, LowerEnvelope), Outcome>, CliError> {
    let (kb, ws) = load(opts)?;
    if !kb.assumptions.is_empty() {
        return Err(CliError::Usage("envelopes are entailed from the linear axioms only; remove the `assume` lines".into()));
    }
    let (frame, mapping) = frame_from_kb(&kb).map_err(ds_error)?;
    let mapping: Vec<Sentence> = frame
        .names()
        .iter()
        .zip(mapping)
        .map(|(n, s)| s.ok_or_else(|| CliError::Usage(format!("frame element `{n}` has no sentence; write `{n}=<sentence>`"))))
        .collect::<Result<_, _>>()?;
    if let Consistency::Inconsistent(d) = consistency(&kb, &ws, &augmented_options(opts))? {
        return Ok(Err(inconsistent(&kb, &ws, &d)));
    }
    let env = envelope_from_entailment(&kb, &ws, &frame, &mapping).map_err(ds_error)?;
    let mut report = base_report(&ws);
    let mut rows = Vec::new();
    for a in 1..=frame.full() {
        let iv = cpi_core::ProbabilityInterval::new(env.lower(a).clone(), env.upper(a)).expect("envelope bounds");
        report.head.push(format!("{}: {}", frame.label(a), crate::report::interval_text(&iv, opts.precision)));
        rows.push(SetBounds { set: set_names(&frame, a), lower: Exact(env.lower(a).clone()), upper: Exact(env.upper(a)) });
    }
    report.ds = Some(DsSummary { frame: frame.names().to_vec(), envelope: Some(rows), ..DsSummary::default() });
    Ok(Ok((report, env)))
}

pub fn ds_envelope(opts: &Options) -> Result<Outcome, CliError> {
    Ok(match envelope(opts)? {
        Ok((report, _)) => Outcome::ok(report),
        Err(outcome) => outcome,
    })
}

pub fn ds_representable(opts: &Options) -> Result<Outcome, CliError> {
    let (mut report, env) = match envelope(opts)? {
        Ok(x) => x,
        Err(outcome) => return Ok(outcome),
    };
    let frame = env.frame().clone();
    let summary = report.ds.as_mut().expect("envelope summary");
    match mass_from_bel(&env) {
        Representation::Representable(m) => {
            report.tail.push(format!("representable: {m}"));
            summary.representable = Some(true);
            summary.masses = Some(focal(&m));
        }
        Representation::NotRepresentable { witness, mass } => {
            report.tail.push(format!("NOT representable: m({}) = {mass}", frame.label(witness)));
            summary.representable = Some(false);
            summary.witness = Some(FocalMass { set: set_names(&frame, witness), mass: Exact(mass) });
        }
    }
    Ok(Outcome::ok(report))
}
