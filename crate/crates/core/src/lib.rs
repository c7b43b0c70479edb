//! Interval-valued probabilistic knowledge over possible worlds.
//!
//! A knowledge base holds conditional probability interval axioms
//! `q <= p(A | B) <= r` plus augmenting assumptions (independence,
//! correlation signs). Entailment computes the tightest interval for any
//! query over every distribution on the possible worlds that satisfies the
//! constraints, exactly in rational arithmetic where the constraints are
//! linear and as sound outer bounds where they are bilinear.

pub mod augmented;
pub mod diagnose;
pub mod ds;
pub mod entail;
pub mod interval;
pub mod kb;
pub mod logic;
pub mod maxent;
pub mod oracle;
pub mod propagate;
pub mod rational;
pub mod simplex;

pub use augmented::{AugmentedEntailment, AugmentedOptions, AugmentedResult, BoundStatus, Feasibility};
pub use diagnose::{diagnose_inconsistency, DiagnoseError};
pub use entail::{Attainment, EntailError, LinearEntailment, Method, QueryResult, QueryStatus, SolveStats};
pub use interval::{IntervalError, ProbabilityInterval};
pub use kb::{parse_kb, AssumptionConstraint, CpiAxiom, KbError, KnowledgeBase, LinearConstraint, Query, Relation};
pub use logic::{parse_sentence, Atom, LogicError, Sentence, World, WorldSpace, DEFAULT_ATOM_CAP};
pub use maxent::{solve_maxent, MaxEntOptions, MaxEntSolution};
pub use propagate::{propagate_fixpoint, BoundsTable, RuleSet};
pub use rational::Rational;
