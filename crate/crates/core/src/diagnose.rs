//! Minimal conflicting axiom subsets for inconsistent knowledge bases.

use thiserror::Error;

use crate::augmented::{AugmentedEntailment, AugmentedOptions, Feasibility};
use crate::entail::{EntailError, LinearEntailment};
use crate::kb::KnowledgeBase;
use crate::logic::{LogicError, WorldSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnoseError {
    #[error("the knowledge base is consistent; there is nothing to diagnose")]
    NotInfeasible,
    #[error("consistency of the knowledge base with its assumptions could not be decided within the node cap")]
    Undecided,
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// Feasibility of `K & D`; an undecided search counts as feasible so the
/// filter never drops an axiom it cannot show to be redundant.
fn feasible(kb: &KnowledgeBase, ws: &WorldSpace, opts: &AugmentedOptions) -> Result<Option<bool>, LogicError> {
    if kb.assumptions.is_empty() {
        return match LinearEntailment::new(kb, ws) {
            Ok(lin) => Ok(Some(lin.feasible())),
            Err(EntailError::Logic(e)) => Err(e),
            Err(_) => Ok(Some(false)),
        };
    }
    match AugmentedEntailment::new(kb, ws) {
        Ok(aug) => Ok(match aug.feasibility(opts) {
            Feasibility::Feasible => Some(true),
            Feasibility::Infeasible => Some(false),
            Feasibility::Unknown => None,
        }),
        Err(EntailError::Logic(e)) => Err(e),
        Err(_) => Ok(Some(false)),
    }
}

/// Deletion filter over the axioms, with background and assumptions held
/// fixed. Returns 0-based indices into `kb.axioms`, ascending: the subset is
/// infeasible and dropping any one member makes it feasible.
pub fn diagnose_inconsistency(kb: &KnowledgeBase, ws: &WorldSpace) -> Result<Vec<usize>, DiagnoseError> {
    diagnose_with(kb, ws, &AugmentedOptions::default())
}

pub fn diagnose_with(kb: &KnowledgeBase, ws: &WorldSpace, opts: &AugmentedOptions) -> Result<Vec<usize>, DiagnoseError> {
    match feasible(kb, ws, opts)? {
        Some(false) => {}
        Some(true) => return Err(DiagnoseError::NotInfeasible),
        None => return Err(DiagnoseError::Undecided),
    }
    let mut keep: Vec<usize> = (0..kb.axioms.len()).collect();
    let mut i = 0;
    while i < keep.len() {
        let mut trial = keep.clone();
        trial.remove(i);
        if feasible(&kb.restricted_to(&trial), ws, opts)? == Some(false) {
            keep = trial;
        } else {
            i += 1;
        }
    }
    Ok(keep)
}
