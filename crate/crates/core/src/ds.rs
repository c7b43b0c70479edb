//! Dempster-Shafer evidence: mass functions, belief and plausibility,
//! Dempster's rule, and the bridge to entailed lower envelopes.
//!
//! Subsets of a frame are bitmasks; bit `i` is the `i`-th element.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::entail::{EntailError, LinearEntailment, RatioOutcome, SolveStats};
use crate::kb::KnowledgeBase;
use crate::logic::{Sentence, WorldSpace};
use crate::rational::Rational;
use crate::simplex::Sense;

pub const DEFAULT_FRAME_CAP: usize = 16;

pub type Subset = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DsError {
    #[error("a frame needs at least one element")]
    EmptyFrame,
    #[error("frame element `{0}` is listed twice")]
    DuplicateElement(String),
    #[error("frame has {size} elements; the limit is {cap}")]
    FrameTooLarge { size: usize, cap: usize },
    #[error("`{0}` is not an element of the frame")]
    UnknownElement(String),
    #[error("mass {value} on {subset} lies outside [0, 1]")]
    MassOutOfRange { subset: String, value: Rational },
    #[error("the empty set cannot carry mass")]
    MassOnEmptySet,
    #[error("masses sum to {0}, not 1")]
    MassSum(Rational),
    #[error("mass functions are over different frames")]
    FrameMismatch,
    #[error("evidence source {source_index} conflicts totally with the sources combined before it")]
    TotalConflict { source_index: usize },
    #[error("no evidence sources to combine")]
    NoSources,
    #[error("lower envelope: {0}")]
    InvalidEnvelope(String),
    #[error("frame mapping: {0}")]
    FrameMapping(String),
    #[error(transparent)]
    Entail(#[from] EntailError),
}

/// Ordered, named, mutually exclusive and exhaustive hypotheses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    names: Vec<String>,
}

impl Frame {
    pub fn new(names: Vec<String>) -> Result<Self, DsError> {
        Self::with_cap(names, DEFAULT_FRAME_CAP)
    }

    pub fn with_cap(names: Vec<String>, cap: usize) -> Result<Self, DsError> {
        if names.is_empty() {
            return Err(DsError::EmptyFrame);
        }
        if names.len() > cap.min(31) {
            return Err(DsError::FrameTooLarge { size: names.len(), cap: cap.min(31) });
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n) {
                return Err(DsError::DuplicateElement(n.clone()));
            }
        }
        Ok(Frame { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The whole frame Θ.
    pub fn full(&self) -> Subset {
        ((1u64 << self.names.len()) - 1) as Subset
    }

    pub fn subset_count(&self) -> usize {
        1 << self.names.len()
    }

    pub fn complement(&self, a: Subset) -> Subset {
        self.full() & !a
    }

    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<Subset, DsError> {
        let mut mask = 0;
        for n in names {
            let i = self
                .names
                .iter()
                .position(|m| m == n.as_ref())
                .ok_or_else(|| DsError::UnknownElement(n.as_ref().to_string()))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    /// `Θ`, `∅` or `{a, b}`.
    pub fn label(&self, a: Subset) -> String {
        if a == self.full() && self.len() > 1 {
            return "Θ".to_string();
        }
        if a == 0 {
            return "∅".to_string();
        }
        let parts: Vec<&str> = (0..self.len()).filter(|i| a & (1 << i) != 0).map(|i| self.names[i].as_str()).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Basic probability assignment: nonnegative, sums to one, nothing on ∅.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassFunction {
    frame: Frame,
    masses: BTreeMap<Subset, Rational>,
}

impl MassFunction {
    /// Zero entries are dropped; repeated subsets are summed.
    pub fn new(frame: Frame, entries: impl IntoIterator<Item = (Subset, Rational)>) -> Result<Self, DsError> {
        let mut masses: BTreeMap<Subset, Rational> = BTreeMap::new();
        for (s, v) in entries {
            assert!(s & !frame.full() == 0, "subset outside the frame");
            if v.is_negative() || v > Rational::one() {
                return Err(DsError::MassOutOfRange { subset: frame.label(s), value: v });
            }
            if v.is_zero() {
                continue;
            }
            if s == 0 {
                return Err(DsError::MassOnEmptySet);
            }
            *masses.entry(s).or_insert_with(Rational::zero) += v;
        }
        let total: Rational = masses.values().sum();
        if !total.is_one() {
            return Err(DsError::MassSum(total));
        }
        Ok(MassFunction { frame, masses })
    }

    /// Total ignorance, `m(Θ) = 1`.
    pub fn vacuous(frame: Frame) -> Self {
        let full = frame.full();
        MassFunction { frame, masses: [(full, Rational::one())].into_iter().collect() }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn mass(&self, a: Subset) -> Rational {
        self.masses.get(&a).cloned().unwrap_or_else(Rational::zero)
    }

    /// Focal elements with their masses, ascending by bitmask.
    pub fn focal(&self) -> impl Iterator<Item = (Subset, &Rational)> {
        self.masses.iter().map(|(&s, v)| (s, v))
    }

    pub fn is_bayesian(&self) -> bool {
        self.masses.keys().all(|s| s.count_ones() == 1)
    }
}

impl fmt::Display for MassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.focal().map(|(s, v)| format!("m({}) = {v}", self.frame.label(s))).collect();
        f.write_str(&parts.join(", "))
    }
}

/// In-place zeta transform over subsets: `f(A) <- Σ_{B ⊆ A} f(B)`.
fn zeta(values: &mut [Rational]) {
    let n = values.len().trailing_zeros();
    for bit in 0..n {
        let b = 1usize << bit;
        for mask in 0..values.len() {
            if mask & b != 0 {
                let lower = values[mask ^ b].clone();
                values[mask] += lower;
            }
        }
    }
}

/// In-place Möbius inversion: `f(A) <- Σ_{B ⊆ A} (−1)^{|A∖B|} f(B)`.
fn moebius(values: &mut [Rational]) {
    let n = values.len().trailing_zeros();
    for bit in 0..n {
        let b = 1usize << bit;
        for mask in 0..values.len() {
            if mask & b != 0 {
                let lower = values[mask ^ b].clone();
                values[mask] -= lower;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefFunction {
    frame: Frame,
    bel: Vec<Rational>,
}

impl BeliefFunction {
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn bel(&self, a: Subset) -> &Rational {
        &self.bel[a as usize]
    }

    /// `pl(A) = 1 − bel(¬A)`.
    pub fn pl(&self, a: Subset) -> Rational {
        Rational::one() - &self.bel[self.frame.complement(a) as usize]
    }

    pub fn values(&self) -> &[Rational] {
        &self.bel
    }

    pub fn to_envelope(&self) -> LowerEnvelope {
        LowerEnvelope { frame: self.frame.clone(), lower: self.bel.clone() }
    }
}

pub fn bel_from_mass(m: &MassFunction) -> BeliefFunction {
    let mut bel = vec![Rational::zero(); m.frame.subset_count()];
    for (s, v) in m.focal() {
        bel[s as usize] = v.clone();
    }
    zeta(&mut bel);
    BeliefFunction { frame: m.frame.clone(), bel }
}

/// Lower probabilities on every subset of a frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerEnvelope {
    frame: Frame,
    lower: Vec<Rational>,
}

impl LowerEnvelope {
    /// `lower` is indexed by subset bitmask.
    pub fn new(frame: Frame, lower: Vec<Rational>) -> Result<Self, DsError> {
        if lower.len() != frame.subset_count() {
            return Err(DsError::InvalidEnvelope(format!("expected {} values, got {}", frame.subset_count(), lower.len())));
        }
        if !lower[0].is_zero() || !lower[frame.full() as usize].is_one() {
            return Err(DsError::InvalidEnvelope("lower(∅) must be 0 and lower(Θ) must be 1".into()));
        }
        for (a, v) in lower.iter().enumerate() {
            if v.is_negative() || *v > Rational::one() {
                return Err(DsError::InvalidEnvelope(format!("lower({}) = {v} lies outside [0, 1]", frame.label(a as Subset))));
            }
            let c = frame.complement(a as Subset) as usize;
            if v + &lower[c] > Rational::one() {
                return Err(DsError::InvalidEnvelope(format!(
                    "lower({}) + lower({}) exceeds 1",
                    frame.label(a as Subset),
                    frame.label(c as Subset)
                )));
            }
        }
        Ok(LowerEnvelope { frame, lower })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn lower(&self, a: Subset) -> &Rational {
        &self.lower[a as usize]
    }

    pub fn upper(&self, a: Subset) -> Rational {
        Rational::one() - &self.lower[self.frame.complement(a) as usize]
    }

    pub fn values(&self) -> &[Rational] {
        &self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Representation {
    Representable(MassFunction),
    /// Möbius inversion gives `mass < 0` on `witness`: no belief function
    /// has this envelope.
    NotRepresentable { witness: Subset, mass: Rational },
}

/// Möbius inversion of the envelope. The witness is the subset with the most
/// negative mass, the smallest bitmask among ties.
pub fn mass_from_bel(lower: &LowerEnvelope) -> Representation {
    let mut m = lower.lower.clone();
    moebius(&mut m);
    let mut worst: Option<(Subset, &Rational)> = None;
    for (a, v) in m.iter().enumerate() {
        if v.is_negative() && worst.is_none_or(|(_, w)| v < w) {
            worst = Some((a as Subset, v));
        }
    }
    if let Some((witness, mass)) = worst {
        return Representation::NotRepresentable { witness, mass: mass.clone() };
    }
    let entries = m.into_iter().enumerate().map(|(a, v)| (a as Subset, v));
    Representation::Representable(MassFunction::new(lower.frame.clone(), entries).expect("Möbius masses of a normalised envelope"))
}

/// Normalised Dempster combination; also returns the conflict κ.
pub fn dempster_combine(m1: &MassFunction, m2: &MassFunction) -> Result<(MassFunction, Rational), DsError> {
    if m1.frame != m2.frame {
        return Err(DsError::FrameMismatch);
    }
    let mut joint: BTreeMap<Subset, Rational> = BTreeMap::new();
    let mut conflict = Rational::zero();
    for (b, x) in m1.focal() {
        for (c, y) in m2.focal() {
            let p = x * y;
            match b & c {
                0 => conflict += p,
                a => *joint.entry(a).or_insert_with(Rational::zero) += p,
            }
        }
    }
    if conflict.is_one() {
        return Err(DsError::TotalConflict { source_index: 1 });
    }
    let scale = Rational::one() - &conflict;
    let masses = joint.into_iter().map(|(a, v)| (a, v / &scale)).collect();
    Ok((MassFunction { frame: m1.frame.clone(), masses }, conflict))
}

/// Left fold of Dempster's rule; returns the combined mass and the conflict
/// of each step (`κ_i` when source `i` joins, for `i >= 1`).
pub fn combine_evidence(sources: &[MassFunction]) -> Result<(MassFunction, Vec<Rational>), DsError> {
    let (first, rest) = sources.split_first().ok_or(DsError::NoSources)?;
    let mut acc = first.clone();
    let mut conflicts = Vec::new();
    for (i, m) in rest.iter().enumerate() {
        let (next, k) = dempster_combine(&acc, m).map_err(|e| match e {
            DsError::TotalConflict { .. } => DsError::TotalConflict { source_index: i + 1 },
            e => e,
        })?;
        acc = next;
        conflicts.push(k);
    }
    Ok((acc, conflicts))
}

/// Entailed lower probability of every union of frame sentences. The
/// sentences must be pairwise exclusive and jointly exhaustive over `ws`.
pub fn envelope_from_entailment(
    kb: &KnowledgeBase,
    ws: &WorldSpace,
    frame: &Frame,
    mapping: &[Sentence],
) -> Result<LowerEnvelope, DsError> {
    if mapping.len() != frame.len() {
        return Err(DsError::FrameMapping(format!("{} sentences for {} frame elements", mapping.len(), frame.len())));
    }
    let mut exts = Vec::with_capacity(mapping.len());
    for s in mapping {
        exts.push(ws.extension(s).map_err(EntailError::from)?);
    }
    let mut covered = BTreeSet::new();
    for (i, e) in exts.iter().enumerate() {
        for (j, f) in exts.iter().enumerate().skip(i + 1) {
            if !e.is_disjoint(f) {
                return Err(DsError::FrameMapping(format!(
                    "`{}` and `{}` are not mutually exclusive under the background theory",
                    frame.names[i], frame.names[j]
                )));
            }
        }
        covered.extend(e.iter().copied());
    }
    if covered.len() != ws.len() {
        return Err(DsError::FrameMapping("the frame sentences are not exhaustive under the background theory".into()));
    }
    let lin = LinearEntailment::new(kb, ws)?;
    if !lin.feasible() {
        return Err(EntailError::InfeasibleKb.into());
    }
    let mut stats = SolveStats::default();
    let mut lower = vec![Rational::zero(); frame.subset_count()];
    lower[frame.full() as usize] = Rational::one();
    for a in 1..frame.full() {
        let union: BTreeSet<usize> =
            (0..frame.len()).filter(|i| a & (1 << i) != 0).flat_map(|i| exts[i].iter().copied()).collect();
        if union.is_empty() {
            continue;
        }
        match lin.system().optimize(&union, None, Sense::Minimize, &mut stats) {
            RatioOutcome::Optimal { value, .. } => lower[a as usize] = value,
            RatioOutcome::Infeasible => return Err(EntailError::InfeasibleKb.into()),
        }
    }
    LowerEnvelope::new(frame.clone(), lower)
}

/// The frame declared in a knowledge base with its sentence mapping. A
/// knowledge base without a `frame` line uses its atoms as the frame.
pub fn frame_from_kb(kb: &KnowledgeBase) -> Result<(Frame, Vec<Option<Sentence>>), DsError> {
    if kb.frame.is_empty() {
        let names = kb.atoms.iter().map(|a| a.name().to_string()).collect();
        let mapping = kb.atoms.iter().map(|a| Some(Sentence::Atom(a.clone()))).collect();
        return Ok((Frame::new(names)?, mapping));
    }
    let names = kb.frame.iter().map(|e| e.name.clone()).collect();
    Ok((Frame::new(names)?, kb.frame.iter().map(|e| e.sentence.clone()).collect()))
}

/// The knowledge base's `mass` declarations over `frame`, in file order.
pub fn masses_from_kb(kb: &KnowledgeBase, frame: &Frame) -> Result<Vec<(String, MassFunction)>, DsError> {
    kb.masses
        .iter()
        .map(|spec| {
            let entries = spec
                .entries
                .iter()
                .map(|(names, v)| Ok((frame.subset(&names.iter().collect::<Vec<_>>())?, v.clone())))
                .collect::<Result<Vec<_>, DsError>>()?;
            Ok((spec.name.clone(), MassFunction::new(frame.clone(), entries)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;
    use crate::logic::DEFAULT_ATOM_CAP;
    use crate::rational::{int, ratio};

    fn abc() -> Frame {
        Frame::new(vec!["a".into(), "b".into(), "c".into()]).unwrap()
    }

    fn mass(frame: &Frame, entries: &[(&[&str], Rational)]) -> MassFunction {
        MassFunction::new(frame.clone(), entries.iter().map(|(s, v)| (frame.subset(s).unwrap(), v.clone()))).unwrap()
    }

    #[test]
    fn frame_validation() {
        assert_eq!(Frame::new(vec![]), Err(DsError::EmptyFrame));
        assert_eq!(Frame::new(vec!["a".into(), "a".into()]), Err(DsError::DuplicateElement("a".into())));
        let big: Vec<String> = (0..17).map(|i| format!("h{i}")).collect();
        assert_eq!(Frame::new(big), Err(DsError::FrameTooLarge { size: 17, cap: 16 }));
        let f = abc();
        assert_eq!(f.label(0b101), "{a, c}");
        assert_eq!(f.label(0b111), "Θ");
        assert!(matches!(f.subset(&["d"]), Err(DsError::UnknownElement(_))));
    }

    #[test]
    fn mass_validation() {
        let f = abc();
        assert!(matches!(MassFunction::new(f.clone(), [(1, ratio(1, 2))]), Err(DsError::MassSum(_))));
        assert!(matches!(MassFunction::new(f.clone(), [(0, ratio(1, 2)), (1, ratio(1, 2))]), Err(DsError::MassOnEmptySet)));
        assert!(matches!(MassFunction::new(f.clone(), [(1, ratio(3, 2)), (2, ratio(-1, 2))]), Err(DsError::MassOutOfRange { .. })));
    }

    #[test]
    fn belief_examples() {
        let f = abc();
        let vac = bel_from_mass(&MassFunction::vacuous(f.clone()));
        for a in 0..7 {
            assert_eq!(*vac.bel(a), int(0));
        }
        assert_eq!(*vac.bel(7), int(1));

        let ab = Frame::new(vec!["a".into(), "b".into()]).unwrap();
        let bayes = bel_from_mass(&mass(&ab, &[(&["a"], ratio(3, 10)), (&["b"], ratio(7, 10))]));
        assert_eq!(*bayes.bel(0b01), ratio(3, 10));
        assert_eq!(*bayes.bel(0b10), ratio(7, 10));
        assert_eq!(*bayes.bel(0b11), int(1));

        let m = mass(&f, &[(&["a", "b"], ratio(3, 5)), (&["a", "b", "c"], ratio(2, 5))]);
        let b = bel_from_mass(&m);
        assert_eq!(*b.bel(f.subset(&["a"]).unwrap()), int(0));
        assert_eq!(*b.bel(f.subset(&["a", "b"]).unwrap()), ratio(3, 5));
        assert_eq!(b.pl(f.subset(&["a"]).unwrap()), int(1));
        assert_eq!(b.pl(f.subset(&["c"]).unwrap()), ratio(2, 5));
    }

    #[test]
    fn moebius_examples() {
        let f = abc();
        let m = mass(&f, &[(&["a"], ratio(1, 5)), (&["a", "b"], ratio(3, 10)), (&["a", "b", "c"], ratio(1, 2))]);
        assert_eq!(mass_from_bel(&bel_from_mass(&m).to_envelope()), Representation::Representable(m));

        let uniform: Vec<Rational> = (0u32..8).map(|a| ratio(a.count_ones() as i64, 3)).collect();
        let env = LowerEnvelope::new(f.clone(), uniform).unwrap();
        let third = ratio(1, 3);
        let expected = mass(&f, &[(&["a"], third.clone()), (&["b"], third.clone()), (&["c"], third)]);
        assert_eq!(mass_from_bel(&env), Representation::Representable(expected));

        // lower(singletons) = 0, pairs 0.3, 0.4, 0.5
        let mut lower = vec![int(0); 8];
        lower[0b011] = ratio(3, 10);
        lower[0b101] = ratio(2, 5);
        lower[0b110] = ratio(1, 2);
        lower[0b111] = int(1);
        let env = LowerEnvelope::new(f, lower).unwrap();
        assert_eq!(mass_from_bel(&env), Representation::NotRepresentable { witness: 0b111, mass: ratio(-1, 5) });
    }

    #[test]
    fn envelope_validation() {
        let f = abc();
        let mut lower = vec![int(0); 8];
        lower[7] = int(1);
        lower[0b001] = ratio(3, 5);
        lower[0b110] = ratio(3, 5);
        assert!(matches!(LowerEnvelope::new(f, lower), Err(DsError::InvalidEnvelope(_))));
    }

    #[test]
    fn combination_examples() {
        let f = abc();
        let m = mass(&f, &[(&["a"], ratio(3, 5)), (&["a", "b", "c"], ratio(2, 5))]);
        assert_eq!(dempster_combine(&m, &MassFunction::vacuous(f.clone())).unwrap(), (m.clone(), int(0)));

        let m2 = mass(&f, &[(&["a"], ratio(1, 2)), (&["a", "b", "c"], ratio(1, 2))]);
        let expected = mass(&f, &[(&["a"], ratio(4, 5)), (&["a", "b", "c"], ratio(1, 5))]);
        assert_eq!(dempster_combine(&m, &m2).unwrap(), (expected, int(0)));

        let a = mass(&f, &[(&["a"], int(1))]);
        let b = mass(&f, &[(&["b"], int(1))]);
        assert_eq!(dempster_combine(&a, &b), Err(DsError::TotalConflict { source_index: 1 }));
        let vac = MassFunction::vacuous(f.clone());
        assert_eq!(combine_evidence(&[a.clone(), vac.clone(), b]).unwrap_err(), DsError::TotalConflict { source_index: 2 });

        // partial conflict is renormalised
        let x = mass(&f, &[(&["a"], ratio(1, 2)), (&["b"], ratio(1, 2))]);
        let y = mass(&f, &[(&["a"], ratio(1, 2)), (&["c"], ratio(1, 2))]);
        let (c, k) = dempster_combine(&x, &y).unwrap();
        assert_eq!(k, ratio(3, 4));
        assert_eq!(c, mass(&f, &[(&["a"], int(1))]));

        assert_eq!(combine_evidence(std::slice::from_ref(&m)).unwrap(), (m.clone(), vec![]));
        assert_eq!(combine_evidence(&[m.clone(), vac.clone(), vac]).unwrap().0, m);
        assert_eq!(combine_evidence(&[]), Err(DsError::NoSources));
    }

    #[test]
    fn envelope_of_pairwise_disjunction_bounds() {
        let kb = parse_kb(
            "atom A B C\nbackground (A & !B & !C) | (!A & B & !C) | (!A & !B & C)\n\
             0.3 <= P((A | B))\n0.4 <= P((A | C))\n0.5 <= P((B | C))\nframe a=A, b=B, c=C",
        )
        .unwrap();
        let ws = kb.world_space(DEFAULT_ATOM_CAP).unwrap();
        let (frame, mapping) = frame_from_kb(&kb).unwrap();
        let mapping: Vec<Sentence> = mapping.into_iter().map(Option::unwrap).collect();
        let env = envelope_from_entailment(&kb, &ws, &frame, &mapping).unwrap();
        assert_eq!(env.values(), &[int(0), int(0), int(0), ratio(3, 10), int(0), ratio(2, 5), ratio(1, 2), int(1)]);
        assert_eq!(mass_from_bel(&env), Representation::NotRepresentable { witness: 7, mass: ratio(-1, 5) });

        let empty = parse_kb("atom A B C\nbackground (A & !B & !C) | (!A & B & !C) | (!A & !B & C)").unwrap();
        let env = envelope_from_entailment(&empty, &ws, &frame, &mapping).unwrap();
        assert!(env.values()[..7].iter().all(Zero::is_zero));

        let loose = parse_kb("atom A B C").unwrap();
        let ws = loose.world_space(DEFAULT_ATOM_CAP).unwrap();
        assert!(matches!(envelope_from_entailment(&loose, &ws, &frame, &mapping), Err(DsError::FrameMapping(_))));
    }

    #[test]
    fn masses_from_dsl() {
        let kb = parse_kb("frame a, b, c\nmass e1 {a}: 0.6, {a,b,c}: 0.4\nmass e2 {a}: 1/2, {a, b, c}: 1/2").unwrap();
        let (frame, _) = frame_from_kb(&kb).unwrap();
        let ms = masses_from_kb(&kb, &frame).unwrap();
        assert_eq!(ms.len(), 2);
        let (c, _) = combine_evidence(&[ms[0].1.clone(), ms[1].1.clone()]).unwrap();
        assert_eq!(c.mass(0b001), ratio(4, 5));
        assert_eq!(c.to_string(), "m({a}) = 4/5, m(Θ) = 1/5");
    }
}
