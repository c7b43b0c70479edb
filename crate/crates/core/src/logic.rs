//! Propositional sentences and the possible-worlds space they induce.
//!
//! A [`WorldSpace`] is the set of truth assignments over a fixed, ordered atom
//! list that satisfy every background sentence. Worlds are kept in
//! lexicographic order of their atom-ordered boolean vectors (`false < true`),
//! so world indices are stable and can be used directly as LP variable ids.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Default cap on the number of atoms a world space may enumerate.
pub const DEFAULT_ATOM_CAP: usize = 20;
/// Worlds are stored as bitmasks, so this is the absolute ceiling.
pub const MAX_ATOMS: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
    #[error("world space needs at least one atom")]
    NoAtoms,
    #[error("{count} atoms exceed the atom cap of {cap}")]
    TooManyAtoms { count: usize, cap: usize },
    #[error("background theory is inconsistent: no world survives")]
    EmptyWorldSpace,
    #[error("{0}")]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at column {}: expected {expected}, found {found}", .position + 1)]
pub struct ParseError {
    /// Zero-based character offset into the input.
    pub position: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Result<Self, LogicError> {
        let name = name.into();
        let mut chars = name.chars();
        let valid = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            && name != "true"
            && name != "false";
        if valid {
            Ok(Atom(name))
        } else {
            Err(LogicError::InvalidAtom(name))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Propositional formula. `And`/`Or` carry at least two children.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sentence {
    True,
    False,
    Atom(Atom),
    Not(Box<Sentence>),
    And(Vec<Sentence>),
    Or(Vec<Sentence>),
    Implies(Box<Sentence>, Box<Sentence>),
    Iff(Box<Sentence>, Box<Sentence>),
}

impl Sentence {
    /// Atom leaf; panics on an invalid name. Intended for literals in code.
    pub fn var(name: &str) -> Sentence {
        Sentence::Atom(Atom::new(name).expect("valid atom name"))
    }

    pub fn negate(self) -> Sentence {
        Sentence::Not(Box::new(self))
    }

    /// Conjunction of `parts`; collapses to `True` or the single part when
    /// fewer than two are given.
    pub fn and(parts: Vec<Sentence>) -> Sentence {
        match parts.len() {
            0 => Sentence::True,
            1 => parts.into_iter().next().unwrap(),
            _ => Sentence::And(parts),
        }
    }

    pub fn or(parts: Vec<Sentence>) -> Sentence {
        match parts.len() {
            0 => Sentence::False,
            1 => parts.into_iter().next().unwrap(),
            _ => Sentence::Or(parts),
        }
    }

    pub fn implies(self, consequent: Sentence) -> Sentence {
        Sentence::Implies(Box::new(self), Box::new(consequent))
    }

    pub fn iff(self, other: Sentence) -> Sentence {
        Sentence::Iff(Box::new(self), Box::new(other))
    }

    /// Exactly one of `parts` holds.
    pub fn exactly_one(parts: &[Sentence]) -> Sentence {
        let cases = (0..parts.len())
            .map(|i| {
                let literals = parts
                    .iter()
                    .enumerate()
                    .map(|(j, p)| if i == j { p.clone() } else { p.clone().negate() })
                    .collect();
                Sentence::and(literals)
            })
            .collect();
        Sentence::or(cases)
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Sentence::True | Sentence::False => {}
            Sentence::Atom(a) => {
                out.insert(a.clone());
            }
            Sentence::Not(c) => c.collect_atoms(out),
            Sentence::And(cs) | Sentence::Or(cs) => cs.iter().for_each(|c| c.collect_atoms(out)),
            Sentence::Implies(l, r) | Sentence::Iff(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    pub fn is_true_literal(&self) -> bool {
        matches!(self, Sentence::True)
    }

    /// Classical evaluation under `world`.
    pub fn evaluate(&self, world: &World) -> Result<bool, LogicError> {
        self.eval_with(&|a: &Atom| world.get(a))
    }

    fn eval_with(&self, lookup: &dyn Fn(&Atom) -> Option<bool>) -> Result<bool, LogicError> {
        Ok(match self {
            Sentence::True => true,
            Sentence::False => false,
            Sentence::Atom(a) => lookup(a).ok_or_else(|| LogicError::UnknownAtom(a.0.clone()))?,
            Sentence::Not(c) => !c.eval_with(lookup)?,
            Sentence::And(cs) => {
                let mut v = true;
                for c in cs {
                    v &= c.eval_with(lookup)?;
                }
                v
            }
            Sentence::Or(cs) => {
                let mut v = false;
                for c in cs {
                    v |= c.eval_with(lookup)?;
                }
                v
            }
            Sentence::Implies(l, r) => !l.eval_with(lookup)? || r.eval_with(lookup)?,
            Sentence::Iff(l, r) => l.eval_with(lookup)? == r.eval_with(lookup)?,
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Sentence::Iff(..) => 0,
            Sentence::Implies(..) => 1,
            Sentence::Or(_) => 2,
            Sentence::And(_) => 3,
            _ => 4,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let parens = self.precedence() < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Sentence::True => f.write_str("true")?,
            Sentence::False => f.write_str("false")?,
            Sentence::Atom(a) => f.write_str(&a.0)?,
            Sentence::Not(c) => {
                f.write_str("!")?;
                c.write_prec(f, 4)?;
            }
            Sentence::And(cs) => write_joined(f, cs, " & ", 4)?,
            Sentence::Or(cs) => write_joined(f, cs, " | ", 3)?,
            Sentence::Implies(l, r) => {
                l.write_prec(f, 2)?;
                f.write_str(" -> ")?;
                r.write_prec(f, 1)?;
            }
            Sentence::Iff(l, r) => {
                l.write_prec(f, 0)?;
                f.write_str(" <-> ")?;
                r.write_prec(f, 1)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, cs: &[Sentence], sep: &str, min: u8) -> fmt::Result {
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        c.write_prec(f, min)?;
    }
    Ok(())
}

/// Prints with the minimum parentheses needed for the printed text to parse
/// back to the identical tree.
impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

impl std::str::FromStr for Sentence {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sentence(s)
    }
}

// ---------------------------------------------------------------------------
// Parser

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
    Iff,
    True,
    False,
    Ident(String),
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Not => "`!`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::Implies => "`->`".into(),
            Token::Iff => "`<->`".into(),
            Token::True => "`true`".into(),
            Token::False => "`false`".into(),
            Token::Ident(name) => format!("identifier `{name}`"),
            Token::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Token::LParen,
            ')' => Token::RParen,
            '!' => Token::Not,
            '&' => Token::And,
            '|' => Token::Or,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Token::Implies
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                i += 2;
                Token::Iff
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                i = j - 1;
                match word.as_str() {
                    "true" => Token::True,
                    "false" => Token::False,
                    _ => Token::Ident(word),
                }
            }
            other => {
                return Err(ParseError {
                    position: start,
                    expected: "a sentence token".into(),
                    found: format!("`{other}`"),
                })
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((chars.len(), Token::End));
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].1.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let (position, tok) = &self.tokens[self.pos];
        ParseError { position: *position, expected: expected.into(), found: tok.describe() }
    }

    fn iff(&mut self) -> Result<Sentence, ParseError> {
        let mut left = self.implication()?;
        while *self.peek() == Token::Iff {
            self.bump();
            let right = self.implication()?;
            left = left.iff(right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Sentence, ParseError> {
        let left = self.disjunction()?;
        if *self.peek() == Token::Implies {
            self.bump();
            let right = self.implication()?;
            return Ok(left.implies(right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Sentence, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Token::Or {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(Sentence::or(parts))
    }

    fn conjunction(&mut self) -> Result<Sentence, ParseError> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Token::And {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(Sentence::and(parts))
    }

    fn unary(&mut self) -> Result<Sentence, ParseError> {
        match self.peek().clone() {
            Token::Not => {
                self.bump();
                Ok(self.unary()?.negate())
            }
            Token::LParen => {
                self.bump();
                let inner = self.iff()?;
                if *self.peek() != Token::RParen {
                    return Err(self.error("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            Token::True => {
                self.bump();
                Ok(Sentence::True)
            }
            Token::False => {
                self.bump();
                Ok(Sentence::False)
            }
            Token::Ident(name) => {
                self.bump();
                Ok(Sentence::Atom(Atom(name)))
            }
            _ => Err(self.error("`!`, `(`, `true`, `false` or an atom")),
        }
    }
}

/// Parses a sentence. Precedence, loosest first: `<->`, `->` (right
/// associative), `|`, `&`, `!`.
pub fn parse_sentence(text: &str) -> Result<Sentence, ParseError> {
    let mut parser = Parser { tokens: tokenize(text)?, pos: 0 };
    let s = parser.iff()?;
    if *parser.peek() != Token::End {
        return Err(parser.error("an operator or end of input"));
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// Worlds

/// A total truth assignment over the atoms of a world space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct World {
    assignment: BTreeMap<Atom, bool>,
}

impl World {
    pub fn new(assignment: BTreeMap<Atom, bool>) -> Self {
        World { assignment }
    }

    pub fn get(&self, atom: &Atom) -> Option<bool> {
        self.assignment.get(atom).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<Atom, bool> {
        &self.assignment
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldSpace {
    atoms: Vec<Atom>,
    index: BTreeMap<Atom, usize>,
    background: Vec<Sentence>,
    masks: Vec<u64>,
}

/// Sentence with atoms resolved to bit positions.
enum Compiled {
    Const(bool),
    Bit(u32),
    Not(Box<Compiled>),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    fn eval(&self, mask: u64) -> bool {
        match self {
            Compiled::Const(b) => *b,
            Compiled::Bit(bit) => mask >> bit & 1 == 1,
            Compiled::Not(c) => !c.eval(mask),
            Compiled::And(cs) => cs.iter().all(|c| c.eval(mask)),
            Compiled::Or(cs) => cs.iter().any(|c| c.eval(mask)),
            Compiled::Implies(l, r) => !l.eval(mask) || r.eval(mask),
            Compiled::Iff(l, r) => l.eval(mask) == r.eval(mask),
        }
    }
}

fn compile(s: &Sentence, index: &BTreeMap<Atom, usize>, n: usize) -> Result<Compiled, LogicError> {
    let rec = |c: &Sentence| compile(c, index, n);
    Ok(match s {
        Sentence::True => Compiled::Const(true),
        Sentence::False => Compiled::Const(false),
        Sentence::Atom(a) => {
            let i = index.get(a).ok_or_else(|| LogicError::UnknownAtom(a.0.clone()))?;
            Compiled::Bit((n - 1 - i) as u32)
        }
        Sentence::Not(c) => Compiled::Not(Box::new(rec(c)?)),
        Sentence::And(cs) => Compiled::And(cs.iter().map(rec).collect::<Result<_, _>>()?),
        Sentence::Or(cs) => Compiled::Or(cs.iter().map(rec).collect::<Result<_, _>>()?),
        Sentence::Implies(l, r) => Compiled::Implies(Box::new(rec(l)?), Box::new(rec(r)?)),
        Sentence::Iff(l, r) => Compiled::Iff(Box::new(rec(l)?), Box::new(rec(r)?)),
    })
}

impl WorldSpace {
    /// Enumerates all assignments over `atoms` and keeps those satisfying
    /// every background sentence, in canonical order.
    pub fn build(atoms: Vec<Atom>, background: Vec<Sentence>, atom_cap: usize) -> Result<Self, LogicError> {
        if atoms.is_empty() {
            return Err(LogicError::NoAtoms);
        }
        let cap = atom_cap.min(MAX_ATOMS);
        if atoms.len() > cap {
            return Err(LogicError::TooManyAtoms { count: atoms.len(), cap });
        }
        let mut index = BTreeMap::new();
        for (i, a) in atoms.iter().enumerate() {
            if index.insert(a.clone(), i).is_some() {
                return Err(LogicError::DuplicateAtom(a.0.clone()));
            }
        }
        let n = atoms.len();
        let filters = background
            .iter()
            .map(|s| compile(s, &index, n))
            .collect::<Result<Vec<_>, _>>()?;
        let masks: Vec<u64> = (0..1u64 << n).filter(|&m| filters.iter().all(|c| c.eval(m))).collect();
        if masks.is_empty() {
            return Err(LogicError::EmptyWorldSpace);
        }
        Ok(WorldSpace { atoms, index, background, masks })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn background(&self) -> &[Sentence] {
        &self.background
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn world(&self, i: usize) -> World {
        let n = self.atoms.len();
        let mask = self.masks[i];
        World {
            assignment: self
                .atoms
                .iter()
                .enumerate()
                .map(|(k, a)| (a.clone(), mask >> (n - 1 - k) & 1 == 1))
                .collect(),
        }
    }

    pub fn worlds(&self) -> impl Iterator<Item = World> + '_ {
        (0..self.len()).map(move |i| self.world(i))
    }

    /// Truth values of world `i`, in atom order.
    pub fn values(&self, i: usize) -> Vec<bool> {
        let n = self.atoms.len();
        (0..n).map(|k| self.masks[i] >> (n - 1 - k) & 1 == 1).collect()
    }

    pub fn contains_atom(&self, atom: &Atom) -> bool {
        self.index.contains_key(atom)
    }

    /// Fails with `UnknownAtom` if `s` mentions an atom outside this space.
    pub fn check(&self, s: &Sentence) -> Result<(), LogicError> {
        compile(s, &self.index, self.atoms.len()).map(|_| ())
    }

    /// Indices of the worlds where `s` holds.
    pub fn extension(&self, s: &Sentence) -> Result<BTreeSet<usize>, LogicError> {
        let c = compile(s, &self.index, self.atoms.len())?;
        Ok(self.masks.iter().enumerate().filter(|(_, &m)| c.eval(m)).map(|(i, _)| i).collect())
    }

    /// Membership vector of the extension of `s`, indexed by world.
    pub fn indicator(&self, s: &Sentence) -> Result<Vec<bool>, LogicError> {
        let c = compile(s, &self.index, self.atoms.len())?;
        Ok(self.masks.iter().map(|&m| c.eval(m)).collect())
    }
}

/// Free-function form of [`WorldSpace::extension`].
pub fn extension(s: &Sentence, ws: &WorldSpace) -> Result<BTreeSet<usize>, LogicError> {
    ws.extension(s)
}
