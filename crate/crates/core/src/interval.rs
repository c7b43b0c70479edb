use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("bound {0} lies outside [0, 1]")]
    OutOfRange(Rational),
    #[error("lower bound {lower} exceeds upper bound {upper}")]
    Inverted { lower: Rational, upper: Rational },
}

/// A closed probability interval `[lower, upper]` with `0 <= lower <= upper <= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProbabilityInterval {
    lower: Rational,
    upper: Rational,
}

impl ProbabilityInterval {
    pub fn new(lower: Rational, upper: Rational) -> Result<Self, IntervalError> {
        for b in [&lower, &upper] {
            if *b < Rational::zero() || *b > Rational::one() {
                return Err(IntervalError::OutOfRange(b.clone()));
            }
        }
        if lower > upper {
            return Err(IntervalError::Inverted { lower, upper });
        }
        Ok(ProbabilityInterval { lower, upper })
    }

    /// Complete ignorance, `[0, 1]`.
    pub fn vacuous() -> Self {
        ProbabilityInterval { lower: Rational::zero(), upper: Rational::one() }
    }

    pub fn point(t: Rational) -> Result<Self, IntervalError> {
        Self::new(t.clone(), t)
    }

    pub fn lower(&self) -> &Rational {
        &self.lower
    }

    pub fn upper(&self) -> &Rational {
        &self.upper
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn is_vacuous(&self) -> bool {
        self.lower.is_zero() && self.upper.is_one()
    }

    pub fn contains(&self, value: &Rational) -> bool {
        self.lower <= *value && *value <= self.upper
    }

    /// `self ⊇ other`.
    pub fn is_superset_of(&self, other: &ProbabilityInterval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }

    pub fn intersect(&self, other: &ProbabilityInterval) -> Option<ProbabilityInterval> {
        let lower = (&self.lower).max(&other.lower).clone();
        let upper = (&self.upper).min(&other.upper).clone();
        (lower <= upper).then_some(ProbabilityInterval { lower, upper })
    }

    /// `[1 - upper, 1 - lower]`.
    pub fn complement(&self) -> ProbabilityInterval {
        ProbabilityInterval {
            lower: Rational::one() - &self.upper,
            upper: Rational::one() - &self.lower,
        }
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    /// Builds `[lower, upper]` after clamping both ends into `[0, 1]`; `None`
    /// if the clamped ends cross.
    pub(crate) fn clamped(lower: Rational, upper: Rational) -> Option<ProbabilityInterval> {
        let lower = lower.max(Rational::zero());
        let upper = upper.min(Rational::one());
        (lower <= upper).then_some(ProbabilityInterval { lower, upper })
    }
}

impl fmt::Display for ProbabilityInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}
