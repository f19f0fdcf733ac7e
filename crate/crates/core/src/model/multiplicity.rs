use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Cardinality interval `[min, max]`; `max == None` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Multiplicity {
    pub min: u32,
    pub max: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultiplicityError {
    #[error("malformed multiplicity `{0}`")]
    Malformed(String),
    #[error("multiplicity `{0}` has min greater than max")]
    MinExceedsMax(String),
    #[error("multiplicity `{0}` has a zero upper bound")]
    ZeroMax(String),
}

impl Multiplicity {
    /// `*`
    pub const MANY: Multiplicity = Multiplicity { min: 0, max: None };
    /// `1..*`
    pub const ONE_OR_MORE: Multiplicity = Multiplicity { min: 1, max: None };
    /// `1`
    pub const ONE: Multiplicity = Multiplicity { min: 1, max: Some(1) };

    pub fn new(min: u32, max: Option<u32>) -> Result<Self, MultiplicityError> {
        let m = Multiplicity { min, max };
        match max {
            Some(0) => Err(MultiplicityError::ZeroMax(m.to_string())),
            Some(hi) if min > hi => Err(MultiplicityError::MinExceedsMax(m.to_string())),
            _ => Ok(m),
        }
    }

    pub fn exactly(n: u32) -> Result<Self, MultiplicityError> {
        Multiplicity::new(n, Some(n))
    }

    pub fn contains(&self, count: usize) -> bool {
        count >= self.min as usize && self.max.is_none_or(|hi| count <= hi as usize)
    }

    pub fn below_min(&self, count: usize) -> bool {
        count < self.min as usize
    }

    pub fn above_max(&self, count: usize) -> bool {
        self.max.is_some_and(|hi| count > hi as usize)
    }

    /// `self.max <= other.max`, treating unbounded as +infinity.
    pub fn max_within(&self, other: &Multiplicity) -> bool {
        match (self.max, other.max) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a <= b,
        }
    }
}

/// Parses the textual multiplicity forms `N`, `*`, `N..M` and `N..*`.
pub fn parse_multiplicity(token: &str) -> Result<Multiplicity, MultiplicityError> {
    let token = token.trim();
    let malformed = || MultiplicityError::Malformed(token.to_string());
    let number = |s: &str| -> Result<u32, MultiplicityError> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        s.parse().map_err(|_| malformed())
    };

    if token == "*" {
        return Ok(Multiplicity::MANY);
    }
    let (min, max) = match token.split_once("..") {
        Some((lo, "*")) => (number(lo)?, None),
        Some((lo, hi)) => (number(lo)?, Some(number(hi)?)),
        None => {
            let n = number(token)?;
            (n, Some(n))
        }
    };
    match max {
        Some(hi) if min > hi => Err(MultiplicityError::MinExceedsMax(token.to_string())),
        Some(0) => Err(MultiplicityError::ZeroMax(token.to_string())),
        _ => Ok(Multiplicity { min, max }),
    }
}

impl FromStr for Multiplicity {
    type Err = MultiplicityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_multiplicity(s)
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.min, self.max) {
            (0, None) => f.write_str("*"),
            (lo, None) => write!(f, "{lo}..*"),
            (lo, Some(hi)) if lo == hi => write!(f, "{lo}"),
            (lo, Some(hi)) => write!(f, "{lo}..{hi}"),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
