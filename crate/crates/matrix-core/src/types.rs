//! Identifiers shared across the state machine: addresses, levels, matrices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// An account identifier.
///
/// Internally any totally ordered token works; files produced by this
/// workspace use `0x` plus 32 lowercase hex characters. Parsing only rejects
/// tokens that would break the line-oriented formats (separators,
/// whitespace, quotes).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Address(String);

impl Address {
    pub fn new(token: impl Into<String>) -> Result<Self, Error> {
        let token = token.into();
        if token.is_empty()
            || token
                .chars()
                .any(|c| c == ',' || c == '"' || c.is_whitespace() || c.is_control())
        {
            return Err(Error::BadAddress(token));
        }
        Ok(Address(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Deterministic synthetic address for user `n` in generated populations:
    /// `0x` followed by 32 hex characters. `n = 0` is the conventional owner.
    pub fn synthetic(n: u128) -> Self {
        Address(format!("0x{n:032x}"))
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Address({})", self.0)
    }
}

impl FromStr for Address {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Address::new(s)
    }
}

impl TryFrom<String> for Address {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Address::new(s)
    }
}

impl From<Address> for String {
    fn from(a: Address) -> String {
        a.0
    }
}

/// A matrix level in `1..=12`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Level(u8);

impl Level {
    pub const MIN: Level = Level(1);
    pub const MAX: Level = Level(12);
    pub const COUNT: usize = 12;

    pub fn new(value: u8) -> Result<Self, Error> {
        if (1..=12).contains(&value) {
            Ok(Level(value))
        } else {
            Err(Error::BadLevel(value))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Zero-based index for slot arrays.
    pub fn index(self) -> usize {
        usize::from(self.0) - 1
    }

    pub fn next(self) -> Option<Level> {
        if self.0 < 12 {
            Some(Level(self.0 + 1))
        } else {
            None
        }
    }

    pub fn prev(self) -> Option<Level> {
        if self.0 > 1 {
            Some(Level(self.0 - 1))
        } else {
            None
        }
    }

    pub fn all() -> impl Iterator<Item = Level> {
        (1..=12).map(Level)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Level({})", self.0)
    }
}

impl TryFrom<u8> for Level {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Level::new(v)
    }
}

impl From<Level> for u8 {
    fn from(l: Level) -> u8 {
        l.0
    }
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: u8 = s.parse().map_err(|_| Error::BadLevel(0))?;
        Level::new(v)
    }
}

/// The two matrix systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    X3,
    X4,
}

impl MatrixKind {
    pub const BOTH: [MatrixKind; 2] = [MatrixKind::X3, MatrixKind::X4];

    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::X3 => "x3",
            MatrixKind::X4 => "x4",
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatrixKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "x3" | "X3" => Ok(MatrixKind::X3),
            "x4" | "X4" => Ok(MatrixKind::X4),
            other => Err(Error::BadMatrix(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn address_rejects_separator_tokens() {
        assert!(Address::new("0xabc").is_ok());
        assert!(Address::new("").is_err());
        assert!(Address::new("a,b").is_err());
        assert!(Address::new("a b").is_err());
        assert!(Address::new("a\"b").is_err());
    }

    #[test]
    fn synthetic_addresses_sort_numerically() {
        let a = Address::synthetic(9);
        let b = Address::synthetic(10);
        assert!(a < b);
        assert_eq!(a.as_str().len(), 34);
    }

    #[test]
    fn level_bounds() {
        assert!(Level::new(0).is_err());
        assert!(Level::new(13).is_err());
        assert_eq!(Level::new(12).unwrap().next(), None);
        assert_eq!(Level::new(1).unwrap().prev(), None);
        assert_eq!(Level::all().count(), 12);
    }
}
