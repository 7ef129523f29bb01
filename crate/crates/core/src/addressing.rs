//! Side addresses over the alphabet `{0,1,2,3,4,5}`.
//!
//! The three sides of the initial triangle are rooted at `5` (base),
//! `1` (right) and `3` (left). Every side of `KS_n` splits into four sides
//! of `KS_{n+1}`: two thirds that stay on the parent's line and two bump
//! sides over the removed middle third. Bump sides always get `1` then `3`
//! in boundary order. The digits of the thirds depend on the parent's key,
//! the last `1` or `3` in its address (the base root behaves as key 1):
//!
//! | key | start third | end third |
//! |-----|-------------|-----------|
//! | 1   | 4           | 2         |
//! | 3   | 2           | 0         |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite word over `{0,...,5}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AddressWord(Vec<u8>);

impl AddressWord {
    /// Builds a word after checking the grammar: symbols in `0..=5`, `5` only
    /// as the first symbol, and no trailing `5` except for the bare root.
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        let bad = || Error::InvalidAddress(symbols.iter().map(|s| char::from(b'0' + s.min(&9))).collect());
        if symbols.iter().any(|&s| s > 5) {
            return Err(bad());
        }
        if symbols.iter().skip(1).any(|&s| s == 5) {
            return Err(bad());
        }
        Ok(Self(symbols))
    }

    #[cfg(test)]
    pub(crate) fn from_raw(symbols: Vec<u8>) -> Self {
        Self(symbols)
    }

    pub fn root(symbol: u8) -> Self {
        Self(vec![symbol])
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    pub fn child(&self, digit: u8) -> Self {
        let mut s = self.0.clone();
        s.push(digit);
        Self(s)
    }

    /// True for words ending in `1` or `3`: sides that are not contained in
    /// any side of the previous level.
    pub fn is_bump(&self) -> bool {
        self.len() > 1 && matches!(self.last(), Some(1 | 3))
    }

    /// The key governing the third-digits of this side's children.
    fn key(&self) -> u8 {
        self.0
            .iter()
            .rev()
            .find(|&&s| s == 1 || s == 3)
            .copied()
            .unwrap_or(1)
    }

    /// Checks that the word is generated from a root by `child_digits`.
    pub fn validate_side(&self) -> Result<()> {
        let bad = || Error::InvalidAddress(self.to_string());
        match self.0.first() {
            Some(1 | 3 | 5) => {}
            _ => return Err(bad()),
        }
        for i in 1..self.0.len() {
            let parent = Self(self.0[..i].to_vec());
            if !parent.raw_child_digits().as_array().contains(&self.0[i]) {
                return Err(bad());
            }
        }
        Ok(())
    }

    fn raw_child_digits(&self) -> ChildDigits {
        let (start_third, end_third) = if self.key() == 3 { (2, 0) } else { (4, 2) };
        ChildDigits { start_third, bump_first: 1, bump_second: 3, end_third }
    }
}

impl fmt::Display for AddressWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for AddressWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .trim()
            .bytes()
            .map(|c| match c {
                b'0'..=b'5' => Ok(c - b'0'),
                _ => Err(Error::InvalidAddress(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        if symbols.is_empty() {
            return Err(Error::InvalidAddress(s.to_string()));
        }
        Self::new(symbols).map_err(|_| Error::InvalidAddress(s.to_string()))
    }
}

impl Serialize for AddressWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AddressWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Digits of the four children of a side, in boundary order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChildDigits {
    pub start_third: u8,
    pub bump_first: u8,
    pub bump_second: u8,
    pub end_third: u8,
}

impl ChildDigits {
    pub fn as_array(&self) -> [u8; 4] {
        [self.start_third, self.bump_first, self.bump_second, self.end_third]
    }
}

pub fn child_digits(parent: &AddressWord) -> Result<ChildDigits> {
    parent.validate_side()?;
    Ok(parent.raw_child_digits())
}

/// Used by the prefractal builder, which only ever produces valid parents.
pub(crate) fn child_digits_unchecked(parent: &AddressWord) -> ChildDigits {
    parent.raw_child_digits()
}

/// The first `m` symbols of `w` (clamped to `|w|`).
pub fn truncate(w: &AddressWord, m: usize) -> AddressWord {
    AddressWord(w.0[..m.min(w.len())].to_vec())
}

/// Forces the `{1,3}` subsequence to alternate, starting from the value of
/// its first element. Every gap of `{0,2,4}` symbols that follows a
/// rewritten symbol has its `0`s and `4`s swapped.
pub fn straighten(w: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(w.len());
    let mut expected: Option<u8> = None;
    let mut swapping = false;
    for &s in w {
        match s {
            1 | 3 => {
                let want = expected.unwrap_or(s);
                swapping = want != s;
                out.push(want);
                expected = Some(4 - want);
            }
            0 if swapping => out.push(4),
            4 if swapping => out.push(0),
            _ => out.push(s),
        }
    }
    out
}

pub fn straighten_word(w: &AddressWord) -> AddressWord {
    AddressWord(straighten(&w.0))
}

/// Parses a plain digit string without the side-address grammar checks.
pub fn parse_digits(s: &str) -> Result<Vec<u8>> {
    s.trim()
        .bytes()
        .map(|c| match c {
            b'0'..=b'5' => Ok(c - b'0'),
            _ => Err(Error::InvalidAddress(s.to_string())),
        })
        .collect()
}

pub fn digits_to_string(w: &[u8]) -> String {
    w.iter().map(|&s| char::from(b'0' + s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> AddressWord {
        s.parse().unwrap()
    }

    fn children(s: &str) -> Vec<String> {
        let parent = w(s);
        child_digits(&parent)
            .unwrap()
            .as_array()
            .iter()
            .map(|&d| parent.child(d).to_string())
            .collect()
    }

    #[test]
    fn child_digit_table() {
        assert_eq!(children("51"), ["514", "511", "513", "512"]);
        assert_eq!(children("13"), ["132", "131", "133", "130"]);
        assert_eq!(children("5"), ["54", "51", "53", "52"]);
        assert_eq!(children("3"), ["32", "31", "33", "30"]);
        assert_eq!(children("514"), ["5144", "5141", "5143", "5142"]);
    }

    #[test]
    fn invalid_parents_rejected() {
        assert!(child_digits(&AddressWord::from_raw(vec![0])).is_err());
        assert!(child_digits(&AddressWord::from_raw(vec![5, 0])).is_err());
        assert!("515".parse::<AddressWord>().is_err());
        assert!("56".parse::<AddressWord>().is_err());
        assert!("".parse::<AddressWord>().is_err());
    }

    #[test]
    fn truncation() {
        assert_eq!(truncate(&w("513"), 2), w("51"));
        assert_eq!(truncate(&w("51"), 1), w("5"));
        assert_eq!(truncate(&w("5142"), 4), w("5142"));
    }

    #[test]
    fn straightening_examples() {
        let long = parse_digits("13123232113133100324").unwrap();
        assert_eq!(digits_to_string(&straighten(&long)), "13123212313131344120");
        assert_eq!(straighten(&[1, 3]), vec![1, 3]);
        assert_eq!(straighten(&[1, 1]), vec![1, 3]);
        assert_eq!(straighten(&[5, 4, 2]), vec![5, 4, 2]);
        assert_eq!(straighten(&[3, 3, 0, 4, 2, 1]), vec![3, 1, 4, 0, 2, 3]);
    }

    #[test]
    fn serde_round_trip() {
        let a = w("5142");
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "\"5142\"");
        assert_eq!(serde_json::from_str::<AddressWord>(&json).unwrap(), a);
    }
}
