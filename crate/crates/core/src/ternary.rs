//! Eventually periodic base-3 expansions and the classification of
//! basepoints on the unit interval.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{int, rat, Rational};

/// Largest level accepted by [`midpoint_set`].
pub const MIDPOINT_BUDGET: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Digit {
    L,
    C,
    R,
}

impl Digit {
    pub fn value(self) -> u8 {
        match self {
            Digit::L => 0,
            Digit::C => 1,
            Digit::R => 2,
        }
    }

    pub fn from_value(v: u8) -> Option<Self> {
        match v {
            0 => Some(Digit::L),
            1 => Some(Digit::C),
            2 => Some(Digit::R),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Digit::L => 'l',
            Digit::C => 'c',
            Digit::R => 'r',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TernaryExpansion {
    pub prefix: Vec<Digit>,
    pub cycle: Vec<Digit>,
    /// Set when the value has the form `p/3^q`; the canonical form is then the
    /// finite one, padded by an `l` cycle.
    pub terminating: bool,
}

impl TernaryExpansion {
    /// Exact value: prefix digits plus the geometric series of the cycle.
    pub fn value(&self) -> Rational {
        let (n, d) = self.value_fraction();
        Rational::new(n, d)
    }

    /// Unreduced `(numerator, denominator)` of [`Self::value`]:
    /// `(P·(3^L − 1) + C) / (3^k·(3^L − 1))` for prefix `P` of length `k` and
    /// cycle `C` of length `L`.
    pub fn value_fraction(&self) -> (BigInt, BigInt) {
        let period = BigUint::from(3u8).pow(self.cycle.len() as u32) - 1u8;
        let shift = BigUint::from(3u8).pow(self.prefix.len() as u32);
        let n = pack(&self.prefix) * &period + pack(&self.cycle);
        (n.into(), (shift * period).into())
    }

    /// The `i`-th digit, 1-based.
    pub fn digit(&self, i: usize) -> Digit {
        assert!(i >= 1, "digits are 1-based");
        if i <= self.prefix.len() {
            self.prefix[i - 1]
        } else {
            self.cycle[(i - 1 - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn digits(&self, n: usize) -> Vec<Digit> {
        (1..=n).map(|i| self.digit(i)).collect()
    }

    /// The infinite `l/r`-tail form of a terminating expansion, if distinct.
    pub fn alias(&self) -> Option<TernaryExpansion> {
        if !self.terminating || self.prefix.is_empty() {
            return None;
        }
        let mut prefix = self.prefix.clone();
        let last = prefix.pop().expect("nonempty");
        prefix.push(match last {
            Digit::C => Digit::L,
            Digit::R => Digit::C,
            Digit::L => unreachable!("canonical prefix never ends in l"),
        });
        Some(TernaryExpansion { prefix, cycle: vec![Digit::R], terminating: true })
    }

    /// Counts of digits `c` in the cycle.
    pub fn cycle_c_count(&self) -> usize {
        self.cycle.iter().filter(|&&d| d == Digit::C).count()
    }

    /// The expansion of `3^k·x mod 1`, the `k`-th left shift.
    pub fn shift(&self, k: usize) -> TernaryExpansion {
        if k <= self.prefix.len() {
            return TernaryExpansion {
                prefix: self.prefix[k..].to_vec(),
                cycle: self.cycle.clone(),
                terminating: self.terminating,
            };
        }
        let r = (k - self.prefix.len()) % self.cycle.len();
        let mut cycle = self.cycle[r..].to_vec();
        cycle.extend_from_slice(&self.cycle[..r]);
        TernaryExpansion { prefix: vec![], cycle, terminating: self.terminating }
    }

    pub fn prefix_string(&self) -> String {
        self.prefix.iter().map(|d| d.letter()).collect()
    }

    pub fn cycle_string(&self) -> String {
        self.cycle.iter().map(|d| d.letter()).collect()
    }

    /// Digits as `0/1/2` strings, the serialized form.
    pub fn prefix_digits(&self) -> String {
        self.prefix.iter().map(|d| char::from(b'0' + d.value())).collect()
    }

    pub fn cycle_digits(&self) -> String {
        self.cycle.iter().map(|d| char::from(b'0' + d.value())).collect()
    }
}

impl fmt::Display for TernaryExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.prefix_string(), self.cycle_string())
    }
}

fn check_unit(x: &Rational) -> Result<()> {
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::OutOfRange(crate::lattice::format_rational(x)));
    }
    Ok(())
}

fn check_open_unit(x: &Rational) -> Result<()> {
    if !x.is_positive() || *x >= Rational::one() {
        return Err(Error::OutOfRange(crate::lattice::format_rational(x)));
    }
    Ok(())
}

/// Long division. For `x = p/(3^k·m)` with `3 ∤ m` the remainders repeat
/// first at step `k`, with period the order of 3 modulo `m`.
pub fn expand(x: &Rational) -> Result<TernaryExpansion> {
    check_unit(x)?;
    if x.is_one() {
        return Ok(TernaryExpansion { prefix: vec![], cycle: vec![Digit::R], terminating: true });
    }
    let q = x.denom();
    let three = BigInt::from(3);
    let mut k = 0;
    let mut m = q.clone();
    while m.is_multiple_of(&three) {
        m /= &three;
        k += 1;
    }
    let terminating = m.is_one();
    let (prefix, cycle) = match (x.numer().to_u64(), q.to_u64()) {
        (Some(p), Some(q)) if q < u64::MAX / 3 => divide(p, q, k, terminating, |r| r * 3, |s, q| (s / q, s % q)),
        _ => divide(x.numer().clone(), q.clone(), k, terminating, |r| r * 3u8, |s, q| s.div_rem(q)),
    };
    Ok(TernaryExpansion { prefix, cycle, terminating })
}

fn divide<T, D>(
    p: T,
    q: T,
    k: usize,
    terminating: bool,
    triple: impl Fn(T) -> T,
    step: impl Fn(T, &T) -> (D, T),
) -> (Vec<Digit>, Vec<Digit>)
where
    T: Clone + PartialEq,
    D: ToPrimitive,
{
    let next = |r: T| {
        let (d, rem) = step(triple(r), &q);
        (Digit::from_value(d.to_u8().expect("ternary digit")).expect("ternary digit"), rem)
    };
    let mut r = p;
    let mut prefix = Vec::with_capacity(k);
    for _ in 0..k {
        let (d, rem) = next(r);
        prefix.push(d);
        r = rem;
    }
    if terminating {
        return (prefix, vec![Digit::L]);
    }
    let start = r.clone();
    let mut cycle = Vec::new();
    loop {
        let (d, rem) = next(r);
        cycle.push(d);
        r = rem;
        if r == start {
            return (prefix, cycle);
        }
    }
}

/// Digits read as a base-3 integer. Limbs of 32 digits are merged pairwise
/// from the least significant end, so each round reuses one power of 3.
fn pack(digits: &[Digit]) -> BigUint {
    let mut limbs: Vec<BigUint> = digits
        .rchunks(32)
        .map(|c| BigUint::from(c.iter().fold(0u64, |acc, d| acc * 3 + d.value() as u64)))
        .collect();
    let mut base = BigUint::from(3u8).pow(32);
    while limbs.len() > 1 {
        let mut merged = Vec::with_capacity(limbs.len().div_ceil(2));
        let mut it = limbs.into_iter();
        while let Some(lo) = it.next() {
            merged.push(match it.next() {
                Some(hi) => hi * &base + lo,
                None => lo,
            });
        }
        limbs = merged;
        if limbs.len() > 1 {
            base = &base * &base;
        }
    }
    limbs.pop().unwrap_or_default()
}

/// Number of `c` digits among the first `n` digits.
pub fn omega(x: &Rational, n: usize) -> Result<usize> {
    let e = expand(x)?;
    Ok(omega_of(&e, n))
}

pub fn omega_of(e: &TernaryExpansion, n: usize) -> usize {
    (1..=n).filter(|&i| e.digit(i) == Digit::C).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "class", content = "N")]
pub enum OrbitClass {
    SingularTernary,
    PiecewiseFagnano(usize),
    Stabilizing(usize),
    GeneralizedPF,
}

impl OrbitClass {
    pub fn name(&self) -> &'static str {
        match self {
            OrbitClass::SingularTernary => "SingularTernary",
            OrbitClass::PiecewiseFagnano(_) => "PiecewiseFagnano",
            OrbitClass::Stabilizing(_) => "Stabilizing",
            OrbitClass::GeneralizedPF => "GeneralizedPF",
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            OrbitClass::PiecewiseFagnano(n) | OrbitClass::Stabilizing(n) => Some(*n),
            _ => None,
        }
    }
}

impl fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index() {
            Some(n) => write!(f, "{}({n})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

pub fn classify(x: &Rational) -> Result<OrbitClass> {
    check_open_unit(x)?;
    Ok(classify_expansion(&expand(x)?))
}

pub fn classify_expansion(e: &TernaryExpansion) -> OrbitClass {
    if e.terminating {
        return OrbitClass::SingularTernary;
    }
    if e.cycle.iter().all(|&d| d == Digit::C) {
        return OrbitClass::PiecewiseFagnano(e.prefix.len());
    }
    if e.cycle_c_count() == 0 {
        let last_c = e.prefix.iter().rposition(|&d| d == Digit::C).map_or(0, |i| i + 1);
        return OrbitClass::Stabilizing(last_c);
    }
    OrbitClass::GeneralizedPF
}

/// `Φ^n({1/2})` for the maps `x/3`, `x/3 + 1/3`, `x/3 + 2/3`.
pub fn midpoint_set(n: usize) -> Result<BTreeSet<Rational>> {
    if n > MIDPOINT_BUDGET {
        return Err(Error::LevelBudget { level: n, max: MIDPOINT_BUDGET });
    }
    let third = rat(1, 3);
    let mut set: BTreeSet<Rational> = [rat(1, 2)].into_iter().collect();
    for _ in 0..n {
        set = set
            .iter()
            .flat_map(|x| {
                let base = x * &third;
                (0..3).map(move |k| &base + rat(k, 3))
            })
            .collect();
    }
    Ok(set)
}

/// `(N, p)` with `x = Σ_{i=1}^N p_i/3^{N-i+1} + 1/(2·3^N)` when `x` is a
/// midpoint of a ternary interval.
pub fn mc_representation(x: &Rational) -> Result<Option<(usize, Vec<u8>)>> {
    check_open_unit(x)?;
    let e = expand(x)?;
    match classify_expansion(&e) {
        OrbitClass::PiecewiseFagnano(n) => {
            let digits = e.prefix.iter().rev().map(|d| d.value()).collect();
            Ok(Some((n, digits)))
        }
        _ => Ok(None),
    }
}

/// Inverse of [`mc_representation`].
pub fn mc_value(n: usize, digits: &[u8]) -> Rational {
    let pow = |k: usize| Rational::from_integer(BigInt::from(3).pow(k as u32));
    let mut v = Rational::one() / (int(2) * pow(n));
    for (i, &p) in digits.iter().enumerate() {
        v += int(p as i64) / pow(n - i);
    }
    v
}

/// Some expansion of `x` avoids the digit `c`.
pub fn is_cantor(x: &Rational) -> Result<bool> {
    let e = expand(x)?;
    let no_c = |e: &TernaryExpansion| !e.prefix.contains(&Digit::C) && !e.cycle.contains(&Digit::C);
    Ok(no_c(&e) || e.alias().is_some_and(|a| no_c(&a)))
}

/// Cantor points with infinitely many `l` and infinitely many `r`.
pub fn is_cantor_nonternary(x: &Rational) -> Result<bool> {
    let e = expand(x)?;
    Ok(!e.terminating && !e.prefix.contains(&Digit::C) && !e.cycle.contains(&Digit::C))
}
