//! Closed-form period, length and genus quantities, and the harness that
//! compares them with simulated orbits.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{build_prefractal, Prefractal};
use crate::dynamics::{build_tables, compatible_sequence_on};
use crate::error::{Error, Result};
use crate::lattice::{int, rat, rational_string, Rational};
use crate::ternary::{classify, expand, omega_of, Digit, OrbitClass};

fn pow(base: i64, e: usize) -> Rational {
    Rational::from_integer(BigInt::from(base).pow(e as u32))
}

/// Length of the period-3 orbit through the side midpoints of `KS_0`.
pub fn fagnano_length() -> Rational {
    rat(3, 2)
}

/// `|ppf_n| = 6 − (9/2)(2/3)^n`, the length of the primary piecewise
/// Fagnano orbit.
pub fn ppf_length(n: usize) -> Rational {
    int(6) - rat(9, 2) * pow(2, n) / pow(3, n)
}

fn require_nonternary(x0: &Rational) -> Result<OrbitClass> {
    let class = classify(x0)?;
    if class == OrbitClass::SingularTernary {
        return Err(Error::TernaryBasepoint);
    }
    Ok(class)
}

/// `3·2^{ω_n(x0)}`.
pub fn period_formula(x0: &Rational, n: usize) -> Result<u64> {
    require_nonternary(x0)?;
    let w = omega_of(&expand(x0)?, n);
    Ok(3u64 << w)
}

/// `2𝓛 + Σ_{i=2}^n χ(d_i)·periods[i−1]·𝓛/3^i`, where `d_i` is the `i`-th
/// ternary digit of `x0` and `χ` marks the digit `c`.
pub fn length_formula(x0: &Rational, n: usize, periods: &[u64]) -> Result<Rational> {
    if n == 0 {
        return Err(Error::OutOfRange("length formula starts at n = 1".into()));
    }
    if periods.len() < n {
        return Err(Error::OutOfRange(format!("need {n} periods, got {}", periods.len())));
    }
    require_nonternary(x0)?;
    let e = expand(x0)?;
    let l = fagnano_length();
    let mut total = int(2) * &l;
    for i in 2..=n {
        if e.digit(i) == Digit::C {
            total += int(periods[i - 1] as i64) * &l / pow(3, i);
        }
    }
    Ok(total)
}

/// Limit of the length formula as `n → ∞` with formula periods. The
/// eventually periodic tail turns the series into finitely many geometric
/// series with ratio `2^m/3^L` for a cycle of length `L` holding `m` c's.
pub fn length_limit(x0: &Rational) -> Result<Rational> {
    require_nonternary(x0)?;
    let e = expand(x0)?;
    let l = fagnano_length();
    let start = e.prefix.len().max(1);
    let mut total = int(2) * &l;
    for i in 2..=start {
        if e.digit(i) == Digit::C {
            total += int(3) * pow(2, omega_of(&e, i - 1)) * &l / pow(3, i);
        }
    }
    let cycle = e.shift(start).cycle;
    let m = cycle.iter().filter(|&&d| d == Digit::C).count();
    let mut block = Rational::zero();
    let mut seen = 0;
    for (r, d) in cycle.iter().enumerate() {
        if *d == Digit::C {
            block += pow(2, seen) / pow(3, r + 1);
            seen += 1;
        }
    }
    let ratio = pow(2, m) / pow(3, cycle.len());
    let lead = int(3) * pow(2, omega_of(&e, start)) * &l / pow(3, start);
    Ok(total + lead * block / (Rational::one() - ratio))
}

/// Genus from the vertex census: `1 + (3/2)·Σ (p−1)/q` with angle `pπ/q`,
/// so π/3 contributes nothing and each 4π/3 vertex contributes 1.
pub fn genus_from_census(census: (usize, usize)) -> Result<u64> {
    let (_, reflex) = census;
    let g = Rational::one() + rat(3, 2) * int(reflex as i64);
    if !g.is_integer() {
        return Err(Error::InvariantViolation(format!("non-integral genus {g}")));
    }
    u64::try_from(g.to_integer()).map_err(|_| Error::InvariantViolation(format!("genus {g} out of range")))
}

pub fn genus_of(p: &Prefractal) -> Result<u64> {
    let g = genus_from_census(p.census()?)?;
    let expected = 3 * 4u64.pow(p.level() as u32) - 2;
    if g != expected {
        return Err(Error::InvariantViolation(format!("genus {g} from census, expected {expected}")));
    }
    Ok(g)
}

pub fn genus(n: usize) -> Result<u64> {
    genus_of(&build_prefractal(n)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub n: usize,
    pub omega: usize,
    pub period_formula: u64,
    pub period_simulated: Option<u64>,
    /// Length formula evaluated with the formula's own periods.
    #[serde(with = "opt_rational")]
    pub length_formula_formula_periods: Option<Rational>,
    /// Length formula evaluated with simulated periods.
    #[serde(with = "opt_rational")]
    pub length_formula_sim_periods: Option<Rational>,
    #[serde(with = "opt_rational")]
    pub length_simulated: Option<Rational>,
    pub agree_period: bool,
    /// Undefined at `n = 0`, where the formula does not apply.
    pub agree_length: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaReport {
    #[serde(with = "rational_string")]
    pub x0: Rational,
    pub class: OrbitClass,
    pub records: Vec<LevelRecord>,
    pub truncated: Option<String>,
}

mod opt_rational {
    use super::*;
    use crate::lattice::{format_rational, parse_rational};
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| parse_rational(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

/// Formula against simulation for one basepoint over prebuilt tables.
pub fn study_point(x0: &Rational, tables: &[Prefractal], budget: usize) -> Result<FormulaReport> {
    let class = require_nonternary(x0)?;
    let e = expand(x0)?;
    let seq = compatible_sequence_on(x0, tables, budget)?;
    let sim: Vec<u64> = seq.orbits.iter().filter_map(|o| o.period().map(|p| p as u64)).collect();
    let formula: Vec<u64> = (0..tables.len()).map(|n| 3u64 << omega_of(&e, n)).collect();
    let mut records = Vec::new();
    for (n, orbit) in seq.orbits.iter().enumerate() {
        let period_simulated = orbit.period().map(|p| p as u64);
        let length_simulated = if orbit.is_periodic() { orbit.length.clone() } else { None };
        let length_formula_formula_periods = (n >= 1).then(|| length_formula(x0, n, &formula)).transpose()?;
        let length_formula_sim_periods =
            (n >= 1 && sim.len() >= n).then(|| length_formula(x0, n, &sim)).transpose()?;
        let agree_length = (n >= 1).then(|| {
            length_simulated.is_some() && length_simulated == length_formula_sim_periods
        });
        records.push(LevelRecord {
            n,
            omega: omega_of(&e, n),
            period_formula: formula[n],
            period_simulated,
            length_formula_formula_periods,
            length_formula_sim_periods,
            length_simulated,
            agree_period: period_simulated == Some(formula[n]),
            agree_length,
        });
    }
    Ok(FormulaReport { x0: x0.clone(), class, records, truncated: seq.truncated })
}

/// Runs [`study_point`] for every sample over `KS_0..=KS_{n_max}`.
pub fn period_study(sample: &[Rational], n_max: usize, budget: usize) -> Result<Vec<FormulaReport>> {
    let tables = build_tables(n_max)?;
    sample.par_iter().map(|x| study_point(x, &tables, budget)).collect()
}

/// `count` distinct random rationals in `(0,1)` with denominator at most
/// `max_den`, skipping those with terminating ternary expansions.
pub fn random_sample(count: usize, max_den: u64, seed: u64) -> Result<Vec<Rational>> {
    if max_den < 2 {
        return Err(Error::OutOfRange(format!("denominator bound {max_den} below 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Rational> = Vec::with_capacity(count);
    while out.len() < count {
        let den = rng.gen_range(2..=max_den) as i64;
        let x = rat(rng.gen_range(1..den), den);
        if classify(&x)? != OrbitClass::SingularTernary && !out.contains(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassAgreement {
    pub rows: usize,
    pub period_agree: usize,
    pub length_rows: usize,
    pub length_agree: usize,
}

/// Agreement counts keyed by class name.
pub fn agreement_by_class(reports: &[FormulaReport]) -> BTreeMap<String, ClassAgreement> {
    let mut out: BTreeMap<String, ClassAgreement> = BTreeMap::new();
    for r in reports {
        let entry = out.entry(r.class.name().to_string()).or_default();
        for rec in &r.records {
            entry.rows += 1;
            entry.period_agree += rec.agree_period as usize;
            if let Some(a) = rec.agree_length {
                entry.length_rows += 1;
                entry.length_agree += a as usize;
            }
        }
    }
    out
}
