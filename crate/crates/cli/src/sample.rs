//! Sample specifications for the study harness.

use std::collections::BTreeSet;

use snowflake_core::formulas::random_sample;
use snowflake_core::lattice::parse_rational;
use snowflake_core::ternary::midpoint_set;
use snowflake_core::{Error, Rational, Result};

/// Parses `item,item,...` with items `p/q`, `M(n)` or `random:COUNT:MAXDEN`.
/// Duplicates are dropped, first occurrence wins.
pub fn parse_sample(spec: &str, seed: u64) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |x: Rational| {
        if seen.insert(x.clone()) {
            out.push(x);
        }
    };
    for (k, item) in split_items(spec).into_iter().enumerate() {
        let item = item.trim();
        if let Some(n) = item.strip_prefix("M(").and_then(|s| s.strip_suffix(')')) {
            let n: usize = n.trim().parse().map_err(|_| Error::Parse(item.into()))?;
            midpoint_set(n)?.into_iter().for_each(&mut push);
        } else if let Some(rest) = item.strip_prefix("random:") {
            let (count, max_den) = rest.split_once(':').ok_or_else(|| Error::Parse(item.into()))?;
            let count: usize = count.parse().map_err(|_| Error::Parse(item.into()))?;
            let max_den: u64 = max_den.parse().map_err(|_| Error::Parse(item.into()))?;
            random_sample(count, max_den, seed.wrapping_add(k as u64))?.into_iter().for_each(&mut push);
        } else if !item.is_empty() {
            push(parse_rational(item)?);
        }
    }
    Ok(out)
}

/// Splits on commas outside parentheses.
fn split_items(spec: &str) -> Vec<&str> {
    let mut items = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in spec.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                items.push(&spec[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    items.push(&spec[start..]);
    items
}

#[cfg(test)]
mod tests {
    use super::*;
    use snowflake_core::lattice::rat;

    #[test]
    fn explicit_and_midpoints() {
        let s = parse_sample("M(1), 7/12,1/2", 0).unwrap();
        assert_eq!(s, vec![rat(1, 6), rat(1, 2), rat(5, 6), rat(7, 12)]);
    }

    #[test]
    fn random_items_are_seeded() {
        let a = parse_sample("random:10:100", 3).unwrap();
        let b = parse_sample("random:10:100", 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert!(a.iter().all(|x| x.denom() <= &100.into()));
    }

    #[test]
    fn malformed() {
        assert!(parse_sample("M(x)", 0).is_err());
        assert!(parse_sample("random:5", 0).is_err());
        assert!(parse_sample("1/0", 0).is_err());
    }
}
