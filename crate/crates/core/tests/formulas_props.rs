use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use snowflake_core::boundary::{build_prefractal, vertex_census};
use snowflake_core::dynamics::{build_tables, compatible_sequence_on, DEFAULT_BUDGET};
use snowflake_core::formulas::{genus, genus_from_census, length_formula, period_formula, ppf_length};
use snowflake_core::lattice::{int, rat};
use snowflake_core::ternary::{classify, OrbitClass};
use snowflake_core::Rational;

#[test]
fn primary_family_matches_both_formulas() {
    let tables = build_tables(8).unwrap();
    let x0 = rat(1, 2);
    let seq = compatible_sequence_on(&x0, &tables, DEFAULT_BUDGET).unwrap();
    let periods: Vec<u64> = seq.periods().into_iter().map(|p| p.unwrap() as u64).collect();
    let mut prev = Rational::from_integer(0.into());
    for n in 1..=8usize {
        assert_eq!(periods[n], 3 << n);
        assert_eq!(periods[n], period_formula(&x0, n).unwrap());
        let len = seq.orbits[n].length.clone().unwrap();
        assert_eq!(len, length_formula(&x0, n, &periods).unwrap(), "n={n}");
        assert_eq!(len, ppf_length(n));
        assert!(len > prev && len < int(6));
        // the gap to the limit shrinks by 2/3 per level
        let gap = int(6) - &len;
        let mut closed = rat(9, 2);
        for _ in 0..n {
            closed *= rat(2, 3);
        }
        assert_eq!(gap, closed);
        prev = len;
    }
}

#[test]
fn genus_from_vertex_census() {
    for n in 0..=5usize {
        let want = 3 * 4u64.pow(n as u32) - 2;
        let p = build_prefractal(n).unwrap();
        assert_eq!(genus_from_census(vertex_census(&p).unwrap()).unwrap(), want);
        assert_eq!(genus(n).unwrap(), want);
    }
}

fn regular_x0() -> impl Strategy<Value = Rational> {
    (2i64..=400)
        .prop_flat_map(|q| (1..q, Just(q)))
        .prop_map(|(p, q)| rat(p, q))
        .prop_filter("ternary basepoint", |x| classify(x).unwrap() != OrbitClass::SingularTernary)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lengths_are_bounded_and_exact(x0 in regular_x0()) {
        let tables = build_tables(6).unwrap();
        let seq = compatible_sequence_on(&x0, &tables, DEFAULT_BUDGET).unwrap();
        for (n, o) in seq.orbits.iter().enumerate() {
            let Some(len) = o.length.clone().filter(|_| o.is_periodic()) else { continue };
            if n >= 1 {
                prop_assert!(len <= ppf_length(n), "n={} {} > {}", n, len, ppf_length(n));
            }
            // denominator divides 3^k·den(x0) for some k
            let mut d = len.denom().clone();
            let three = BigInt::from(3);
            while d.is_multiple_of(&three) {
                d /= &three;
            }
            let mut q = x0.denom().clone();
            while q.is_multiple_of(&three) {
                q /= &three;
            }
            prop_assert!(q.is_multiple_of(&d), "n={} length {}", n, len);
        }
    }
}
