use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use proptest::prelude::*;
use snowflake_core::lattice::rat;
use snowflake_core::ternary::{
    classify, expand, mc_representation, mc_value, midpoint_set, omega, Digit, OrbitClass,
};
use snowflake_core::Rational;

fn unit_rational(max_den: i64) -> impl Strategy<Value = Rational> {
    (2..=max_den).prop_flat_map(|q| (1..q, Just(q))).prop_map(|(p, q)| rat(p, q))
}

fn is_power_of_three(mut d: BigInt) -> bool {
    let three = BigInt::from(3);
    while d.is_multiple_of(&three) {
        d /= &three;
    }
    d.is_one()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn expansion_round_trip(x in unit_rational(1_000_000)) {
        let e = expand(&x).unwrap();
        let (n, d) = e.value_fraction();
        prop_assert_eq!(n * x.denom(), d * x.numer());
        if let Some(alias) = e.alias() {
            prop_assert_eq!(alias.value(), x);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3000))]

    #[test]
    fn classes_partition(x in unit_rational(5000)) {
        let class = classify(&x).unwrap();
        let e = expand(&x).unwrap();
        prop_assert_eq!(class == OrbitClass::SingularTernary, is_power_of_three(x.denom().clone()));
        let all_c = e.cycle.iter().all(|&d| d == Digit::C);
        let no_c = !e.cycle.contains(&Digit::C);
        match class {
            OrbitClass::SingularTernary => prop_assert!(e.terminating),
            OrbitClass::PiecewiseFagnano(n) => prop_assert!(all_c && !e.terminating && n == e.prefix.len()),
            OrbitClass::Stabilizing(_) => prop_assert!(no_c && !e.terminating),
            OrbitClass::GeneralizedPF => prop_assert!(!all_c && !no_c && !e.terminating),
        }
        prop_assert_eq!(mc_representation(&x).unwrap().is_some(), matches!(class, OrbitClass::PiecewiseFagnano(_)));
    }

    #[test]
    fn omega_is_a_monotone_count(x in unit_rational(5000), n in 0usize..40) {
        let w = omega(&x, n).unwrap();
        prop_assert!(w <= n);
        prop_assert!(w <= omega(&x, n + 1).unwrap());
        prop_assert!(omega(&x, n + 1).unwrap() <= w + 1);
    }
}

#[test]
fn midpoint_representation_both_ways() {
    for n in 0..=8usize {
        let set = midpoint_set(n).unwrap();
        assert_eq!(set.len(), 3usize.pow(n as u32));
        for x in &set {
            let (k, digits) = mc_representation(x).unwrap().expect("midpoints are representable");
            assert_eq!(mc_value(k, &digits), *x);
            assert!(matches!(classify(x).unwrap(), OrbitClass::PiecewiseFagnano(m) if m == k));
        }
    }
}

#[test]
fn midpoints_are_dense() {
    let m8: Vec<Rational> = midpoint_set(8).unwrap().into_iter().collect();
    let h = rat(1, 3i64.pow(8));
    let steps = 3i64.pow(8);
    for i in 0..=steps {
        let g = rat(i, steps);
        let pos = m8.partition_point(|x| x < &g);
        let near = [pos.checked_sub(1), Some(pos)]
            .into_iter()
            .flatten()
            .filter_map(|j| m8.get(j))
            .map(|x| (x - &g).abs())
            .min()
            .unwrap();
        assert!(near <= h, "grid point {g} is {near} from M(8)");
    }
}
