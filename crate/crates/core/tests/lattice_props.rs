use num_traits::Zero;
use proptest::prelude::*;
use snowflake_core::boundary::build_prefractal;
use snowflake_core::lattice::{
    polygon_lattice_area, ray_hit, rat, reflect_direction, reflect_point, LatticePoint, LatticeVector, OrientationClass,
    Segment,
};
use snowflake_core::Rational;

const CLASSES: [OrientationClass; 3] = [OrientationClass::Horizontal, OrientationClass::UpRight, OrientationClass::UpLeft];

fn small_rat() -> impl Strategy<Value = Rational> {
    (-60i64..60, 1i64..30).prop_map(|(p, q)| rat(p, q))
}

fn point() -> impl Strategy<Value = LatticePoint> {
    (small_rat(), small_rat()).prop_map(|(a, b)| LatticePoint::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn reflections_are_isometric_involutions(a in -100i64..=100, b in -100i64..=100, o in 0usize..3) {
        prop_assume!((a, b) != (0, 0));
        let v = LatticeVector::from_ints(a, b);
        let r = reflect_direction(&v, CLASSES[o]).unwrap();
        prop_assert_eq!(r.squared_length(), v.squared_length());
        prop_assert_eq!(reflect_direction(&r, CLASSES[o]).unwrap(), v);
    }

    #[test]
    fn reflection_points_are_involutive(p in point(), q in point(), k in 0u8..6, len in 1i64..5) {
        let s = Segment::new(q.clone(), q.offset(&LatticeVector::unit(k).scale(&rat(len, 3)))).unwrap();
        let once = reflect_point(&p, &s);
        prop_assert_eq!(reflect_point(&once, &s), p.clone());
        // the mirror line is fixed
        let m = s.midpoint();
        prop_assert_eq!(reflect_point(&m, &s), m);
    }

    #[test]
    fn ray_hit_lands_on_the_segment_line(o in point(), q in point(), k in 0u8..6, len in 1i64..4, da in -5i64..=5, db in -5i64..=5) {
        prop_assume!((da, db) != (0, 0));
        let s = Segment::new(q.clone(), q.offset(&LatticeVector::unit(k).scale(&rat(len, 1)))).unwrap();
        let d = LatticeVector::from_ints(da, db);
        if let Ok(Some(hit)) = ray_hit(&o, &d, &s) {
            // zero residual against the line through the segment
            prop_assert!((&hit.point - &s.start).cross(&s.edge()).is_zero());
            prop_assert_eq!(o.along(&d, &hit.t), hit.point.clone());
            prop_assert_eq!(s.point_at(&hit.position), hit.point);
        }
    }
}

#[test]
fn reflection_index_map() {
    for (m, o) in CLASSES.iter().enumerate() {
        assert_eq!(o.mirror_index() as usize, m);
        for k in 0..6u8 {
            let r = reflect_direction(&LatticeVector::unit(k), *o).unwrap();
            let want = (2 * m as i64 - k as i64).rem_euclid(6) as u8;
            assert_eq!(r, LatticeVector::unit(want), "k={k} m={m}");
        }
    }
}

#[test]
fn snowflake_area_series() {
    for n in 0..=6usize {
        let p = build_prefractal(n).unwrap();
        let ratio = Rational::new(4u32.pow(n as u32).into(), 9u32.pow(n as u32).into());
        let want = rat(1, 2) * (rat(8, 5) - rat(3, 5) * ratio);
        assert_eq!(polygon_lattice_area(&p.vertex_points()).unwrap(), want, "n={n}");
    }
}
