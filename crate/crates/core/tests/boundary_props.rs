use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snowflake_core::boundary::{build_prefractal, triangle_count, vertex_census, PointLocation, Prefractal};
use snowflake_core::lattice::{int, rat, LatticePoint, LatticeVector, OrientationClass};
use snowflake_core::Rational;

fn pow(b: u32, e: usize) -> BigInt {
    BigInt::from(b).pow(e as u32)
}

#[test]
fn counts_perimeter_orientations() {
    for n in 0..=6usize {
        let p = build_prefractal(n).unwrap();
        assert_eq!(p.len(), 3 * 4usize.pow(n as u32));
        let total: Rational = (0..p.len()).map(|i| p.segment(i).squared_length()).map(|l2| {
            // every side has the same length 3^{-n}
            assert_eq!(l2, Rational::new(1.into(), pow(9, n)));
            Rational::new(1.into(), pow(3, n))
        }).sum();
        assert_eq!(total, Rational::new(3 * pow(4, n), pow(3, n)));
        assert_eq!(p.perimeter(), total);
        for i in 0..p.len() {
            assert!(OrientationClass::of_vector(&p.segment(i).edge()).is_some());
        }
    }
}

#[test]
fn ghost_midpoint_denominators() {
    for n in 0..=6usize {
        let p = build_prefractal(n).unwrap();
        let bound = BigInt::from(2) * pow(3, n + 1);
        for g in p.ghosts() {
            let m = g.segment.midpoint();
            for c in [&m.a, &m.b] {
                assert!((&bound % c.denom()).is_zero(), "n={n}: midpoint coordinate {c}");
            }
        }
    }
}

#[test]
fn prefractals_are_nested() {
    for n in 1..=6usize {
        let lo = build_prefractal(n - 1).unwrap();
        let hi = build_prefractal(n).unwrap();
        for v in lo.vertex_points() {
            assert_ne!(hi.locate(&v), PointLocation::Outside, "n={n}: {v}");
        }
        // and the cells lie outside the previous level
        for c in hi.cells() {
            assert_eq!(lo.locate(&c.triangle[1]), PointLocation::Outside);
        }
    }
}

#[test]
fn census_and_tiling() {
    for n in 0..=5usize {
        let p = build_prefractal(n).unwrap();
        let (acute, reflex) = vertex_census(&p).unwrap();
        assert_eq!(acute, 4usize.pow(n as u32) + 2);
        assert_eq!(reflex, 2 * (4usize.pow(n as u32) - 1));
        for k in n..=n + 2 {
            let c = triangle_count(&p, k).unwrap();
            assert_eq!(Rational::from_integer(c), p.area() * int(2) * Rational::from_integer(pow(9, k)));
        }
    }
}

fn random_origin(rng: &mut ChaCha8Rng, p: &Prefractal) -> LatticePoint {
    let scale = p.scale();
    if rng.gen_bool(0.2) {
        // boundary points, including vertices and ghost endpoints
        let side = rng.gen_range(0..p.len());
        let u = rat(rng.gen_range(0..6), 6);
        return p.point_on_side(side, &u);
    }
    loop {
        let den = scale * rng.gen_range(1..12);
        let a = rat(rng.gen_range(-den / 3..=4 * den / 3), den);
        let b = rat(rng.gen_range(-den / 3..=den), den);
        let q = LatticePoint::new(a, b);
        if p.locate(&q) == PointLocation::Inside {
            return q;
        }
    }
}

#[test]
fn first_hit_matches_exhaustive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 0..=4usize {
        let p = build_prefractal(n).unwrap();
        let mut hits = 0;
        for _ in 0..1000 {
            let o = random_origin(&mut rng, &p);
            let d = loop {
                let (a, b) = (rng.gen_range(-4i64..=4), rng.gen_range(-4i64..=4));
                if (a, b) != (0, 0) {
                    break LatticeVector::from_ints(a, b);
                }
            };
            let fast = p.first_hit(&o, &d);
            let slow = p.first_hit_exhaustive(&o, &d);
            assert_eq!(fast, slow, "n={n} origin {o} direction {d}");
            hits += fast.is_ok() as usize;
        }
        assert!(hits > 700, "n={n}: only {hits} rays hit");
    }
}
