//! Exact plane geometry in the triangular-lattice basis.
//!
//! A point `(a, b)` stands for the Cartesian point `a·e1 + b·e2` with
//! `e1 = (1, 0)` and `e2 = (1/2, √3/2)`. Every vertex of a prefractal table
//! and every collision point of a lattice-direction orbit has rational
//! coordinates in this basis, so `√3` never shows up in a computation.
//!
//! The determinant `cross(u, v) = u.a·v.b − u.b·v.a` taken in lattice
//! coordinates is the Cartesian cross product divided by `√3/2`; signs and
//! zero tests therefore agree with the Euclidean ones.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Canonical `p/q` form; zero is `0/1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::Parse(s.to_string());
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| err())?;
    let q: BigInt = q.parse().map_err(|_| err())?;
    if q.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(p, q))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeVector {
    #[serde(with = "rational_string")]
    pub a: Rational,
    #[serde(with = "rational_string")]
    pub b: Rational,
}

/// Unit directions `k·60°`, `k = 0..6`.
const UNIT: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

impl LatticeVector {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        Self::new(int(a), int(b))
    }

    /// The unit vector pointing at `k·60°`.
    pub fn unit(k: u8) -> Self {
        let (a, b) = UNIT[(k % 6) as usize];
        Self::from_ints(a, b)
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The lattice quadratic form `a² + ab + b²`, i.e. the Euclidean
    /// squared length.
    pub fn squared_length(&self) -> Rational {
        &self.a * &self.a + &self.a * &self.b + &self.b * &self.b
    }

    pub fn cross(&self, other: &LatticeVector) -> Rational {
        &self.a * &other.b - &self.b * &other.a
    }

    /// Euclidean inner product expressed in lattice coordinates.
    pub fn dot(&self, other: &LatticeVector) -> Rational {
        let half = rat(1, 2);
        &self.a * &other.a + &self.b * &other.b + half * (&self.a * &other.b + &self.b * &other.a)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(&self.a * s, &self.b * s)
    }

    /// Index `k` if this vector is exactly the unit direction `k·60°`.
    pub fn direction_index(&self) -> Option<u8> {
        (0..6u8).find(|&k| *self == Self::unit(k))
    }

    /// Index `k` if this vector is a positive multiple of the unit
    /// direction `k·60°`.
    pub fn direction_class(&self) -> Option<u8> {
        if self.is_zero() {
            return None;
        }
        (0..6u8).find(|&k| {
            let u = Self::unit(k);
            self.cross(&u).is_zero() && self.dot(&u).is_positive()
        })
    }

    /// The primitive integer vector pointing the same way.
    pub fn primitive(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDirection);
        }
        let l = self.a.denom().lcm(self.b.denom());
        let a = (&self.a * Rational::from_integer(l.clone())).to_integer();
        let b = (&self.b * Rational::from_integer(l)).to_integer();
        let g = a.gcd(&b);
        Ok(Self::new(Rational::from_integer(a / &g), Rational::from_integer(b / &g)))
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    /// Rotation by +60°, an integer map on lattice coordinates.
    pub fn rotate_ccw(&self) -> Self {
        Self::new(-&self.b, &self.a + &self.b)
    }

    /// Rotation by −60°.
    pub fn rotate_cw(&self) -> Self {
        Self::new(&self.a + &self.b, -&self.a)
    }

    pub fn to_cartesian(&self) -> (f64, f64) {
        let a = to_f64(&self.a);
        let b = to_f64(&self.b);
        (a + b / 2.0, b * 3f64.sqrt() / 2.0)
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector::new(-&self.a, -&self.b)
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    #[serde(with = "rational_string")]
    pub a: Rational,
    #[serde(with = "rational_string")]
    pub b: Rational,
}

impl LatticePoint {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        Self::new(int(a), int(b))
    }

    pub fn from_rats(a: (i64, i64), b: (i64, i64)) -> Self {
        Self::new(rat(a.0, a.1), rat(b.0, b.1))
    }

    pub fn origin() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn offset(&self, v: &LatticeVector) -> Self {
        Self::new(&self.a + &v.a, &self.b + &v.b)
    }

    /// `self + t·v`
    pub fn along(&self, v: &LatticeVector, t: &Rational) -> Self {
        Self::new(&self.a + &v.a * t, &self.b + &v.b * t)
    }

    pub fn to_cartesian(&self) -> (f64, f64) {
        let a = to_f64(&self.a);
        let b = to_f64(&self.b);
        (a + b / 2.0, b * 3f64.sqrt() / 2.0)
    }
}

impl Sub for &LatticePoint {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticePoint) -> LatticeVector {
        LatticeVector::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// The three line directions (mod π) that occur as sides of any prefractal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrientationClass {
    /// 0 mod π
    Horizontal,
    /// π/3 mod π
    UpRight,
    /// 2π/3 mod π
    UpLeft,
}

impl OrientationClass {
    pub fn of_vector(v: &LatticeVector) -> Option<Self> {
        if v.is_zero() {
            None
        } else if v.b.is_zero() {
            Some(Self::Horizontal)
        } else if v.a.is_zero() {
            Some(Self::UpRight)
        } else if (&v.a + &v.b).is_zero() {
            Some(Self::UpLeft)
        } else {
            None
        }
    }

    pub fn of_direction_index(k: u8) -> Self {
        match k % 3 {
            0 => Self::Horizontal,
            1 => Self::UpRight,
            _ => Self::UpLeft,
        }
    }

    /// Mirror angle in units of 60°.
    pub fn mirror_index(self) -> u8 {
        match self {
            Self::Horizontal => 0,
            Self::UpRight => 1,
            Self::UpLeft => 2,
        }
    }

    /// Specular reflection across a line of this orientation.
    pub fn reflect(self, v: &LatticeVector) -> LatticeVector {
        let (a, b) = (&v.a, &v.b);
        match self {
            Self::Horizontal => LatticeVector::new(a + b, -b),
            Self::UpRight => LatticeVector::new(-a, a + b),
            Self::UpLeft => LatticeVector::new(-b, -a),
        }
    }

    /// Same maps on plain integer pairs.
    pub fn reflect_ints(self, (a, b): (i64, i64)) -> (i64, i64) {
        match self {
            Self::Horizontal => (a + b, -b),
            Self::UpRight => (-a, a + b),
            Self::UpLeft => (-b, -a),
        }
    }
}

pub fn reflect_direction(d: &LatticeVector, o: OrientationClass) -> Result<LatticeVector> {
    if d.is_zero() {
        return Err(Error::ZeroDirection);
    }
    Ok(o.reflect(d))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub start: LatticePoint,
    pub end: LatticePoint,
}

impl Segment {
    pub fn new(start: LatticePoint, end: LatticePoint) -> Result<Self> {
        let s = Self { start, end };
        if OrientationClass::of_vector(&s.edge()).is_none() {
            return Err(Error::BadSegment);
        }
        Ok(s)
    }

    pub fn edge(&self) -> LatticeVector {
        &self.end - &self.start
    }

    pub fn orientation(&self) -> OrientationClass {
        OrientationClass::of_vector(&self.edge()).expect("segment invariant")
    }

    pub fn point_at(&self, u: &Rational) -> LatticePoint {
        self.start.along(&self.edge(), u)
    }

    pub fn midpoint(&self) -> LatticePoint {
        self.point_at(&rat(1, 2))
    }

    /// Squared Euclidean length.
    pub fn squared_length(&self) -> Rational {
        self.edge().squared_length()
    }

    /// Relative position of `p` along the segment if `p` lies on it.
    pub fn locate(&self, p: &LatticePoint) -> Option<Rational> {
        let e = self.edge();
        let w = p - &self.start;
        if !e.cross(&w).is_zero() {
            return None;
        }
        let u = if e.a.is_zero() { &w.b / &e.b } else { &w.a / &e.a };
        (!u.is_negative() && u <= Rational::one()).then_some(u)
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.locate(p).is_some()
    }
}

pub fn reflect_point(p: &LatticePoint, s: &Segment) -> LatticePoint {
    let anchor = &s.start;
    let w = p - anchor;
    anchor.offset(&s.orientation().reflect(&w))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayHit {
    pub t: Rational,
    pub point: LatticePoint,
    /// Relative position along the segment, in `[0, 1]`.
    pub position: Rational,
    pub at_vertex: bool,
}

/// First forward intersection of `origin + t·d` (`t > 0`) with `s`.
pub fn ray_hit(origin: &LatticePoint, d: &LatticeVector, s: &Segment) -> Result<Option<RayHit>> {
    if d.is_zero() {
        return Err(Error::ZeroDirection);
    }
    let e = s.edge();
    let w = &s.start - origin;
    let denom = d.cross(&e);
    if denom.is_zero() {
        if !w.cross(d).is_zero() {
            return Ok(None);
        }
        // Collinear: the ray either runs along the segment, reaches the
        // nearer endpoint, or misses.
        let dd = d.dot(d);
        let t_start = w.dot(d) / &dd;
        let t_end = (&s.end - origin).dot(d) / &dd;
        let (lo, hi) = if t_start < t_end { (&t_start, &t_end) } else { (&t_end, &t_start) };
        if !lo.is_positive() && hi.is_positive() {
            return Err(Error::DegenerateRay);
        }
        let (t, position) = if t_start < t_end {
            (t_start, Rational::zero())
        } else {
            (t_end, Rational::one())
        };
        if !t.is_positive() {
            return Ok(None);
        }
        let point = origin.along(d, &t);
        return Ok(Some(RayHit { t, point, position, at_vertex: true }));
    }
    let t = w.cross(&e) / &denom;
    if !t.is_positive() {
        return Ok(None);
    }
    let u = w.cross(d) / &denom;
    if u.is_negative() || u > Rational::one() {
        return Ok(None);
    }
    let at_vertex = u.is_zero() || u.is_one();
    let point = origin.along(d, &t);
    Ok(Some(RayHit { t, point, position: u, at_vertex }))
}

/// Shoelace area in units of the fundamental parallelogram `|e1 × e2|`;
/// the unit equilateral triangle has area 1/2.
pub fn polygon_lattice_area(vertices: &[LatticePoint]) -> Result<Rational> {
    if vertices.len() < 3 {
        return Err(Error::TooFewVertices(vertices.len()));
    }
    let mut twice = Rational::zero();
    for (i, p) in vertices.iter().enumerate() {
        let q = &vertices[(i + 1) % vertices.len()];
        twice += &p.a * &q.b - &p.b * &q.a;
    }
    Ok(twice / int(2))
}
