//! The prefractal polygons `KS_n`, their ghosts and cells, and exact ray
//! shooting against them.
//!
//! Internally every vertex of `KS_n` is stored as an integer point of the
//! lattice scaled by `3^n`, so each side is a unit step in one of the six
//! directions. Ray queries run in that scaled frame with exact rationals.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::addressing::{child_digits_unchecked, AddressWord};
use crate::error::{Error, Result};
use crate::lattice::{
    int, polygon_lattice_area, rat, LatticePoint, LatticeVector, OrientationClass, Rational, Segment,
};

/// Largest level `build_prefractal` accepts.
pub const LEVEL_BUDGET: usize = 10;

/// Unit steps `k·60°` as integer pairs.
pub const UNITS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

pub fn unit(k: u8) -> (i64, i64) {
    UNITS[(k % 6) as usize]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AngleClass {
    /// Interior angle π/3.
    PiOver3,
    /// Interior angle 4π/3.
    FourPiOver3,
}

impl AngleClass {
    pub fn label(self) -> &'static str {
        match self {
            AngleClass::PiOver3 => "pi/3",
            AngleClass::FourPiOver3 => "4pi/3",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Side {
    /// 1-based position along the boundary, starting at the origin.
    pub index: usize,
    /// Start vertex in the `3^n`-scaled lattice.
    pub start: (i64, i64),
    /// Direction index `k`; the side runs along `k·60°`.
    pub dir: u8,
    pub address: AddressWord,
}

impl Side {
    pub fn end(&self) -> (i64, i64) {
        let (da, db) = unit(self.dir);
        (self.start.0 + da, self.start.1 + db)
    }

    pub fn orientation(&self) -> OrientationClass {
        OrientationClass::of_direction_index(self.dir)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub point: LatticePoint,
    pub angle: AngleClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ghost {
    pub segment: Segment,
    /// 0-based index of the side whose middle third this is.
    pub parent_side: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    /// Base start, apex, base end.
    pub triangle: [LatticePoint; 3],
    /// Ghost of the `KS_{n-1}` side the cell replaced.
    pub ghost: Ghost,
    /// 1-based index of that parent side.
    pub index: usize,
}

/// Where a point sits relative to the closed table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointLocation {
    Inside,
    Outside,
    Boundary { side: usize, position: Rational, at_vertex: bool },
}

/// Result of a public first-hit query, in unscaled coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstHit {
    /// 0-based side index. At a vertex this is the side starting there.
    pub side: usize,
    pub point: LatticePoint,
    pub t: Rational,
    pub position: Rational,
    pub at_vertex: bool,
    /// The hit is at relative position 1/3 or 2/3 of the side.
    pub at_ghost_endpoint: bool,
}

type Shooter = fn(&Prefractal, &(Rational, Rational), (i64, i64)) -> Result<RawHit>;

/// A hit in the scaled frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RawHit {
    pub side: usize,
    pub u: Rational,
    pub t: Rational,
}

impl RawHit {
    pub fn at_vertex(&self) -> bool {
        self.u.is_zero() || self.u.is_one()
    }

    pub fn at_ghost_endpoint(&self) -> bool {
        self.u == rat(1, 3) || self.u == rat(2, 3)
    }
}

/// Multi-level occupancy grid over the scaled lattice. Level 0 buckets are
/// unit cells holding every side that touches the closed cell; a block at
/// level `j` covers `3^j × 3^j` unit cells and is marked when any of its
/// unit cells is occupied.
#[derive(Clone, Debug)]
struct GridIndex {
    shift: i64,
    top: u32,
    leaf: Vec<(u64, u32)>,
    blocks: Vec<HashSet<u64>>,
}

fn key(i: i64, j: i64) -> u64 {
    ((i as u64) << 32) | (j as u64 & 0xffff_ffff)
}

impl GridIndex {
    fn build(sides: &[Side]) -> Self {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for s in sides {
            lo = lo.min(s.start.0).min(s.start.1);
            hi = hi.max(s.start.0).max(s.start.1);
        }
        let shift = 2 - lo;
        let extent = hi + shift + 2;
        let mut top = 0u32;
        while 3i64.pow(top) < extent {
            top += 1;
        }
        let mut leaf = Vec::with_capacity(sides.len() * 7);
        for (idx, s) in sides.iter().enumerate() {
            let mut cells: Vec<(i64, i64)> = Vec::with_capacity(8);
            for (x, y) in [s.start, s.end()] {
                let (x, y) = (x + shift, y + shift);
                for (dx, dy) in [(-1, -1), (0, -1), (-1, 0), (0, 0)] {
                    cells.push((x + dx, y + dy));
                }
            }
            cells.sort_unstable();
            cells.dedup();
            for (i, j) in cells {
                leaf.push((key(i, j), idx as u32));
            }
        }
        leaf.sort_unstable();
        let mut blocks = Vec::with_capacity(top as usize);
        for level in 1..=top {
            let size = 3i64.pow(level);
            let mut set = HashSet::new();
            for &(k, _) in &leaf {
                let (i, j) = ((k >> 32) as i64, (k & 0xffff_ffff) as i64);
                set.insert(key(i / size, j / size));
            }
            blocks.push(set);
        }
        Self { shift, top, leaf, blocks }
    }

    fn bucket(&self, i: i64, j: i64) -> &[(u64, u32)] {
        let k = key(i, j);
        let lo = self.leaf.partition_point(|e| e.0 < k);
        let hi = self.leaf[lo..].partition_point(|e| e.0 == k) + lo;
        &self.leaf[lo..hi]
    }

    fn occupied(&self, level: u32, i: i64, j: i64) -> bool {
        if i < 0 || j < 0 {
            return false;
        }
        if level == 0 {
            !self.bucket(i, j).is_empty()
        } else {
            self.blocks[level as usize - 1].contains(&key(i, j))
        }
    }
}

fn mul_small(r: &Rational, k: i64) -> Rational {
    match k {
        0 => Rational::zero(),
        1 => r.clone(),
        -1 => -r,
        _ => r * int(k),
    }
}

/// Exact intersection of `o + t·d` (`t > 0`) with the unit side starting at
/// integer point `s` along `e`. Returns `(t, u)`.
fn hit_unit_side(
    o: &(Rational, Rational),
    d: (i64, i64),
    s: (i64, i64),
    e: (i64, i64),
) -> Result<Option<(Rational, Rational)>> {
    let wa = int(s.0) - &o.0;
    let wb = int(s.1) - &o.1;
    let denom = d.0 * e.1 - d.1 * e.0;
    let cross_wd = mul_small(&wa, d.1) - mul_small(&wb, d.0);
    if denom == 0 {
        if !cross_wd.is_zero() {
            return Ok(None);
        }
        // Collinear: the ray reaches the nearer endpoint or misses.
        let along = |v: &Rational, dv: i64, ev: i64| (v / int(dv), Rational::from(BigInt::from(ev)) / int(dv));
        let (t_start, dt) = if d.0 != 0 { along(&wa, d.0, e.0) } else { along(&wb, d.1, e.1) };
        let t_end = &t_start + dt;
        let (lo, hi) = if t_start <= t_end { (&t_start, &t_end) } else { (&t_end, &t_start) };
        if !lo.is_positive() && hi.is_positive() {
            return Err(Error::DegenerateRay);
        }
        let (t, u) = if t_start < t_end { (t_start, Rational::zero()) } else { (t_end, Rational::one()) };
        return Ok(t.is_positive().then_some((t, u)));
    }
    let cross_we = mul_small(&wa, e.1) - mul_small(&wb, e.0);
    let t = cross_we / int(denom);
    if !t.is_positive() {
        return Ok(None);
    }
    let u = cross_wd / int(denom);
    if u.is_negative() || u > Rational::one() {
        return Ok(None);
    }
    Ok(Some((t, u)))
}

fn floor_div(r: &Rational, s: i64) -> (i64, bool) {
    let q = r / int(s);
    let f = q.floor();
    let exact = f == q;
    (i64::try_from(f.to_integer()).expect("grid coordinate"), exact)
}

#[derive(Clone, Debug)]
pub struct Prefractal {
    level: usize,
    sides: Vec<Side>,
    index: GridIndex,
}

pub fn build_prefractal(n: usize) -> Result<Prefractal> {
    build_prefractal_with_budget(n, LEVEL_BUDGET)
}

pub fn build_prefractal_with_budget(n: usize, budget: usize) -> Result<Prefractal> {
    if n > budget {
        return Err(Error::LevelBudget { level: n, max: budget });
    }
    let mut sides = vec![
        Side { index: 1, start: (0, 0), dir: 0, address: AddressWord::root(5) },
        Side { index: 2, start: (1, 0), dir: 2, address: AddressWord::root(1) },
        Side { index: 3, start: (0, 1), dir: 4, address: AddressWord::root(3) },
    ];
    for _ in 0..n {
        sides = refine(&sides);
    }
    let index = GridIndex::build(&sides);
    Ok(Prefractal { level: n, sides, index })
}

fn refine(sides: &[Side]) -> Vec<Side> {
    let mut out = Vec::with_capacity(sides.len() * 4);
    for s in sides {
        let k = s.dir;
        let (ua, ub) = unit(k);
        let (va, vb) = unit(k + 5);
        let p = (3 * s.start.0, 3 * s.start.1);
        let digits = child_digits_unchecked(&s.address);
        let children = [
            (p, k, digits.start_third),
            ((p.0 + ua, p.1 + ub), (k + 5) % 6, digits.bump_first),
            ((p.0 + ua + va, p.1 + ub + vb), (k + 1) % 6, digits.bump_second),
            ((p.0 + 2 * ua, p.1 + 2 * ub), k, digits.end_third),
        ];
        for (start, dir, digit) in children {
            out.push(Side { index: out.len() + 1, start, dir, address: s.address.child(digit) });
        }
    }
    out
}

impl Prefractal {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn side(&self, i: usize) -> &Side {
        &self.sides[i]
    }

    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    /// `3^n`
    pub fn scale(&self) -> i64 {
        3i64.pow(self.level as u32)
    }

    pub fn scale_rational(&self) -> Rational {
        int(self.scale())
    }

    pub fn unscale_point(&self, a: i64, b: i64) -> LatticePoint {
        let s = self.scale();
        LatticePoint::new(rat(a, s), rat(b, s))
    }

    pub fn to_scaled(&self, p: &LatticePoint) -> (Rational, Rational) {
        let s = self.scale_rational();
        (&p.a * &s, &p.b * &s)
    }

    pub fn from_scaled(&self, p: &(Rational, Rational)) -> LatticePoint {
        let s = self.scale_rational();
        LatticePoint::new(&p.0 / &s, &p.1 / &s)
    }

    pub fn segment(&self, i: usize) -> Segment {
        let s = &self.sides[i];
        let (ea, eb) = s.end();
        Segment::new(self.unscale_point(s.start.0, s.start.1), self.unscale_point(ea, eb))
            .expect("sides are unit lattice steps")
    }

    /// Point at relative position `u` of side `i`, in the scaled frame.
    pub(crate) fn scaled_point_on(&self, i: usize, u: &Rational) -> (Rational, Rational) {
        let s = &self.sides[i];
        let (ea, eb) = unit(s.dir);
        (int(s.start.0) + mul_small(u, ea), int(s.start.1) + mul_small(u, eb))
    }

    pub fn point_on_side(&self, i: usize, u: &Rational) -> LatticePoint {
        self.from_scaled(&self.scaled_point_on(i, u))
    }

    pub fn vertex_angle(&self, i: usize) -> Result<AngleClass> {
        let n = self.sides.len();
        let prev = self.sides[(i + n - 1) % n].dir;
        match (self.sides[i].dir + 6 - prev) % 6 {
            2 => Ok(AngleClass::PiOver3),
            5 => Ok(AngleClass::FourPiOver3),
            t => Err(Error::InvariantViolation(format!("turn of {t}·60° at vertex {}", i + 1))),
        }
    }

    /// Vertex `i` is the start of side `i`.
    pub fn vertices(&self) -> Result<Vec<Vertex>> {
        (0..self.sides.len())
            .map(|i| {
                let s = &self.sides[i];
                Ok(Vertex { point: self.unscale_point(s.start.0, s.start.1), angle: self.vertex_angle(i)? })
            })
            .collect()
    }

    pub fn vertex_points(&self) -> Vec<LatticePoint> {
        self.sides.iter().map(|s| self.unscale_point(s.start.0, s.start.1)).collect()
    }

    pub fn ghosts(&self) -> Vec<Ghost> {
        (0..self.sides.len())
            .map(|i| Ghost {
                segment: Segment::new(
                    self.point_on_side(i, &rat(1, 3)),
                    self.point_on_side(i, &rat(2, 3)),
                )
                .expect("ghosts are nondegenerate"),
                parent_side: i,
            })
            .collect()
    }

    /// Cells of `KS_n`, one per side of `KS_{n-1}`.
    pub fn cells(&self) -> Vec<Cell> {
        if self.level == 0 {
            return Vec::new();
        }
        (0..self.sides.len() / 4).map(|k| self.cell(k)).collect()
    }

    /// The cell over the ghost of side `k` (0-based) of `KS_{n-1}`.
    pub fn cell(&self, k: usize) -> Cell {
        let pt = |i: usize| {
            let s = &self.sides[i];
            self.unscale_point(s.start.0, s.start.1)
        };
        let triangle = [pt(4 * k + 1), pt(4 * k + 2), pt(4 * k + 3)];
        let ghost = Ghost {
            segment: Segment::new(triangle[0].clone(), triangle[2].clone()).expect("ghost base"),
            parent_side: k,
        };
        Cell { triangle, ghost, index: k + 1 }
    }

    pub fn census(&self) -> Result<(usize, usize)> {
        let mut acute = 0;
        let mut reflex = 0;
        for i in 0..self.sides.len() {
            match self.vertex_angle(i)? {
                AngleClass::PiOver3 => acute += 1,
                AngleClass::FourPiOver3 => reflex += 1,
            }
        }
        Ok((acute, reflex))
    }

    /// Enclosed area in parallelogram units (unit triangle = 1/2).
    pub fn area(&self) -> Rational {
        let mut twice: i128 = 0;
        for s in &self.sides {
            let (p, q) = (s.start, s.end());
            twice += p.0 as i128 * q.1 as i128 - p.1 as i128 * q.0 as i128;
        }
        let s = BigInt::from(self.scale());
        Rational::new(BigInt::from(twice), BigInt::from(2) * &s * &s)
    }

    /// Exact shoelace area over the rational vertex list.
    pub fn shoelace_area(&self) -> Result<Rational> {
        polygon_lattice_area(&self.vertex_points())
    }

    /// Sum of side lengths.
    pub fn perimeter(&self) -> Rational {
        Rational::new(BigInt::from(self.sides.len()), BigInt::from(self.scale()))
    }

    /// 0-based index of the side with this address.
    pub fn index_of(&self, w: &AddressWord) -> Option<usize> {
        if w.len() != self.level + 1 {
            return None;
        }
        let symbols = w.symbols();
        let mut idx = match symbols[0] {
            5 => 0,
            1 => 1,
            3 => 2,
            _ => return None,
        };
        let mut prefix = AddressWord::root(symbols[0]);
        for &d in &symbols[1..] {
            let slot = child_digits_unchecked(&prefix).as_array().iter().position(|&c| c == d)?;
            idx = idx * 4 + slot;
            prefix = prefix.child(d);
        }
        Some(idx)
    }

    /// Side(s) containing a scaled point, with the relative position.
    pub(crate) fn boundary_location(&self, p: &(Rational, Rational)) -> Option<(usize, Rational)> {
        let (i, _) = floor_div(&(&p.0 + int(self.index.shift)), 1);
        let (j, _) = floor_div(&(&p.1 + int(self.index.shift)), 1);
        let mut best: Option<(usize, Rational)> = None;
        for &(_, s) in self.index.bucket(i, j) {
            let side = &self.sides[s as usize];
            let (ea, eb) = unit(side.dir);
            let wa = &p.0 - int(side.start.0);
            let wb = &p.1 - int(side.start.1);
            if !(mul_small(&wa, eb) - mul_small(&wb, ea)).is_zero() {
                continue;
            }
            let u = if ea != 0 { &wa / int(ea) } else { &wb / int(eb) };
            if u.is_negative() || u > Rational::one() {
                continue;
            }
            // report vertices as the start of the outgoing side
            if u.is_one() {
                return Some(((s as usize + 1) % self.sides.len(), Rational::zero()));
            }
            if best.is_none() || u.is_zero() {
                best = Some((s as usize, u));
            }
        }
        best
    }

    pub fn locate(&self, p: &LatticePoint) -> PointLocation {
        let sp = self.to_scaled(p);
        if let Some((side, position)) = self.boundary_location(&sp) {
            let at_vertex = position.is_zero();
            return PointLocation::Boundary { side, position, at_vertex };
        }
        // crossing number along the +e1 ray
        let mut inside = false;
        for s in &self.sides {
            let (p0, p1) = (s.start, s.end());
            let above0 = int(p0.1) > sp.1;
            let above1 = int(p1.1) > sp.1;
            if above0 != above1 {
                let x = int(p0.0) + (&sp.1 - int(p0.1)) * int(p1.0 - p0.0) / int(p1.1 - p0.1);
                if x > sp.0 {
                    inside = !inside;
                }
            }
        }
        if inside {
            PointLocation::Inside
        } else {
            PointLocation::Outside
        }
    }

    /// Whether direction `d` enters the open interior at boundary point
    /// `(side, u)`, `u ∈ [0, 1)`.
    pub(crate) fn is_inward(&self, side: usize, u: &Rational, d: (i64, i64)) -> bool {
        let cross = |k: u8| {
            let (ea, eb) = unit(k);
            ea * d.1 - eb * d.0
        };
        let here = cross(self.sides[side].dir);
        if !u.is_zero() {
            return here > 0;
        }
        let n = self.sides.len();
        let before = cross(self.sides[(side + n - 1) % n].dir);
        match self.vertex_angle(side) {
            Ok(AngleClass::PiOver3) => here > 0 && before > 0,
            _ => here > 0 || before > 0,
        }
    }

    /// First boundary point hit by the ray `o + t·d`, `t > 0`, in the scaled
    /// frame. `d` must be a nonzero integer vector.
    pub(crate) fn shoot(&self, o: &(Rational, Rational), d: (i64, i64)) -> Result<RawHit> {
        if d == (0, 0) {
            return Err(Error::ZeroDirection);
        }
        let g = &self.index;
        let shifted = (&o.0 + int(g.shift), &o.1 + int(g.shift));
        let size = 3i64.pow(g.top);
        let exit = |c: &Rational, dc: i64| -> Option<Rational> {
            match dc.signum() {
                1 => Some((int(size) - c) / int(dc)),
                -1 => Some(-c / int(dc)),
                _ => None,
            }
        };
        let t_out = match (exit(&shifted.0, d.0), exit(&shifted.1, d.1)) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => unreachable!(),
        };
        let hit = self.visit(&shifted, d, g.top, (0, 0), Rational::zero(), &t_out)?;
        let mut hit = hit.ok_or(Error::RayEscapes)?;
        if hit.u.is_one() {
            hit.side = (hit.side + 1) % self.sides.len();
            hit.u = Rational::zero();
        }
        Ok(hit)
    }

    fn visit(
        &self,
        o: &(Rational, Rational),
        d: (i64, i64),
        level: u32,
        block: (i64, i64),
        t_in: Rational,
        t_out: &Rational,
    ) -> Result<Option<RawHit>> {
        if level == 0 {
            let mut best: Option<RawHit> = None;
            for &(_, s) in self.index.bucket(block.0, block.1) {
                let side = &self.sides[s as usize];
                let start = (side.start.0 + self.index.shift, side.start.1 + self.index.shift);
                if let Some((t, u)) = hit_unit_side(o, d, start, unit(side.dir))? {
                    if &t <= t_out && best.as_ref().is_none_or(|b| t < b.t) {
                        best = Some(RawHit { side: s as usize, u, t });
                    }
                }
            }
            return Ok(best);
        }
        let s = 3i64.pow(level - 1);
        let child = |c: &Rational, dc: i64, lo: i64| {
            let (f, exact) = floor_div(c, s);
            let f = if exact && dc < 0 { f - 1 } else { f };
            f.clamp(lo, lo + 2)
        };
        let (lo_i, lo_j) = (3 * block.0, 3 * block.1);
        let ea = &o.0 + mul_small(&t_in, d.0);
        let eb = &o.1 + mul_small(&t_in, d.1);
        let mut ci = child(&ea, d.0, lo_i);
        let mut cj = child(&eb, d.1, lo_j);
        let next = |c: i64, oc: &Rational, dc: i64| -> Option<Rational> {
            match dc.signum() {
                1 => Some((int((c + 1) * s) - oc) / int(dc)),
                -1 => Some((int(c * s) - oc) / int(dc)),
                _ => None,
            }
        };
        let step_a = (d.0 != 0).then(|| rat(s, d.0.abs()));
        let step_b = (d.1 != 0).then(|| rat(s, d.1.abs()));
        let mut na = next(ci, &o.0, d.0);
        let mut nb = next(cj, &o.1, d.1);
        let mut t_cur = t_in;
        loop {
            let mut t_exit = t_out.clone();
            if let Some(x) = &na {
                if *x < t_exit {
                    t_exit = x.clone();
                }
            }
            if let Some(x) = &nb {
                if *x < t_exit {
                    t_exit = x.clone();
                }
            }
            if self.index.occupied(level - 1, ci, cj) {
                if let Some(h) = self.visit(o, d, level - 1, (ci, cj), t_cur, &t_exit)? {
                    return Ok(Some(h));
                }
            }
            if &t_exit >= t_out {
                return Ok(None);
            }
            if na.as_ref() == Some(&t_exit) {
                ci += d.0.signum();
                na = Some(na.take().unwrap() + step_a.as_ref().unwrap());
            }
            if nb.as_ref() == Some(&t_exit) {
                cj += d.1.signum();
                nb = Some(nb.take().unwrap() + step_b.as_ref().unwrap());
            }
            if ci < lo_i || ci > lo_i + 2 || cj < lo_j || cj > lo_j + 2 {
                return Ok(None);
            }
            t_cur = t_exit;
        }
    }

    /// Brute-force scan over all sides; the oracle for [`Self::shoot`].
    pub(crate) fn shoot_brute(&self, o: &(Rational, Rational), d: (i64, i64)) -> Result<RawHit> {
        let mut best: Option<RawHit> = None;
        for (i, side) in self.sides.iter().enumerate() {
            if let Some((t, u)) = hit_unit_side(o, d, side.start, unit(side.dir))? {
                if best.as_ref().is_none_or(|b| t < b.t) {
                    best = Some(RawHit { side: i, u, t });
                }
            }
        }
        let mut hit = best.ok_or(Error::RayEscapes)?;
        if hit.u.is_one() {
            hit.side = (hit.side + 1) % self.sides.len();
            hit.u = Rational::zero();
        }
        Ok(hit)
    }

    /// First boundary hit of `origin + t·d`, `t > 0`, in unscaled
    /// coordinates. A boundary origin requires an inward direction.
    pub fn first_hit(&self, origin: &LatticePoint, d: &LatticeVector) -> Result<FirstHit> {
        self.first_hit_with(origin, d, Self::shoot)
    }

    /// [`Self::first_hit`] by scanning every side, without the grid.
    pub fn first_hit_exhaustive(&self, origin: &LatticePoint, d: &LatticeVector) -> Result<FirstHit> {
        self.first_hit_with(origin, d, Self::shoot_brute)
    }

    fn first_hit_with(
        &self,
        origin: &LatticePoint,
        d: &LatticeVector,
        shoot: Shooter,
    ) -> Result<FirstHit> {
        let prim = d.primitive()?;
        let pd = (small(&prim.a)?, small(&prim.b)?);
        let so = self.to_scaled(origin);
        if let Some((side, u)) = self.boundary_location(&so) {
            if !self.is_inward(side, &u, pd) {
                return Err(Error::OutwardDirection);
            }
        }
        let raw = shoot(self, &so, pd)?;
        // rescale: t_d·d = t_prim·prim and the frame is 3^n larger
        let lambda = if !prim.a.is_zero() { &d.a / &prim.a } else { &d.b / &prim.b };
        let t = &raw.t / (lambda * self.scale_rational());
        Ok(FirstHit {
            side: raw.side,
            point: self.point_on_side(raw.side, &raw.u),
            at_vertex: raw.at_vertex(),
            at_ghost_endpoint: raw.at_ghost_endpoint(),
            position: raw.u,
            t,
        })
    }
}

pub(crate) fn small(r: &Rational) -> Result<i64> {
    if !r.is_integer() {
        return Err(Error::InvariantViolation(format!("non-integer direction component {r}")));
    }
    i64::try_from(r.to_integer()).map_err(|_| Error::OutOfRange(r.to_string()))
}

/// Address of the 0-based side `k`.
pub fn side_address(p: &Prefractal, k: usize) -> Result<AddressWord> {
    if k >= p.len() {
        return Err(Error::OutOfRange(format!("side {k} of {}", p.len())));
    }
    Ok(p.side(k).address.clone())
}

pub fn vertex_census(p: &Prefractal) -> Result<(usize, usize)> {
    p.census()
}

/// Number of scale-`k` equilateral triangles tiling `Ω(KS_n)`.
pub fn triangle_count(p: &Prefractal, k: usize) -> Result<BigInt> {
    if k < p.level() {
        return Err(Error::OutOfRange(format!("k = {k} < n = {}", p.level())));
    }
    let count = p.area() * int(2) * Rational::from_integer(BigInt::from(9).pow(k as u32));
    if !count.is_integer() {
        return Err(Error::InvariantViolation(format!("non-integral triangle count {count}")));
    }
    Ok(count.to_integer())
}
