//! The billiard map on `Ω(KS_n)`: orbits, compatible sequences, footprints
//! and the checks built on them.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::addressing::{child_digits_unchecked, truncate, AddressWord};
use crate::boundary::{build_prefractal, small, unit, Prefractal, RawHit};
use crate::error::{Error, Result};
use crate::lattice::{
    format_rational, int, rat, rational_string, LatticePoint, LatticeVector, OrientationClass, Rational,
};
use crate::ternary::{classify, OrbitClass};

/// Default step budget per orbit.
pub const DEFAULT_BUDGET: usize = 100_000;

/// Boundary point with an inward direction. `side` is 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BilliardState {
    pub side: usize,
    #[serde(with = "rational_string")]
    pub position: Rational,
    pub direction: LatticeVector,
}

impl BilliardState {
    pub fn new(side: usize, position: Rational, direction: LatticeVector) -> Self {
        Self { side, position, direction }
    }

    fn dir_ints(&self) -> Result<(i64, i64)> {
        Ok((small(&self.direction.a)?, small(&self.direction.b)?))
    }

    pub fn point(&self, p: &Prefractal) -> LatticePoint {
        p.point_on_side(self.side, &self.position)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SingularKind {
    Vertex,
    /// Relative position 1/3 or 2/3 of a side, a vertex of the next level.
    GhostEndpoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularHit {
    pub side: usize,
    pub position: Rational,
    pub point: LatticePoint,
    pub kind: SingularKind,
    /// Unscaled parameter of the hit along the incoming direction.
    pub t: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Next { state: BilliardState, t: Rational },
    Singular(SingularHit),
}

fn validate(p: &Prefractal, s: &BilliardState) -> Result<(i64, i64)> {
    if s.side >= p.len() {
        return Err(Error::MalformedState(format!("side {} out of range", s.side)));
    }
    if s.position <= Rational::zero() || s.position >= Rational::one() {
        return Err(Error::MalformedState(format!("position {} not in (0,1)", format_rational(&s.position))));
    }
    let d = s.dir_ints().map_err(|_| Error::MalformedState(format!("direction {} not integral", s.direction)))?;
    if d == (0, 0) {
        return Err(Error::MalformedState("zero direction".into()));
    }
    if s.direction.primitive()? != s.direction {
        return Err(Error::MalformedState(format!("direction {} not primitive", s.direction)));
    }
    if !p.is_inward(s.side, &s.position, d) {
        return Err(Error::MalformedState(format!("direction {} not inward", s.direction)));
    }
    Ok(d)
}

fn classify_hit(hit: &RawHit) -> Option<SingularKind> {
    if hit.at_vertex() {
        Some(SingularKind::Vertex)
    } else if hit.at_ghost_endpoint() {
        Some(SingularKind::GhostEndpoint)
    } else {
        None
    }
}

pub fn billiard_step(p: &Prefractal, s: &BilliardState) -> Result<StepOutcome> {
    let d = validate(p, s)?;
    step_unchecked(p, s.side, &s.position, d)
}

fn step_unchecked(p: &Prefractal, side: usize, u: &Rational, d: (i64, i64)) -> Result<StepOutcome> {
    let origin = p.scaled_point_on(side, u);
    let hit = p.shoot(&origin, d)?;
    let t = &hit.t / p.scale_rational();
    if let Some(kind) = classify_hit(&hit) {
        return Ok(StepOutcome::Singular(SingularHit {
            side: hit.side,
            point: p.point_on_side(hit.side, &hit.u),
            position: hit.u,
            kind,
            t,
        }));
    }
    let o = p.side(hit.side).orientation();
    let (ra, rb) = o.reflect_ints(d);
    Ok(StepOutcome::Next {
        state: BilliardState::new(hit.side, hit.u, LatticeVector::from_ints(ra, rb)),
        t,
    })
}

/// The state that retraces the orbit backward from `s`.
pub fn reverse_state(p: &Prefractal, s: &BilliardState) -> BilliardState {
    let o = p.side(s.side).orientation();
    BilliardState::new(s.side, s.position.clone(), -&o.reflect(&s.direction))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitStatus {
    Periodic { period: usize },
    Singular {
        point: LatticePoint,
        singularity: SingularKind,
        /// Number of steps taken before the singular point (0 when the
        /// initial basepoint is itself singular).
        step: usize,
        saddle_connection: bool,
    },
    BudgetExceeded { steps: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionFamily {
    /// Unit directions `k·60°`.
    #[serde(rename = "pi_over_3")]
    PiOver3,
    Lattice,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FootprintEntry {
    pub address: AddressWord,
    #[serde(with = "rational_string")]
    pub position: Rational,
    /// Direction index for the unit family.
    pub dir: Option<u8>,
    pub direction: LatticeVector,
}

pub type Footprint = Vec<FootprintEntry>;

/// A saddle connection traced in both time directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaddleConnection {
    /// Breakpoints from the backward singular point to the forward one.
    pub points: Vec<LatticePoint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub level: usize,
    pub states: Vec<BilliardState>,
    pub status: OrbitStatus,
    /// Sum of segment lengths for unit directions: the full period for
    /// periodic orbits, the path to the singular point otherwise.
    pub length: Option<Rational>,
    pub family: DirectionFamily,
    pub footprint: Footprint,
    /// Unscaled travel parameter of each step, starting at `states[0]`.
    pub steps: Vec<Rational>,
    /// Hit sides of each step (the last one closes the loop or is singular).
    pub hit_sides: Vec<usize>,
    pub saddle: Option<SaddleConnection>,
}

impl Orbit {
    pub fn period(&self) -> Option<usize> {
        match self.status {
            OrbitStatus::Periodic { period } => Some(period),
            _ => None,
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.period().is_some()
    }

    pub fn is_singular(&self) -> bool {
        matches!(self.status, OrbitStatus::Singular { .. })
    }

    /// Footprint as an unordered point set of `(address, position)`.
    pub fn footprint_set(&self) -> BTreeSet<(AddressWord, Rational)> {
        self.footprint.iter().map(|e| (e.address.clone(), e.position.clone())).collect()
    }
}

fn footprint_of(p: &Prefractal, states: &[BilliardState]) -> Footprint {
    states
        .iter()
        .map(|s| FootprintEntry {
            address: p.side(s.side).address.clone(),
            position: s.position.clone(),
            dir: s.direction.direction_index(),
            direction: s.direction.clone(),
        })
        .collect()
}

/// Iterates the map from `init` until singular or budget, without
/// periodicity checks. Returns the singular hit if one was met.
fn run_until_singular(
    p: &Prefractal,
    init: &BilliardState,
    budget: usize,
) -> Result<(Vec<BilliardState>, Option<SingularHit>)> {
    let mut states = vec![init.clone()];
    let mut cur = init.clone();
    for _ in 0..budget {
        match step_unchecked(p, cur.side, &cur.position, cur.dir_ints()?)? {
            StepOutcome::Next { state, .. } => {
                states.push(state.clone());
                cur = state;
            }
            StepOutcome::Singular(h) => return Ok((states, Some(h))),
        }
    }
    Ok((states, None))
}

pub fn compute_orbit(p: &Prefractal, init: &BilliardState, budget: usize) -> Result<Orbit> {
    let d = validate(p, init)?;
    let family = if init.direction.squared_length().is_one() {
        DirectionFamily::PiOver3
    } else {
        DirectionFamily::Lattice
    };
    let init_singular = init.position == rat(1, 3) || init.position == rat(2, 3);
    let mut states = vec![init.clone()];
    let mut steps = Vec::new();
    let mut hit_sides = Vec::new();
    let mut cur_dir = d;
    let mut cur = init.clone();
    let mut forward_hit: Option<SingularHit> = None;
    let mut period = None;
    for step in 1..=budget {
        match step_unchecked(p, cur.side, &cur.position, cur_dir)? {
            StepOutcome::Next { state, t } => {
                steps.push(t);
                hit_sides.push(state.side);
                if state == *init && !init_singular {
                    period = Some(step);
                    break;
                }
                cur_dir = state.dir_ints()?;
                states.push(state.clone());
                cur = state;
            }
            StepOutcome::Singular(h) => {
                steps.push(h.t.clone());
                hit_sides.push(h.side);
                forward_hit = Some(h);
                break;
            }
        }
    }
    let length = match family {
        DirectionFamily::PiOver3 => Some(steps.iter().fold(Rational::zero(), |acc, t| acc + t)),
        DirectionFamily::Lattice => None,
    };
    let footprint = footprint_of(p, &states);
    let (status, saddle) = if let Some(period) = period {
        (OrbitStatus::Periodic { period }, None)
    } else if init_singular || forward_hit.is_some() {
        let (back_states, back_hit) = if init_singular {
            (vec![init.clone()], None)
        } else {
            run_until_singular(p, &reverse_state(p, init), budget)?
        };
        let backward_closed = init_singular || back_hit.is_some();
        let saddle_connection = backward_closed && forward_hit.is_some();
        let saddle = saddle_connection.then(|| {
            let mut points = Vec::new();
            if let Some(h) = &back_hit {
                points.push(h.point.clone());
            }
            points.extend(back_states.iter().rev().skip(1).map(|s| s.point(p)));
            points.extend(states.iter().map(|s| s.point(p)));
            points.push(forward_hit.as_ref().expect("forward hit").point.clone());
            SaddleConnection { points }
        });
        let (point, singularity, step) = if init_singular {
            (init.point(p), SingularKind::GhostEndpoint, 0)
        } else {
            let h = forward_hit.as_ref().expect("forward hit");
            (h.point.clone(), h.kind, steps.len())
        };
        (OrbitStatus::Singular { point, singularity, step, saddle_connection }, saddle)
    } else {
        (OrbitStatus::BudgetExceeded { steps: budget }, None)
    };
    Ok(Orbit { level: p.level(), states, status, length, family, footprint, steps, hit_sides, saddle })
}

/// Starting state on `KS_n` for basepoint `(x0, 0)` and direction `d`: the
/// point itself if it lies on a surviving side, otherwise the first
/// boundary point reached from it along `-d`.
pub fn basepoint_for(p: &Prefractal, x0: &Rational, d: (i64, i64)) -> Result<BilliardState> {
    let origin = (x0 * p.scale_rational(), Rational::zero());
    let dir = LatticeVector::from_ints(d.0, d.1);
    let (side, u) = match p.boundary_location(&origin) {
        Some((side, u)) => (side, u),
        None => {
            let hit = p.shoot(&origin, (-d.0, -d.1))?;
            (hit.side, hit.u)
        }
    };
    if u.is_zero() || u == rat(1, 3) || u == rat(2, 3) {
        return Err(Error::CornerCompatible);
    }
    if !p.is_inward(side, &u, d) {
        return Err(Error::InvariantViolation(format!(
            "direction {dir} is not inward at side {} position {}",
            p.side(side).address,
            format_rational(&u)
        )));
    }
    Ok(BilliardState::new(side, u, dir))
}

fn check_basepoint(x0: &Rational) -> Result<()> {
    if classify(x0)? == OrbitClass::SingularTernary {
        return Err(Error::TernaryBasepoint);
    }
    Ok(())
}

/// The basepoint of `KS_n` compatible with `x0` in direction π/3.
pub fn compatible_basepoint(x0: &Rational, p: &Prefractal) -> Result<BilliardState> {
    check_basepoint(x0)?;
    basepoint_for(p, x0, (0, 1))
}

#[derive(Clone, Debug)]
pub struct CompatibleSequence {
    pub x0: Rational,
    pub orbits: Vec<Orbit>,
    pub initial_basepoints: Vec<BilliardState>,
    /// Why the sequence stops early, if it does.
    pub truncated: Option<String>,
}

impl CompatibleSequence {
    pub fn periods(&self) -> Vec<Option<usize>> {
        self.orbits.iter().map(Orbit::period).collect()
    }
}

/// Builds `KS_0..=KS_{n_max}`.
pub fn build_tables(n_max: usize) -> Result<Vec<Prefractal>> {
    (0..=n_max).map(build_prefractal).collect()
}

pub fn compatible_sequence(x0: &Rational, n_max: usize, budget: usize) -> Result<CompatibleSequence> {
    compatible_sequence_on(x0, &build_tables(n_max)?, budget)
}

/// Compatible sequence over prebuilt tables `KS_0, KS_1, ...`.
pub fn compatible_sequence_on(x0: &Rational, tables: &[Prefractal], budget: usize) -> Result<CompatibleSequence> {
    check_basepoint(x0)?;
    let mut seq = CompatibleSequence { x0: x0.clone(), orbits: Vec::new(), initial_basepoints: Vec::new(), truncated: None };
    for p in tables {
        let init = match compatible_basepoint(x0, p) {
            Ok(s) => s,
            Err(e) => {
                seq.truncated = Some(format!("level {}: {e}", p.level()));
                break;
            }
        };
        let orbit = compute_orbit(p, &init, budget)?;
        let stop = match &orbit.status {
            OrbitStatus::Periodic { .. } => None,
            other => Some(format!("level {}: {:?}", p.level(), other)),
        };
        seq.initial_basepoints.push(init);
        seq.orbits.push(orbit);
        if stop.is_some() {
            seq.truncated = stop;
            break;
        }
    }
    Ok(seq)
}

/// Re-expresses a point of a `KS_m` side on the `KS_n` side containing it,
/// `n ≥ m`. `None` when the point sits over a removed middle third.
pub fn reembed(address: &AddressWord, position: &Rational, levels: usize) -> Option<(AddressWord, Rational)> {
    let third = rat(1, 3);
    let two_thirds = rat(2, 3);
    let mut w = address.clone();
    let mut u = position.clone();
    for _ in 0..levels {
        let digits = child_digits_unchecked(&w);
        if u < third {
            w = w.child(digits.start_third);
            u *= int(3);
        } else if u > two_thirds {
            w = w.child(digits.end_third);
            u = u * int(3) - int(2);
        } else {
            return None;
        }
    }
    Some((w, u))
}

/// Footprint equality as point sets, after lifting the lower level into the
/// higher one.
pub fn footprints_equal(a: &Orbit, b: &Orbit) -> bool {
    let (lo, hi) = if a.level <= b.level { (a, b) } else { (b, a) };
    if lo.footprint.len() != hi.footprint.len() {
        return false;
    }
    let lifted: Option<BTreeSet<_>> = lo
        .footprint
        .iter()
        .map(|e| reembed(&e.address, &e.position, hi.level - lo.level))
        .collect();
    lifted.is_some_and(|set| set == hi.footprint_set())
}

/// Least `N` with `O_n` equal to `O_N` for every computed `n ≥ N`.
pub fn stabilization_index(seq: &CompatibleSequence) -> Option<usize> {
    let orbits = &seq.orbits;
    if orbits.is_empty() || seq.truncated.is_some() {
        return None;
    }
    let last = orbits.len() - 1;
    let mut n = last;
    while n > 0 && footprints_equal(&orbits[n - 1], &orbits[last]) {
        n -= 1;
    }
    // the tail must be constant, not just match at its ends
    if (n..last).all(|k| footprints_equal(&orbits[k], &orbits[k + 1])) && n < last {
        Some(n)
    } else {
        None
    }
}

/// Every basepoint is the midpoint of its side.
pub fn is_pf_orbit(o: &Orbit) -> bool {
    o.is_periodic() && o.states.iter().all(|s| s.position == rat(1, 2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCollapseReport {
    pub doubling: bool,
    pub pairs_in_cells: bool,
    pub ghost_midpoints: bool,
    pub length_recursion: bool,
    /// Pairing offset (0 or 1) that satisfied the cell clause.
    pub offset: Option<usize>,
    pub mismatches: Vec<String>,
}

impl PairCollapseReport {
    pub fn passed(&self) -> bool {
        self.doubling && self.pairs_in_cells && self.ghost_midpoints && self.length_recursion
    }
}

/// Checks `O_n` against `O_{n-1}` for the pair-collapse structure of
/// piecewise Fagnano orbits.
pub fn pair_collapse_check(o_n: &Orbit, o_prev: &Orbit) -> PairCollapseReport {
    let mut mismatches = Vec::new();
    let (len_n, len_prev) = (o_n.footprint.len(), o_prev.footprint.len());
    let doubling = o_n.is_periodic() && o_prev.is_periodic() && len_n == 2 * len_prev;
    if !doubling {
        mismatches.push(format!("#O_n = {len_n}, #O_(n-1) = {len_prev}"));
    }
    let prev_points = o_prev.footprint_set();
    let half = rat(1, 2);
    let mut offset = None;
    let mut ghost_midpoints = false;
    if len_n % 2 == 0 && len_n > 0 {
        for off in 0..2 {
            let mut parents = Vec::new();
            let ok = (0..len_n / 2).all(|i| {
                let a = &o_n.footprint[(off + 2 * i) % len_n].address;
                let b = &o_n.footprint[(off + 2 * i + 1) % len_n].address;
                let same_cell = a.len() == b.len()
                    && a.is_bump()
                    && b.is_bump()
                    && a.last() != b.last()
                    && truncate(a, a.len() - 1) == truncate(b, b.len() - 1);
                if same_cell {
                    parents.push(truncate(a, a.len() - 1));
                }
                same_cell
            });
            if ok {
                offset = Some(off);
                let missing: Vec<_> =
                    parents.iter().filter(|w| !prev_points.contains(&((*w).clone(), half.clone()))).collect();
                ghost_midpoints = missing.is_empty();
                if !ghost_midpoints {
                    mismatches.push(format!("ghost midpoints not on O_(n-1): {missing:?}"));
                }
                break;
            }
        }
    }
    if offset.is_none() {
        mismatches.push("basepoints do not pair up on cells".into());
    }
    let expected = o_prev
        .length
        .as_ref()
        .map(|l| l + int(len_prev as i64) * rat(3, 2) / int(3i64.pow(o_n.level as u32)));
    let length_recursion = expected.is_some() && o_n.length == expected;
    if !length_recursion {
        mismatches.push(format!(
            "|O_n| = {:?}, expected {:?}",
            o_n.length.as_ref().map(format_rational),
            expected.as_ref().map(format_rational)
        ));
    }
    PairCollapseReport { doubling, pairs_in_cells: offset.is_some(), ghost_midpoints, length_recursion, offset, mismatches }
}

/// `x ↦ M·x + c` with an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Affine {
    m: [[i64; 2]; 2],
    c: (Rational, Rational),
}

impl Affine {
    fn identity() -> Self {
        Self { m: [[1, 0], [0, 1]], c: (Rational::zero(), Rational::zero()) }
    }

    fn reflection(o: OrientationClass, anchor: &LatticePoint) -> Self {
        let m = match o {
            OrientationClass::Horizontal => [[1, 1], [0, -1]],
            OrientationClass::UpRight => [[-1, 0], [1, 1]],
            OrientationClass::UpLeft => [[0, -1], [-1, 0]],
        };
        let ma = Self { m, c: (Rational::zero(), Rational::zero()) }.apply(anchor);
        Self { m, c: (&anchor.a - &ma.a, &anchor.b - &ma.b) }
    }

    fn apply(&self, p: &LatticePoint) -> LatticePoint {
        let [[m00, m01], [m10, m11]] = self.m;
        LatticePoint::new(
            &p.a * int(m00) + &p.b * int(m01) + &self.c.0,
            &p.a * int(m10) + &p.b * int(m11) + &self.c.1,
        )
    }

    /// `self ∘ other`
    fn compose(&self, other: &Affine) -> Affine {
        let a = self.m;
        let b = other.m;
        let m = [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ];
        let c = self.apply(&LatticePoint::new(other.c.0.clone(), other.c.1.clone()));
        Affine { m, c: (c.a, c.b) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldedPath {
    pub points: Vec<LatticePoint>,
    pub direction: LatticeVector,
    /// Total length, for unit directions.
    pub span: Option<Rational>,
}

/// Straightens the orbit by reflecting everything after each collision
/// across the side that was hit.
pub fn unfold(p: &Prefractal, o: &Orbit) -> Result<UnfoldedPath> {
    let direction = o.states[0].direction.clone();
    let mut points = vec![o.states[0].point(p)];
    let mut map = Affine::identity();
    let n = o.hit_sides.len();
    for (k, &side) in o.hit_sides.iter().enumerate() {
        let hit_point = if k + 1 < o.states.len() {
            o.states[k + 1].point(p)
        } else {
            match &o.status {
                OrbitStatus::Periodic { .. } => o.states[0].point(p),
                OrbitStatus::Singular { point, step, .. } if *step > 0 => point.clone(),
                _ => break,
            }
        };
        points.push(map.apply(&hit_point));
        if k + 1 < n {
            let seg = p.segment(side);
            map = map.compose(&Affine::reflection(seg.orientation(), &seg.start));
        }
    }
    for q in &points[1..] {
        if !(q - &points[0]).cross(&direction).is_zero() {
            return Err(Error::InvariantViolation(format!("unfolded point {q} is off the line")));
        }
    }
    let span = match o.family {
        DirectionFamily::PiOver3 => o.length.clone(),
        DirectionFamily::Lattice => None,
    };
    Ok(UnfoldedPath { points, direction, span })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeSample {
    pub interior_point: LatticePoint,
    pub base: BilliardState,
    pub base_status: OrbitStatus,
    pub state: BilliardState,
    pub status: OrbitStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub direction: LatticeVector,
    pub level: usize,
    pub samples: Vec<ProbeSample>,
    pub budget_exceeded: usize,
    pub singular: usize,
    pub periodic: usize,
}

/// Boundary state reached from an interior point by going back along `d`.
pub fn state_behind(p: &Prefractal, interior: &LatticePoint, d: (i64, i64)) -> Result<BilliardState> {
    let hit = p.shoot(&p.to_scaled(interior), (-d.0, -d.1))?;
    let dir = LatticeVector::from_ints(d.0, d.1);
    let state = BilliardState::new(hit.side, hit.u, dir);
    validate(p, &state)?;
    Ok(state)
}

/// A random point strictly inside `KS_0` whose line in direction `d` avoids
/// every point of the `3^{n+1}`-scaled lattice, so that no orbit through it
/// on `KS_0..=KS_n` meets a vertex or ghost endpoint.
pub fn random_regular_point(rng: &mut impl Rng, d: (i64, i64), n: usize) -> LatticePoint {
    let scale = int(3i64.pow(n as u32 + 1));
    loop {
        let den: i64 = rng.gen_range(50..2000);
        if den % 3 == 0 {
            continue;
        }
        let a = rng.gen_range(1..den);
        let b = rng.gen_range(1..den);
        if a + b >= den {
            continue;
        }
        let cross = rat(a * d.1 - b * d.0, den) * &scale;
        if !cross.is_integer() {
            return LatticePoint::new(rat(a, den), rat(b, den));
        }
    }
}

/// Closure of orbits in direction `d` on `KS_0` and `KS_n` through random
/// regular interior points.
pub fn periodic_direction_probe(
    d: &LatticeVector,
    n: usize,
    samples: usize,
    budget: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let prim = d.primitive()?;
    let di = (small(&prim.a)?, small(&prim.b)?);
    let base = build_prefractal(0)?;
    let table = build_prefractal(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<LatticePoint> = (0..samples).map(|_| random_regular_point(&mut rng, di, n)).collect();
    let results: Result<Vec<ProbeSample>> = points
        .into_par_iter()
        .map(|q| {
            let b = state_behind(&base, &q, di)?;
            let s = state_behind(&table, &q, di)?;
            let base_status = compute_orbit(&base, &b, budget)?.status;
            let status = compute_orbit(&table, &s, budget)?.status;
            Ok(ProbeSample { interior_point: q, base: b, base_status, state: s, status })
        })
        .collect();
    let samples = results?;
    let count = |f: &dyn Fn(&OrbitStatus) -> bool| {
        samples.iter().map(|s| f(&s.base_status) as usize + f(&s.status) as usize).sum()
    };
    Ok(ProbeReport {
        direction: prim,
        level: n,
        budget_exceeded: count(&|s| matches!(s, OrbitStatus::BudgetExceeded { .. })),
        singular: count(&|s| matches!(s, OrbitStatus::Singular { .. })),
        periodic: count(&|s| matches!(s, OrbitStatus::Periodic { .. })),
        samples,
    })
}

/// Direction index of `d` if it is one of the six unit directions.
pub fn unit_index(d: (i64, i64)) -> Option<u8> {
    (0..6u8).find(|&k| unit(k) == d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::build_prefractal;

    fn state(side: usize, u: Rational, k: u8) -> BilliardState {
        BilliardState::new(side, u, LatticeVector::unit(k))
    }

    #[test]
    fn step_examples() {
        let p = build_prefractal(0).unwrap();
        match billiard_step(&p, &state(0, rat(1, 2), 1)).unwrap() {
            StepOutcome::Next { state: s, t } => {
                assert_eq!(s, state(1, rat(1, 2), 3));
                assert_eq!(t, rat(1, 2));
            }
            other => panic!("{other:?}"),
        }
        match billiard_step(&p, &state(0, rat(1, 4), 1)).unwrap() {
            StepOutcome::Next { state: s, .. } => assert_eq!(s, state(1, rat(3, 4), 3)),
            other => panic!("{other:?}"),
        }
        // apex hit from the left end of the base
        let corner = BilliardState::new(2, rat(1, 2), LatticeVector::unit(0));
        match billiard_step(&p, &corner).unwrap() {
            StepOutcome::Next { .. } => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            billiard_step(&p, &state(0, rat(1, 2), 4)),
            Err(Error::MalformedState(_))
        ));
        assert!(matches!(billiard_step(&p, &state(0, rat(0, 1), 1)), Err(Error::MalformedState(_))));
    }

    #[test]
    fn fagnano_and_hexagon() {
        let p = build_prefractal(0).unwrap();
        let o = compute_orbit(&p, &state(0, rat(1, 2), 1), 100).unwrap();
        assert_eq!(o.period(), Some(3));
        assert_eq!(o.length, Some(rat(3, 2)));
        let o = compute_orbit(&p, &state(0, rat(1, 4), 1), 100).unwrap();
        assert_eq!(o.period(), Some(6));
        assert_eq!(o.length, Some(rat(3, 1)));
        let o = compute_orbit(&p, &state(0, rat(1, 3), 1), 100).unwrap();
        assert!(o.is_singular());
    }

    #[test]
    fn singular_orbit_reports_saddle_connection() {
        let p = build_prefractal(0).unwrap();
        // from the base midpoint straight at the apex, in both time directions
        let init = BilliardState::new(0, rat(1, 2), LatticeVector::from_ints(-1, 2));
        let o = compute_orbit(&p, &init, 100).unwrap();
        match o.status {
            OrbitStatus::Singular { saddle_connection, .. } => {
                assert!(saddle_connection);
                assert!(o.saddle.is_some());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reversal_is_an_involution() {
        let p = build_prefractal(1).unwrap();
        let s = compatible_basepoint(&rat(7, 12), &p).unwrap();
        assert_eq!(reverse_state(&p, &reverse_state(&p, &s)), s);
        let StepOutcome::Next { state: next, .. } = billiard_step(&p, &s).unwrap() else { panic!() };
        let StepOutcome::Next { state: back, .. } = billiard_step(&p, &reverse_state(&p, &next)).unwrap() else {
            panic!()
        };
        assert_eq!(back, reverse_state(&p, &s));
    }

    #[test]
    fn compatible_basepoints() {
        let p1 = build_prefractal(1).unwrap();
        let s = compatible_basepoint(&rat(1, 2), &p1).unwrap();
        assert_eq!(p1.side(s.side).address.to_string(), "51");
        assert_eq!(s.position, rat(1, 2));
        let s = compatible_basepoint(&rat(7, 12), &p1).unwrap();
        assert_eq!(s.position, rat(3, 4));
        for n in 0..4 {
            let p = build_prefractal(n).unwrap();
            let s = compatible_basepoint(&rat(1, 4), &p).unwrap();
            assert_eq!(s.point(&p), LatticePoint::from_rats((1, 4), (0, 1)));
        }
        assert_eq!(compatible_basepoint(&rat(1, 3), &p1), Err(Error::TernaryBasepoint));
    }

    #[test]
    fn sequences() {
        let seq = compatible_sequence(&rat(1, 2), 2, 1000).unwrap();
        assert_eq!(seq.periods(), vec![Some(3), Some(6), Some(12)]);
        assert_eq!(stabilization_index(&seq), None);
        let seq = compatible_sequence(&rat(7, 12), 3, 1000).unwrap();
        assert_eq!(seq.periods()[1..], [Some(6), Some(6), Some(6)]);
        assert_eq!(stabilization_index(&seq), Some(1));
        let seq = compatible_sequence(&rat(1, 4), 3, 1000).unwrap();
        assert_eq!(stabilization_index(&seq), Some(0));
    }

    #[test]
    fn pf_orbits_and_pairs() {
        let seq = compatible_sequence(&rat(1, 2), 2, 1000).unwrap();
        assert!(is_pf_orbit(&seq.orbits[0]));
        assert!(is_pf_orbit(&seq.orbits[1]));
        let r = pair_collapse_check(&seq.orbits[1], &seq.orbits[0]);
        assert!(r.passed(), "{r:?}");
        assert_eq!(seq.orbits[1].length, Some(rat(3, 1)));
        let r = pair_collapse_check(&seq.orbits[2], &seq.orbits[1]);
        assert!(r.passed(), "{r:?}");
        assert_eq!(seq.orbits[2].length, Some(rat(4, 1)));

        let quarter = compatible_sequence(&rat(1, 4), 1, 1000).unwrap();
        assert!(!is_pf_orbit(&quarter.orbits[1]));
        let r = pair_collapse_check(&quarter.orbits[1], &quarter.orbits[0]);
        assert!(!r.doubling && !r.passed());
    }

    #[test]
    fn unfolding() {
        let p = build_prefractal(0).unwrap();
        let o = compute_orbit(&p, &state(0, rat(1, 2), 1), 100).unwrap();
        let u = unfold(&p, &o).unwrap();
        assert_eq!(u.points.len(), 4);
        assert_eq!(u.span, Some(rat(3, 2)));
        assert_eq!(&u.points[3] - &u.points[0], LatticeVector::new(rat(0, 1), rat(3, 2)));
        let o = compute_orbit(&p, &state(0, rat(1, 4), 1), 100).unwrap();
        assert_eq!(unfold(&p, &o).unwrap().span, Some(rat(3, 1)));
    }

    #[test]
    fn probe_closes() {
        let r = periodic_direction_probe(&LatticeVector::from_ints(0, 1), 2, 3, 10_000, 1).unwrap();
        assert_eq!(r.periodic, 6);
        let r = periodic_direction_probe(&LatticeVector::from_ints(1, 0), 0, 3, 10_000, 2).unwrap();
        assert_eq!(r.periodic, 6);
        let r = periodic_direction_probe(&LatticeVector::from_ints(1, 2), 1, 3, 100_000, 3).unwrap();
        assert_eq!(r.budget_exceeded, 0);
    }
}
