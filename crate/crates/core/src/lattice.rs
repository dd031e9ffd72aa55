//! Core integer-lattice types and exact arithmetic on signed pixel grids.
//!
//! A ghost is a finite map from lattice points to nonzero integers whose
//! line sums vanish along a chosen set of co-prime directions. Everything
//! here is exact integer arithmetic on immutable value types.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("direction components must be co-prime and nonzero, got ({0}, {1})")]
    InvalidDirection(i64, i64),
    #[error("empty direction list yields a degenerate ghost box")]
    EmptyDirectionList,
}

/// A plain lattice vector. Used for shifts and offsets; carries no
/// co-primality requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec2 {
    pub x: i64,
    pub y: i64,
}

impl Vec2 {
    pub const fn new(x: i64, y: i64) -> Self {
        Vec2 { x, y }
    }

    pub fn scaled(self, k: i64) -> Self {
        Vec2::new(self.x * k, self.y * k)
    }

    /// 2x2 determinant of the matrix with columns `self`, `other`.
    pub fn det(self, other: Vec2) -> i64 {
        self.x * other.y - self.y * other.x
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// A lattice point. Ordered by (y, x) so that grid iteration matches the
/// ghost text format's canonical cell order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Add<Vec2> for Point {
    type Output = Point;
    fn add(self, rhs: Vec2) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub<Vec2> for Point {
    type Output = Point;
    fn sub(self, rhs: Vec2) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Vec2;
    fn sub(self, rhs: Point) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// A discrete projection direction (p, q) with co-prime components.
///
/// Directions are accepted with either sign at construction; `canonical`
/// folds (p, q) and (-p, -q) together for set membership tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    p: i64,
    q: i64,
}

impl Direction {
    pub fn new(p: i64, q: i64) -> Result<Self, LatticeError> {
        if (p, q) == (0, 0) || gcd(p.unsigned_abs(), q.unsigned_abs()) != 1 {
            return Err(LatticeError::InvalidDirection(p, q));
        }
        Ok(Direction { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn vec(&self) -> Vec2 {
        Vec2::new(self.p, self.q)
    }

    /// Canonical representative of {d, -d}: p > 0, or p = 0 and q > 0.
    pub fn canonical(&self) -> Direction {
        if self.p < 0 || (self.p == 0 && self.q < 0) {
            Direction {
                p: -self.p,
                q: -self.q,
            }
        } else {
            *self
        }
    }

    /// The direction rotated a quarter turn: (p, q) -> (-q, p).
    pub fn rotated90(&self) -> Direction {
        Direction {
            p: -self.q,
            q: self.p,
        }
    }

    /// Offset of the line through (x, y): t = q*x - p*y. Two points lie on
    /// the same line in this direction iff their invariants agree.
    pub fn line_offset(&self, pt: Point) -> i64 {
        self.q * pt.x - self.p * pt.y
    }

    /// Integer position of `pt` along its line: steps of (p, q) change the
    /// value by exactly 1. Computed from a Bezout pair for (p, q).
    pub fn along_line(&self, pt: Point) -> i64 {
        let (a, b) = bezout(self.p, self.q);
        a * pt.x + b * pt.y
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Coefficients (a, b) with a*p + b*q = gcd(p, q).
fn bezout(p: i64, q: i64) -> (i64, i64) {
    let (mut r0, mut r1) = (p, q);
    let (mut a0, mut a1) = (1i64, 0i64);
    let (mut b0, mut b1) = (0i64, 1i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (a0, a1) = (a1, a0 - k * a1);
        (b0, b1) = (b1, b0 - k * b1);
    }
    if r0 < 0 {
        (-a0, -b0)
    } else {
        (a0, b0)
    }
}

/// Inclusive bounding rectangle of a nonempty grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub min_x: i64,
    pub min_y: i64,
    pub max_x: i64,
    pub max_y: i64,
}

impl Rect {
    pub fn width(&self) -> i64 {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> i64 {
        self.max_y - self.min_y + 1
    }
}

/// Ghost image box size for a direction set: one more than the
/// summed absolute components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxSize {
    pub a: i64,
    pub b: i64,
}

pub fn box_size(dirs: &[Direction]) -> Result<BoxSize, LatticeError> {
    if dirs.is_empty() {
        return Err(LatticeError::EmptyDirectionList);
    }
    Ok(BoxSize {
        a: 1 + dirs.iter().map(|d| d.p.abs()).sum::<i64>(),
        b: 1 + dirs.iter().map(|d| d.q.abs()).sum::<i64>(),
    })
}

/// A finite map from lattice points to nonzero integers, with a cached
/// tight bounding box. Zeros are represented by absence; operations that
/// produce zero cells drop them.
///
/// Values are not restricted to +-1: arbitrary start tiles and partial
/// sums are representable. Binary-ness of ghost outputs is asserted where
/// required, not baked into the type.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SignedGrid {
    cells: BTreeMap<Point, i64>,
    bbox: Option<Rect>,
}

impl SignedGrid {
    pub fn new() -> Self {
        SignedGrid::default()
    }

    /// Builds a grid from (point, value) pairs. Duplicate points are summed
    /// pointwise; cells that sum to zero are dropped.
    pub fn from_cells<I>(cells: I) -> Self
    where
        I: IntoIterator<Item = (Point, i64)>,
    {
        let mut map = BTreeMap::new();
        for (pt, v) in cells {
            if v == 0 {
                continue;
            }
            let e = map.entry(pt).or_insert(0);
            *e += v;
            if *e == 0 {
                map.remove(&pt);
            }
        }
        Self::from_map(map)
    }

    fn from_map(cells: BTreeMap<Point, i64>) -> Self {
        let bbox = Self::compute_bbox(&cells);
        SignedGrid { cells, bbox }
    }

    fn compute_bbox(cells: &BTreeMap<Point, i64>) -> Option<Rect> {
        let mut it = cells.keys();
        let first = it.next()?;
        let mut r = Rect {
            min_x: first.x,
            min_y: first.y,
            max_x: first.x,
            max_y: first.y,
        };
        for pt in it {
            r.min_x = r.min_x.min(pt.x);
            r.max_x = r.max_x.max(pt.x);
            r.min_y = r.min_y.min(pt.y);
            r.max_y = r.max_y.max(pt.y);
        }
        Some(r)
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn bbox(&self) -> Option<Rect> {
        self.bbox
    }

    pub fn get(&self, pt: Point) -> i64 {
        self.cells.get(&pt).copied().unwrap_or(0)
    }

    /// Iterates cells in (y, x) order.
    pub fn iter(&self) -> impl Iterator<Item = (Point, i64)> + '_ {
        self.cells.iter().map(|(p, v)| (*p, *v))
    }

    pub fn support(&self) -> impl Iterator<Item = Point> + '_ {
        self.cells.keys().copied()
    }

    pub fn total(&self) -> i64 {
        self.cells.values().sum()
    }

    /// True when every stored value is +1 or -1.
    pub fn is_binary(&self) -> bool {
        self.cells.values().all(|v| v.abs() == 1)
    }

    /// Translates every cell by `v`.
    pub fn shift(&self, v: Vec2) -> SignedGrid {
        if v == Vec2::new(0, 0) {
            return self.clone();
        }
        let cells = self.cells.iter().map(|(pt, w)| (*pt + v, *w)).collect();
        Self::from_map(cells)
    }

    /// Flips the sign of every cell.
    pub fn negate(&self) -> SignedGrid {
        let cells = self.cells.iter().map(|(pt, w)| (*pt, -*w)).collect();
        Self::from_map(cells)
    }

    /// Multiplies every value by `k`. `k = 0` empties the grid.
    pub fn scaled(&self, k: i64) -> SignedGrid {
        if k == 0 {
            return SignedGrid::new();
        }
        let cells = self.cells.iter().map(|(pt, w)| (*pt, k * *w)).collect();
        Self::from_map(cells)
    }

    /// Pointwise integer sum; cells summing to zero vanish.
    pub fn add(&self, other: &SignedGrid) -> SignedGrid {
        let (big, small) = if self.cells.len() >= other.cells.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut map = big.cells.clone();
        for (pt, v) in &small.cells {
            let e = map.entry(*pt).or_insert(0);
            *e += v;
            if *e == 0 {
                map.remove(pt);
            }
        }
        Self::from_map(map)
    }

    /// Line sums along direction `d`, keyed by the line offset
    /// t = q*x - p*y. Absent offsets have sum zero with no cells.
    pub fn line_sums(&self, d: Direction) -> BTreeMap<i64, i64> {
        let mut sums = BTreeMap::new();
        for (pt, v) in &self.cells {
            *sums.entry(d.line_offset(*pt)).or_insert(0) += v;
        }
        sums
    }

    /// True iff all line sums vanish for every direction in `dirs`.
    pub fn is_ghost_for(&self, dirs: &[Direction]) -> bool {
        dirs.iter()
            .all(|d| self.line_sums(*d).values().all(|&s| s == 0))
    }
}

impl<'a> IntoIterator for &'a SignedGrid {
    type Item = (Point, i64);
    type IntoIter = std::iter::Map<
        std::collections::btree_map::Iter<'a, Point, i64>,
        fn((&'a Point, &'a i64)) -> (Point, i64),
    >;
    fn into_iter(self) -> Self::IntoIter {
        self.cells.iter().map(|(p, v)| (*p, *v))
    }
}

/// The ten directions of the 40-pixel demonstration ghost.
pub fn s10_directions() -> Vec<Direction> {
    [
        (0, -1),
        (1, 0),
        (1, -1),
        (1, 1),
        (1, -2),
        (2, -1),
        (1, -4),
        (4, -1),
        (2, -3),
        (3, -2),
    ]
    .iter()
    .map(|&(p, q)| Direction::new(p, q).expect("fixed co-prime list"))
    .collect()
}
