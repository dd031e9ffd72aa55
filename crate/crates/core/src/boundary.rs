//! Connectivity classification, perimeter and area measurement, and
//! boundary-segment length extraction for ghosts.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::lattice::{Direction, Point, SignedGrid, Vec2};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("connectivity is undefined for an empty grid")]
    EmptyGrid,
    #[error("line {offset} in the boundary direction has an odd cell count; boundary is malformed")]
    UnpairedBoundaryCells { offset: i64 },
    #[error("line {offset} cells do not alternate in sign; boundary is malformed")]
    NonAlternatingLine { offset: i64 },
    #[error("segment recursion needs n >= 3, got {0}")]
    BadSegmentOrder(usize),
}

/// Connectivity classification of a grid's support.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityReport {
    pub four_connected: bool,
    pub eight_connected: bool,
    /// Support 4-connected and complement 4-connected (no holes).
    pub simply_connected: bool,
    /// Largest hop (Euclidean) in the minimal spanning traversal of the
    /// support: the smallest step length that keeps the support connected.
    pub max_gap: f64,
    /// Whether signs alternate along the nearest-neighbour traversal of
    /// the curve. None when max_gap exceeds sqrt(2) or the traversal is
    /// ambiguous, in which case the check is skipped.
    pub alternating: Option<bool>,
}

/// Which of the two merge-shift families cuts the perimeter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftSet {
    /// Shifts of the surrounding-tile lattice: 2v_n, v_n - 2v_{n-1}, v_n + 2v_{n-1}.
    Adjacency,
    /// The second tiling: 2v_n, 2v_{n-1}, 4v_{n-2}.
    Alternate,
}

/// Segment decomposition of a boundary ghost under one shift set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentProfile {
    pub shift_set: ShiftSet,
    pub lengths: (usize, usize, usize),
    pub perimeter: usize,
    pub area: usize,
}

fn neighbors4(p: Point) -> [Point; 4] {
    [
        Point::new(p.x + 1, p.y),
        Point::new(p.x - 1, p.y),
        Point::new(p.x, p.y + 1),
        Point::new(p.x, p.y - 1),
    ]
}

fn neighbors8(p: Point) -> [Point; 8] {
    [
        Point::new(p.x + 1, p.y),
        Point::new(p.x - 1, p.y),
        Point::new(p.x, p.y + 1),
        Point::new(p.x, p.y - 1),
        Point::new(p.x + 1, p.y + 1),
        Point::new(p.x + 1, p.y - 1),
        Point::new(p.x - 1, p.y + 1),
        Point::new(p.x - 1, p.y - 1),
    ]
}

fn component_covers<F, I>(start: Point, support: &HashSet<Point>, adjacent: F) -> bool
where
    F: Fn(Point) -> I,
    I: IntoIterator<Item = Point>,
{
    let mut seen = HashSet::with_capacity(support.len());
    let mut stack = vec![start];
    seen.insert(start);
    while let Some(p) = stack.pop() {
        for n in adjacent(p) {
            if support.contains(&n) && seen.insert(n) {
                stack.push(n);
            }
        }
    }
    seen.len() == support.len()
}

/// True when the complement has no bounded components: flood from outside
/// the bbox and require every non-support cell in the padded box reached.
fn complement_connected(support: &HashSet<Point>, g: &SignedGrid) -> bool {
    let r = match g.bbox() {
        Some(r) => r,
        None => return true,
    };
    let (x0, y0, x1, y1) = (r.min_x - 1, r.min_y - 1, r.max_x + 1, r.max_y + 1);
    let start = Point::new(x0, y0);
    let mut seen = HashSet::new();
    let mut stack = vec![start];
    seen.insert(start);
    while let Some(p) = stack.pop() {
        for n in neighbors4(p) {
            if n.x < x0 || n.x > x1 || n.y < y0 || n.y > y1 {
                continue;
            }
            if !support.contains(&n) && seen.insert(n) {
                stack.push(n);
            }
        }
    }
    let total = (x1 - x0 + 1) * (y1 - y0 + 1);
    seen.len() as i64 == total - support.len() as i64
}

/// Largest edge of the Euclidean minimum spanning tree of the support:
/// the bottleneck hop length needed to traverse the whole set.
fn mst_max_gap(points: &[Point]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let n = points.len();
    let dist2 = |a: Point, b: Point| -> i64 {
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        dx * dx + dy * dy
    };
    let mut in_tree = vec![false; n];
    let mut best = vec![i64::MAX; n];
    in_tree[0] = true;
    for j in 1..n {
        best[j] = dist2(points[0], points[j]);
    }
    let mut max_edge = 0i64;
    for _ in 1..n {
        let mut k = usize::MAX;
        let mut kd = i64::MAX;
        for j in 0..n {
            if !in_tree[j] && best[j] < kd {
                kd = best[j];
                k = j;
            }
        }
        max_edge = max_edge.max(kd);
        in_tree[k] = true;
        for j in 0..n {
            if !in_tree[j] {
                best[j] = best[j].min(dist2(points[k], points[j]));
            }
        }
    }
    (max_edge as f64).sqrt()
}

/// Walks the curve by nearest unvisited 8-neighbour and checks that
/// consecutive cells (and the closing edge) carry opposite signs. Returns
/// None when some cell has no unvisited 8-neighbour before the walk
/// covers the support.
fn alternation_along_curve(g: &SignedGrid) -> Option<bool> {
    let start = g.iter().next()?.0;
    let mut visited = HashSet::new();
    visited.insert(start);
    let mut cur = start;
    let mut cur_v = g.get(start);
    let mut count = 1;
    while count < g.cell_count() {
        // Prefer 4-neighbours over diagonals, then fixed scan order.
        let next = neighbors8(cur)
            .into_iter()
            .find(|n| g.get(*n) != 0 && !visited.contains(n))?;
        let v = g.get(next);
        if v.signum() == cur_v.signum() {
            return Some(false);
        }
        visited.insert(next);
        cur = next;
        cur_v = v;
        count += 1;
    }
    // Closing edge of the cycle, when the ends actually touch.
    let d2 = {
        let d = cur - start;
        d.x * d.x + d.y * d.y
    };
    if d2 <= 2 && g.get(start).signum() == cur_v.signum() {
        return Some(false);
    }
    Some(true)
}

/// Classifies the support of a nonempty grid.
pub fn connectivity(g: &SignedGrid) -> Result<ConnectivityReport, AnalysisError> {
    if g.is_empty() {
        return Err(AnalysisError::EmptyGrid);
    }
    let support: HashSet<Point> = g.support().collect();
    let start = g.iter().next().expect("nonempty").0;
    let four = component_covers(start, &support, neighbors4);
    let eight = if four {
        true
    } else {
        component_covers(start, &support, neighbors8)
    };
    let simply = four && complement_connected(&support, g);
    let points: Vec<Point> = g.support().collect();
    let max_gap = mst_max_gap(&points);
    let alternating = if max_gap <= std::f64::consts::SQRT_2 + 1e-9 {
        alternation_along_curve(g)
    } else {
        None
    };
    Ok(ConnectivityReport {
        four_connected: four,
        eight_connected: eight,
        simply_connected: simply,
        max_gap,
        alternating,
    })
}

/// Perimeter of a boundary ghost: its nonzero cell count.
pub fn perimeter_count(v: &SignedGrid) -> usize {
    v.cell_count()
}

/// Perimeter P_n of the family-a boundary ghost by the ternary recursion
/// P_n = P_{n-2} + 2 P_{n-3}.
///
/// Seeds are pinned to the measured perimeters (2, 2, 4 at indices 0..2,
/// giving P_3 = 6), matching the measured boundary-ghost perimeters.
pub fn predicted_perimeter(n: usize) -> usize {
    let mut p = [2usize, 2, 4];
    if n < 3 {
        return p[n];
    }
    for _ in 3..=n {
        let next = p[1] + 2 * p[0];
        p = [p[1], p[2], next];
    }
    p[2]
}

/// Area enclosed by a boundary ghost: on each lattice line in the
/// boundary direction the nonzero cells alternate in sign; consecutive
/// opposite-sign pairs are filled inclusively and the spans summed.
pub fn enclosed_area(v: &SignedGrid, boundary_dir: Direction) -> Result<usize, AnalysisError> {
    let mut lines: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
    for (pt, val) in v.iter() {
        lines
            .entry(boundary_dir.line_offset(pt))
            .or_default()
            .push((boundary_dir.along_line(pt), val));
    }
    let mut area = 0usize;
    for (offset, mut cells) in lines {
        if cells.len() % 2 != 0 {
            return Err(AnalysisError::UnpairedBoundaryCells { offset });
        }
        cells.sort_unstable();
        for w in cells.windows(2) {
            if w[0].1.signum() == w[1].1.signum() {
                return Err(AnalysisError::NonAlternatingLine { offset });
            }
        }
        for pair in cells.chunks(2) {
            area += (pair[1].0 - pair[0].0 + 1) as usize;
        }
    }
    Ok(area)
}

/// Overlap lengths of a boundary ghost with its three shifted copies:
/// s_i = |support(v) ∩ support(v + w_i)|. These cells carry opposite
/// signs in a valid merge and cancel in the union.
pub fn segment_lengths(v: &SignedGrid, shifts: [Vec2; 3]) -> (usize, usize, usize) {
    let mut out = [0usize; 3];
    for (i, w) in shifts.iter().enumerate() {
        out[i] = v.support().filter(|pt| v.get(*pt + *w) != 0).count();
    }
    (out[0], out[1], out[2])
}

/// Predicted segment triple for the family-a boundary ghost V_n.
///
/// Adjacency set: s_{n+1} = (s_n^2 + 2 s_n^3, s_n^1, s_n^2) from
/// s_3 = (2, 1, 0). Alternate set: s_n^1' = s_{n-2}^2' + 2 s_{n-3}^3',
/// s_n^2' = s_n^1' + 4 s_{n-2}^3', s_n^3' = s_{n-2}^1', seeded with the
/// reference rows s_3' = (1,1,1), s_4' = (2,2,0) and s_2' = (0,2,0).
pub fn predicted_segments(
    n: usize,
    which: ShiftSet,
) -> Result<(usize, usize, usize), AnalysisError> {
    if n < 3 {
        return Err(AnalysisError::BadSegmentOrder(n));
    }
    match which {
        ShiftSet::Adjacency => {
            let mut s = (2usize, 1usize, 0usize);
            for _ in 3..n {
                s = (s.1 + 2 * s.2, s.0, s.1);
            }
            Ok(s)
        }
        ShiftSet::Alternate => {
            // rows[k] holds s_{k+2}'.
            let mut rows: Vec<(usize, usize, usize)> = vec![(0, 2, 0), (1, 1, 1), (2, 2, 0)];
            for m in 5..=n {
                let a = rows[m - 4]; // s_{m-2}'
                let b = rows[m - 5]; // s_{m-3}'
                let s1 = a.1 + 2 * b.2;
                let s2 = s1 + 4 * a.2;
                let s3 = a.0;
                rows.push((s1, s2, s3));
            }
            Ok(rows[n - 2])
        }
    }
}

/// Measured profile of a boundary ghost under one shift set.
pub fn segment_profile(
    v: &SignedGrid,
    shifts: [Vec2; 3],
    which: ShiftSet,
    boundary_dir: Direction,
) -> Result<SegmentProfile, AnalysisError> {
    let lengths = segment_lengths(v, shifts);
    Ok(SegmentProfile {
        shift_set: which,
        lengths,
        perimeter: perimeter_count(v),
        area: enclosed_area(v, boundary_dir)?,
    })
}

/// One measured table row for a boundary ghost: the last recursion
/// vector, both segment triples, perimeter and enclosed area.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentTableRow {
    pub n: usize,
    pub last_vector: Vec2,
    pub adjacency: (usize, usize, usize),
    pub alternate: (usize, usize, usize),
    pub perimeter: usize,
    pub area: usize,
}

/// Restriction of a boundary ghost to the cells shared with its copy
/// shifted by w: one perimeter segment. Used to probe which directions a
/// single segment still kills.
pub fn overlap_segment(v: &SignedGrid, w: Vec2) -> SignedGrid {
    SignedGrid::from_cells(
        v.iter()
            .filter(|(pt, _)| v.get(*pt + w) != 0)
            .map(|(pt, val)| (pt, val)),
    )
}
