//! Inflation: merging shifted boundary-ghost copies (or tiling minimal
//! ghosts) into larger ghosts with the same zero-projection directions.
//!
//! Overlapping perimeter segments carry opposite signs and annihilate in
//! the union, so every merge keeps all line sums zero while growing the
//! enclosed area.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::builder::{
    build_ghost, column_uniform, dilate, minimal_directions, BuildError, Family, GhostRecipe,
};
use crate::lattice::{Direction, Point, SignedGrid, Vec2};

#[derive(Debug, Error, PartialEq)]
pub enum InflateError {
    #[error("shift set needs at least {need} directions, got {got}")]
    TooFewDirections { need: usize, got: usize },
    #[error("shift {shift} produces no overlap with the aggregate")]
    NoOverlap { shift: Vec2 },
    #[error("same-sign collision at ({x}, {y}) for shift {shift}; invalid merge")]
    SameSignCollision { shift: Vec2, x: i64, y: i64 },
    #[error("position {position} is not on the tile lattice")]
    NotInTileLattice { position: Vec2 },
    #[error("tile placement {position} is not adjacent to the existing tiling")]
    NotAdjacent { position: Vec2 },
    #[error("self-avoiding walk trapped after {attempts} reseeds")]
    WalkTrapped { attempts: u32 },
    #[error("inflation step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<InflateError>,
    },
    #[error("random walk needs at least one tile")]
    NoTiles,
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("malformed inflation script: {0}")]
    BadScript(String),
}

/// Three merge vectors; the full shift set is these and their negations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftTriple(pub [Vec2; 3]);

impl ShiftTriple {
    pub fn positive_triple(&self) -> [Vec2; 3] {
        self.0
    }

    pub fn all_six(&self) -> [Vec2; 6] {
        let [a, b, c] = self.0;
        [a, b, c, -a, -b, -c]
    }
}

/// Surrounding-tile shifts for the minimal ghost built from `dirs`:
/// (w1, w2, w3) = (2 v_n, v_n - 2 v_{n-1}, v_n + 2 v_{n-1}), with
/// w1 = w2 + w3. The six signed shifts are the hexagonal neighbours of
/// the tile in its own tiling lattice.
pub fn adjacency_shifts(dirs: &[Direction]) -> Result<ShiftTriple, InflateError> {
    if dirs.len() < 2 {
        return Err(InflateError::TooFewDirections {
            need: 2,
            got: dirs.len(),
        });
    }
    let vn = dirs[dirs.len() - 1].vec();
    let vp = dirs[dirs.len() - 2].vec();
    Ok(ShiftTriple([
        vn.scaled(2),
        vn - vp.scaled(2),
        vn + vp.scaled(2),
    ]))
}

/// The second tiling's shifts: (2 v_n, 2 v_{n-1}, 4 v_{n-2}). Two of the
/// three differ from the adjacency set; 2 v_n is shared. For a two-vector
/// list the third slot uses the equivalent hexagon form
/// 2 v_{n-1} - 2 v_n, which equals 4 v_{n-2} on recursion-consistent
/// tails.
pub fn alternate_shifts(dirs: &[Direction]) -> Result<ShiftTriple, InflateError> {
    if dirs.len() < 2 {
        return Err(InflateError::TooFewDirections {
            need: 2,
            got: dirs.len(),
        });
    }
    let vn = dirs[dirs.len() - 1].vec();
    let vp = dirs[dirs.len() - 2].vec();
    let third = if dirs.len() >= 3 {
        dirs[dirs.len() - 3].vec().scaled(4)
    } else {
        vp.scaled(2) - vn.scaled(2)
    };
    Ok(ShiftTriple([vn.scaled(2), vp.scaled(2), third]))
}

/// Shift triples reordered to the segment indexing of the measured
/// profiles: adjacency (s1, s2, s3) live at (w2, w1, w3); the alternate
/// triple is already in segment order.
pub fn segment_shift_triples(dirs: &[Direction]) -> Result<([Vec2; 3], [Vec2; 3]), InflateError> {
    let adj = adjacency_shifts(dirs)?.0;
    let alt = alternate_shifts(dirs)?.0;
    Ok(([adj[1], adj[0], adj[2]], alt))
}

/// Adds a copy of `tile` shifted by `w` to `aggregate`. The copy takes the
/// sign that cancels the overlap (both signs preserve the zero sums; only
/// the cancelling one keeps the result binary). Errors when there is no
/// overlap to cancel or when any cell would leave {-1, +1}.
fn place_copy(
    aggregate: &SignedGrid,
    tile: &SignedGrid,
    w: Vec2,
) -> Result<SignedGrid, InflateError> {
    let shifted = tile.shift(w);
    let mut eps = 0i64;
    for (pt, v) in shifted.iter() {
        let existing = aggregate.get(pt);
        if existing != 0 {
            eps = -existing.signum() * v.signum();
            break;
        }
    }
    if eps == 0 {
        return Err(InflateError::NoOverlap { shift: w });
    }
    let merged = aggregate.add(&shifted.scaled(eps));
    for (pt, v) in merged.iter() {
        if v.abs() > 1 {
            return Err(InflateError::SameSignCollision {
                shift: w,
                x: pt.x,
                y: pt.y,
            });
        }
    }
    Ok(merged)
}

/// Pairwise inflation: base plus a copy of itself shifted by `shift`. The
/// overlapped segment annihilates, so the new perimeter is 2P - 2s.
pub fn merge(base: &SignedGrid, shift: Vec2) -> Result<SignedGrid, InflateError> {
    place_copy(base, base, shift)
}

/// Merges copies of `base` at each chosen shift in order, each copy
/// cancelling against the aggregate built so far. An empty selection
/// returns the base unchanged.
pub fn surround(base: &SignedGrid, chosen: &[Vec2]) -> Result<SignedGrid, InflateError> {
    let mut agg = base.clone();
    for (i, w) in chosen.iter().enumerate() {
        agg = place_copy(&agg, base, *w).map_err(|e| InflateError::StepFailed {
            step: i + 1,
            source: Box::new(e),
        })?;
    }
    Ok(agg)
}

/// A shift triple's six signed vectors sorted by angle, so that
/// consecutive entries (cyclically) are hexagonal neighbours sharing a
/// perimeter segment.
pub fn angular_ring(triple: ShiftTriple) -> [Vec2; 6] {
    let mut six = triple.all_six();
    six.sort_by(|a, b| {
        let aa = (a.y as f64).atan2(a.x as f64);
        let ab = (b.y as f64).atan2(b.x as f64);
        aa.partial_cmp(&ab).expect("angles are finite")
    });
    six
}

/// The six adjacency shifts in angular ring order.
pub fn hexagon_ring(dirs: &[Direction]) -> Result<[Vec2; 6], InflateError> {
    Ok(angular_ring(adjacency_shifts(dirs)?))
}

/// Ring index selections that keep the inflated perimeter at 3 P_n:
/// every chosen tile and every gap contributes half the base perimeter.
/// m counts tiles including the centre one.
pub fn constant_perimeter_selection(m: usize) -> Option<Vec<usize>> {
    match m {
        4 => Some(vec![0, 2, 4]),
        5 => Some(vec![0, 1, 2, 4]),
        6 => Some(vec![0, 1, 2, 3, 4]),
        7 => Some(vec![0, 1, 2, 3, 4, 5]),
        _ => None,
    }
}

/// One inflation step: place a fresh copy of the base tile at a lattice
/// offset, or merge the whole aggregate with a shifted copy of itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Tile(Vec2),
    MergeSelf(Vec2),
}

/// How a script realises the tiling. Both methods produce identical
/// ghosts for identical placement sets; the tile method additionally
/// requires every position to sit on the minimal ghost's tiling lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    BoundaryMerge,
    TileThenBoundary,
}

impl Method {
    fn tag(self) -> &'static str {
        match self {
            Method::BoundaryMerge => "boundary-merge",
            Method::TileThenBoundary => "tile-then-boundary",
        }
    }
}

/// A replayable inflation run: family boundary-ghost base plus ordered
/// steps. Replay is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InflationScript {
    pub family: Family,
    pub n: usize,
    pub method: Method,
    pub seed: Option<u64>,
    pub steps: Vec<Step>,
}

/// Cell count (and enclosed area where the aggregate is a well-formed
/// boundary at that point) after each step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepTrace {
    pub step: usize,
    pub cells: usize,
    pub area: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct InflationOutcome {
    pub ghost: SignedGrid,
    pub trace: Vec<StepTrace>,
}

impl InflationScript {
    pub fn base_recipe(&self) -> Result<GhostRecipe, BuildError> {
        GhostRecipe::boundary(self.family, self.n)
    }

    /// All n zero-sum directions of the base and of every replay output.
    pub fn zero_directions(&self) -> Result<Vec<Direction>, BuildError> {
        Ok(self.base_recipe()?.zero_directions())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("inflate v1\n");
        out.push_str(&format!("base {} {}\n", self.family.tag(), self.n));
        out.push_str(&format!("method {}\n", self.method.tag()));
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed {seed}\n"));
        }
        for step in &self.steps {
            match step {
                Step::Tile(v) => out.push_str(&format!("tile {} {}\n", v.x, v.y)),
                Step::MergeSelf(v) => out.push_str(&format!("step {} {}\n", v.x, v.y)),
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, InflateError> {
        let bad = |msg: &str| InflateError::BadScript(msg.to_string());
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        if lines.next() != Some("inflate v1") {
            return Err(bad("missing 'inflate v1' header"));
        }
        let mut family = None;
        let mut n = None;
        let mut method = None;
        let mut seed = None;
        let mut steps = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or("");
            let rest: Vec<&str> = parts.collect();
            match key {
                "base" => {
                    if rest.len() != 2 {
                        return Err(bad("base line wants '<family> <n>'"));
                    }
                    family = Some(
                        Family::from_tag(rest[0])
                            .ok_or_else(|| bad(&format!("unknown family '{}'", rest[0])))?,
                    );
                    n = Some(rest[1].parse::<usize>().map_err(|_| bad("bad n"))?);
                }
                "method" => {
                    method = Some(match rest.as_slice() {
                        ["boundary-merge"] => Method::BoundaryMerge,
                        ["tile-then-boundary"] => Method::TileThenBoundary,
                        _ => return Err(bad("unknown method")),
                    });
                }
                "seed" => {
                    seed = Some(
                        rest.first()
                            .and_then(|s| s.parse::<u64>().ok())
                            .ok_or_else(|| bad("bad seed"))?,
                    );
                }
                "tile" | "step" => {
                    if rest.len() != 2 {
                        return Err(bad("step line wants '<dx> <dy>'"));
                    }
                    let x = rest[0].parse::<i64>().map_err(|_| bad("bad dx"))?;
                    let y = rest[1].parse::<i64>().map_err(|_| bad("bad dy"))?;
                    let vv = Vec2::new(x, y);
                    steps.push(if key == "tile" {
                        Step::Tile(vv)
                    } else {
                        Step::MergeSelf(vv)
                    });
                }
                other => return Err(bad(&format!("unknown line '{other}'"))),
            }
        }
        Ok(InflationScript {
            family: family.ok_or_else(|| bad("missing base line"))?,
            n: n.ok_or_else(|| bad("missing base line"))?,
            method: method.unwrap_or(Method::BoundaryMerge),
            seed,
            steps,
        })
    }
}

/// Integer coordinates of `x` in the basis (w1, w2), or None when x is
/// off-lattice.
fn lattice_coords(x: Vec2, w1: Vec2, w2: Vec2) -> Option<(i64, i64)> {
    let d = w1.det(w2);
    debug_assert_ne!(d, 0);
    let a_num = x.det(w2);
    let b_num = w1.det(x);
    if a_num % d != 0 || b_num % d != 0 {
        return None;
    }
    Some((a_num / d, b_num / d))
}

/// Sign of the tile copy at lattice position (A, B) in the basis
/// (w1, w2) = (2 v_{n-1}, v_n): the global tiling pattern negates every
/// w2 step and preserves w1 steps.
fn tile_sign(coords: (i64, i64)) -> i64 {
    if coords.1.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

const HEX_MOVES: [(i64, i64); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];

/// Replays a script. Boundary-merge grows a boundary-ghost aggregate by
/// overlap-cancelling copies; tile-then-boundary assembles sign-matched
/// minimal-ghost tiles and hollows the union once at the end. Both emit a
/// per-step cell/area trace.
pub fn run_script(script: &InflationScript) -> Result<InflationOutcome, InflateError> {
    let family = script.family;
    let n = script.n;
    let boundary = family.boundary_direction();
    match script.method {
        Method::BoundaryMerge => {
            let base = build_ghost(&GhostRecipe::boundary(family, n)?)?.ghost;
            let mut agg = base.clone();
            let mut trace = Vec::with_capacity(script.steps.len());
            for (i, step) in script.steps.iter().enumerate() {
                agg = match step {
                    Step::Tile(w) => place_copy(&agg, &base, *w),
                    Step::MergeSelf(u) => place_copy(&agg.clone(), &agg, *u),
                }
                .map_err(|e| InflateError::StepFailed {
                    step: i + 1,
                    source: Box::new(e),
                })?;
                trace.push(StepTrace {
                    step: i + 1,
                    cells: agg.cell_count(),
                    area: crate::boundary::enclosed_area(&agg, boundary).ok(),
                });
            }
            Ok(InflationOutcome { ghost: agg, trace })
        }
        Method::TileThenBoundary => {
            let dirs = minimal_directions(family, n - 1)?;
            let tile = build_ghost(&GhostRecipe::minimal(family, n - 1)?)?.ghost;
            let triple = adjacency_shifts(&dirs)?.0;
            // Basis (w1, w2) = (2 v_{n-1}, v_n).
            let basis = (triple[0], triple[1]);
            let mut positions: Vec<(i64, i64)> = vec![(0, 0)];
            let mut occupied: HashSet<(i64, i64)> = positions.iter().copied().collect();
            let mut trace = Vec::with_capacity(script.steps.len() + 1);
            for (i, step) in script.steps.iter().enumerate() {
                let fail = |e: InflateError| InflateError::StepFailed {
                    step: i + 1,
                    source: Box::new(e),
                };
                match step {
                    Step::Tile(w) => {
                        let coords = lattice_coords(*w, basis.0, basis.1)
                            .ok_or(InflateError::NotInTileLattice { position: *w })
                            .map_err(&fail)?;
                        let adjacent = HEX_MOVES
                            .iter()
                            .any(|&(a, b)| occupied.contains(&(coords.0 - a, coords.1 - b)));
                        if !adjacent {
                            return Err(fail(InflateError::NotAdjacent { position: *w }));
                        }
                        if !occupied.insert(coords) {
                            return Err(fail(InflateError::SameSignCollision {
                                shift: *w,
                                x: coords.0,
                                y: coords.1,
                            }));
                        }
                        positions.push(coords);
                    }
                    Step::MergeSelf(u) => {
                        let coords = lattice_coords(*u, basis.0, basis.1)
                            .ok_or(InflateError::NotInTileLattice { position: *u })
                            .map_err(&fail)?;
                        let moved: Vec<(i64, i64)> = positions
                            .iter()
                            .map(|&(a, b)| (a + coords.0, b + coords.1))
                            .collect();
                        for c in &moved {
                            if !occupied.insert(*c) {
                                return Err(fail(InflateError::SameSignCollision {
                                    shift: *u,
                                    x: c.0,
                                    y: c.1,
                                }));
                            }
                        }
                        positions.extend(moved);
                    }
                }
                trace.push(StepTrace {
                    step: i + 1,
                    cells: positions.len() * tile.cell_count(),
                    area: None,
                });
            }
            let union = SignedGrid::from_cells(positions.iter().flat_map(|&(a, b)| {
                let offset = basis.0.scaled(a) + basis.1.scaled(b);
                let sign = tile_sign((a, b));
                tile.iter()
                    .map(move |(pt, v)| (pt + offset, sign * v))
                    .collect::<Vec<_>>()
            }));
            if !column_uniform(&union, boundary) {
                return Err(InflateError::Build(BuildError::NotColumnUniform {
                    dir: boundary,
                }));
            }
            let ghost = dilate(&union, boundary.vec());
            let area = crate::boundary::enclosed_area(&ghost, boundary).ok();
            trace.push(StepTrace {
                step: script.steps.len() + 1,
                cells: ghost.cell_count(),
                area,
            });
            Ok(InflationOutcome { ghost, trace })
        }
    }
}

const WALK_RESEED_LIMIT: u32 = 64;

/// Inflates V_n by placing `tiles` copies of U_{n-1} along a self-avoiding
/// random walk on the six-neighbour tile lattice, then hollowing once.
/// A trapped walk restarts with the next derived seed, up to a bound.
pub fn random_walk_inflate(
    family: Family,
    n: usize,
    tiles: usize,
    seed: u64,
) -> Result<(SignedGrid, InflationScript), InflateError> {
    if tiles == 0 {
        return Err(InflateError::NoTiles);
    }
    let dirs = minimal_directions(family, n - 1)?;
    let triple = adjacency_shifts(&dirs)?.0;
    let basis = (triple[0], triple[1]);
    for attempt in 0..WALK_RESEED_LIMIT {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let mut visited: HashSet<(i64, i64)> = HashSet::new();
        let mut cur = (0i64, 0i64);
        visited.insert(cur);
        let mut order: Vec<(i64, i64)> = Vec::with_capacity(tiles);
        while visited.len() < tiles {
            let legal: Vec<(i64, i64)> = HEX_MOVES
                .iter()
                .map(|&(a, b)| (cur.0 + a, cur.1 + b))
                .filter(|c| !visited.contains(c))
                .collect();
            if legal.is_empty() {
                break;
            }
            cur = legal[rng.gen_range(0..legal.len())];
            visited.insert(cur);
            order.push(cur);
        }
        if visited.len() == tiles {
            let steps: Vec<Step> = order
                .iter()
                .map(|&(a, b)| Step::Tile(basis.0.scaled(a) + basis.1.scaled(b)))
                .collect();
            let script = InflationScript {
                family,
                n,
                method: Method::TileThenBoundary,
                seed: Some(seed),
                steps,
            };
            let ghost = run_script(&script)?.ghost;
            return Ok((ghost, script));
        }
    }
    Err(InflateError::WalkTrapped {
        attempts: WALK_RESEED_LIMIT,
    })
}

/// True iff translates of the tile's support by the lattice generated by
/// t1 and t2 partition the plane: the determinant must equal the cell
/// count, and every cell of a padded test window must be covered exactly
/// once.
pub fn tiling_check(tile: &SignedGrid, t1: Vec2, t2: Vec2) -> bool {
    let det = t1.det(t2);
    if det == 0 || det.unsigned_abs() as usize != tile.cell_count() {
        return false;
    }
    let r = match tile.bbox() {
        Some(r) => r,
        None => return false,
    };
    let pad = r.width().max(r.height()) + 2;
    let support: Vec<Point> = tile.support().collect();
    for cx in (r.min_x - pad)..=(r.max_x + pad) {
        for cy in (r.min_y - pad)..=(r.max_y + pad) {
            let c = Point::new(cx, cy);
            let mut cover = 0;
            for s in &support {
                if lattice_coords(c - *s, t1, t2).is_some() {
                    cover += 1;
                    if cover > 1 {
                        return false;
                    }
                }
            }
            if cover != 1 {
                return false;
            }
        }
    }
    true
}
