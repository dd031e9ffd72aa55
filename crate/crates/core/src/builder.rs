//! Ghost construction: negate-shift-add dilations from a start tile, the
//! four minimal-ghost families and their boundary ghosts.

use std::fmt;

use thiserror::Error;

use crate::lattice::{Direction, Point, SignedGrid, Vec2};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("direction sequence needs n >= 2, got {0}")]
    SequenceTooShort(usize),
    #[error("recursion choice list has length {got}, expected {expected}")]
    RecursionLengthMismatch { got: usize, expected: usize },
    #[error("overwrite at dilation step {step} (shift {shift}); ghost is not maximal")]
    Overwrite { step: usize, shift: Vec2 },
    #[error("boundary direction {dir} violates the uniform-sign precondition")]
    NotColumnUniform { dir: Direction },
    #[error("zero shift vector at dilation step {step}")]
    ZeroShift { step: usize },
    #[error("minimal ghost needs n >= 1, got {0}")]
    BadMinimalOrder(usize),
    #[error("boundary ghost needs n >= 2, got {0}")]
    BadBoundaryOrder(usize),
    #[error("empty start tile")]
    EmptyStartTile,
    #[error("family transform check needs n >= 3, got {0}")]
    BadTransformOrder(usize),
    #[error("malformed recipe manifest: {0}")]
    BadManifest(String),
}

/// The four minimal-ghost families. A family fixes the two start vectors
/// of the direction recursion and the boundary direction that hollows the
/// interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    A,
    APrime,
    B,
    BPrime,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::A, Family::APrime, Family::B, Family::BPrime];

    pub fn start_vectors(self) -> (Direction, Direction) {
        let d = |p, q| Direction::new(p, q).expect("start vectors are co-prime");
        match self {
            Family::A => (d(1, 0), d(1, 1)),
            Family::APrime => (d(1, 0), d(-1, 1)),
            Family::B | Family::BPrime => (d(1, 0), d(0, 1)),
        }
    }

    /// Boundary directions follow the text convention: (0,1) for the a
    /// families, (-1,1) for b and (1,1) for b'.
    pub fn boundary_direction(self) -> Direction {
        let d = |p, q| Direction::new(p, q).expect("boundary vectors are co-prime");
        match self {
            Family::A | Family::APrime => d(0, 1),
            Family::B => d(-1, 1),
            Family::BPrime => d(1, 1),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Family::A => "a",
            Family::APrime => "a'",
            Family::B => "b",
            Family::BPrime => "b'",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Family> {
        match tag {
            "a" => Some(Family::A),
            "a'" | "ap" | "aprime" => Some(Family::APrime),
            "b" => Some(Family::B),
            "b'" | "bp" | "bprime" => Some(Family::BPrime),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Per-step choice between the two direction recursions:
/// minus gives v_k = v_{k-1} - 2 v_{k-2}, plus gives v_k = v_{k-1} + 2 v_{k-2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recursion {
    Minus,
    Plus,
}

impl Recursion {
    fn apply(self, prev: Vec2, prev2: Vec2) -> Vec2 {
        match self {
            Recursion::Minus => prev - prev2.scaled(2),
            Recursion::Plus => prev + prev2.scaled(2),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Recursion::Minus => '-',
            Recursion::Plus => '+',
        }
    }

    pub fn from_symbol(c: char) -> Option<Recursion> {
        match c {
            '-' => Some(Recursion::Minus),
            '+' => Some(Recursion::Plus),
            _ => None,
        }
    }
}

/// Directions v_1..v_n for a family: the two start vectors followed by
/// recursion steps. `recursions` holds one choice per step 3..=n.
pub fn direction_sequence(
    family: Family,
    n: usize,
    recursions: &[Recursion],
) -> Result<Vec<Direction>, BuildError> {
    if n < 2 {
        return Err(BuildError::SequenceTooShort(n));
    }
    if recursions.len() != n - 2 {
        return Err(BuildError::RecursionLengthMismatch {
            got: recursions.len(),
            expected: n - 2,
        });
    }
    let (v1, v2) = family.start_vectors();
    let mut vecs = vec![v1.vec(), v2.vec()];
    for r in recursions {
        let k = vecs.len();
        vecs.push(r.apply(vecs[k - 1], vecs[k - 2]));
    }
    Ok(vecs
        .into_iter()
        .map(|v| Direction::new(v.x, v.y).expect("recursion preserves co-primality"))
        .collect())
}

/// Directions v_1..v_n using the minus recursion throughout, as used by
/// every minimal ghost.
pub fn minimal_directions(family: Family, n: usize) -> Result<Vec<Direction>, BuildError> {
    if n == 0 {
        return Err(BuildError::BadMinimalOrder(0));
    }
    if n == 1 {
        return Ok(vec![family.start_vectors().0]);
    }
    direction_sequence(family, n, &vec![Recursion::Minus; n - 2])
}

/// The primitive direction parallel to a shift vector. Dilating by any
/// integer multiple of a primitive vector zeroes that direction's line
/// sums, so arbitrary-tile recipes may shift by non-co-prime vectors.
pub fn primitive(v: Vec2) -> Option<Direction> {
    if v == Vec2::new(0, 0) {
        return None;
    }
    let mut a = v.x.unsigned_abs();
    let mut b = v.y.unsigned_abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    let g = a as i64;
    Some(Direction::new(v.x / g, v.y / g).expect("division by gcd is primitive"))
}

/// One negate-shift-add step: g plus a negated copy of itself shifted by
/// v. The result is a ghost for the direction parallel to v and for every
/// direction g was already a ghost for.
pub fn dilate(g: &SignedGrid, v: Vec2) -> SignedGrid {
    g.add(&g.shift(v).negate())
}

/// True iff the supports of g and its v-shifted copy are disjoint, so a
/// dilation by v doubles the cell count.
pub fn overwrite_free(g: &SignedGrid, v: Vec2) -> bool {
    g.support().all(|pt| g.get(pt + v) == 0)
}

/// True iff along every lattice line in direction d, the nonzero cells of
/// g share one sign. This is the precondition for d to act as a boundary
/// direction.
pub fn column_uniform(g: &SignedGrid, d: Direction) -> bool {
    use std::collections::BTreeMap;
    let mut sign_by_line: BTreeMap<i64, i64> = BTreeMap::new();
    for (pt, v) in g.iter() {
        let t = d.line_offset(pt);
        let s = v.signum();
        match sign_by_line.get(&t) {
            None => {
                sign_by_line.insert(t, s);
            }
            Some(&prev) if prev != s => return false,
            _ => {}
        }
    }
    true
}

/// Full provenance of a ghost build: start tile, ordered shift vectors,
/// and an optional final boundary dilation. A recipe carrying a family tag
/// demands an overwrite-free (maximal) construction.
#[derive(Debug, Clone)]
pub struct GhostRecipe {
    pub start_tile: SignedGrid,
    pub shifts: Vec<Vec2>,
    pub boundary_direction: Option<Direction>,
    pub family: Option<Family>,
}

impl GhostRecipe {
    /// Family recipe: single +1 start pixel, all-minus recursion.
    pub fn minimal(family: Family, n: usize) -> Result<Self, BuildError> {
        Ok(GhostRecipe {
            start_tile: SignedGrid::from_cells([(Point::new(0, 0), 1)]),
            shifts: minimal_directions(family, n)?
                .iter()
                .map(|d| d.vec())
                .collect(),
            boundary_direction: None,
            family: Some(family),
        })
    }

    /// Family boundary recipe: V_n built from U_{n-1} plus the family's
    /// boundary direction.
    pub fn boundary(family: Family, n: usize) -> Result<Self, BuildError> {
        if n < 2 {
            return Err(BuildError::BadBoundaryOrder(n));
        }
        let mut recipe = Self::minimal(family, n - 1)?;
        recipe.boundary_direction = Some(family.boundary_direction());
        Ok(recipe)
    }

    /// The zero-sum directions of the built ghost: primitive forms of the
    /// shift vectors, plus the boundary direction when present.
    pub fn zero_directions(&self) -> Vec<Direction> {
        let mut dirs: Vec<Direction> = self
            .shifts
            .iter()
            .filter_map(|&v| primitive(v))
            .collect();
        if let Some(b) = self.boundary_direction {
            dirs.push(b);
        }
        dirs
    }

    /// Recursion string like "-----" for the steps past the two start
    /// vectors, reconstructed from the shift list.
    pub fn recursion_string(&self) -> String {
        let mut s = String::new();
        for k in 2..self.shifts.len() {
            if self.shifts[k] == self.shifts[k - 1] - self.shifts[k - 2].scaled(2) {
                s.push('-');
            } else {
                s.push('+');
            }
        }
        s
    }
}

impl GhostRecipe {
    /// Deterministic text manifest. Shift vectors are written explicitly
    /// so any ghost is reproducible from its manifest alone; the family
    /// tag and recursion string are carried for provenance.
    pub fn manifest_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("recipe v1\n");
        match self.family {
            Some(f) => writeln!(out, "family {}", f.tag()).expect("string write"),
            None => out.push_str("family none\n"),
        }
        let rec = self.recursion_string();
        if !rec.is_empty() {
            writeln!(out, "recursions {rec}").unwrap();
        }
        if let Some(b) = self.boundary_direction {
            writeln!(out, "boundary {} {}", b.p(), b.q()).unwrap();
        }
        writeln!(out, "tile {}", self.start_tile.cell_count()).unwrap();
        for (pt, v) in self.start_tile.iter() {
            writeln!(out, "cell {} {} {}", pt.x, pt.y, v).unwrap();
        }
        for s in &self.shifts {
            writeln!(out, "shift {} {}", s.x, s.y).unwrap();
        }
        out
    }

    pub fn from_manifest_text(text: &str) -> Result<Self, BuildError> {
        let bad = |msg: &str| BuildError::BadManifest(msg.to_string());
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        if lines.next() != Some("recipe v1") {
            return Err(bad("missing 'recipe v1' header"));
        }
        let mut family = None;
        let mut boundary = None;
        let mut cells: Vec<(Point, i64)> = Vec::new();
        let mut declared = None;
        let mut shifts = Vec::new();
        for line in lines {
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            let nums: Vec<i64> = rest
                .split_whitespace()
                .filter_map(|t| t.parse().ok())
                .collect();
            match key {
                "family" => {
                    family = match rest {
                        "none" => None,
                        tag => Some(
                            Family::from_tag(tag)
                                .ok_or_else(|| bad(&format!("unknown family '{tag}'")))?,
                        ),
                    }
                }
                "recursions" => {} // provenance only; shifts are authoritative
                "boundary" => match nums[..] {
                    [p, q] => {
                        boundary =
                            Some(Direction::new(p, q).map_err(|e| bad(&e.to_string()))?)
                    }
                    _ => return Err(bad("bad boundary line")),
                },
                "tile" => match nums[..] {
                    [n] if n >= 0 => declared = Some(n as usize),
                    _ => return Err(bad("bad tile line")),
                },
                "cell" => match nums[..] {
                    [x, y, v] if v != 0 => cells.push((Point::new(x, y), v)),
                    _ => return Err(bad("bad cell line")),
                },
                "shift" => match nums[..] {
                    [x, y] => shifts.push(Vec2::new(x, y)),
                    _ => return Err(bad("bad shift line")),
                },
                other => return Err(bad(&format!("unknown line '{other}'"))),
            }
        }
        if declared != Some(cells.len()) {
            return Err(bad("tile cell count mismatch"));
        }
        let recipe = GhostRecipe {
            start_tile: SignedGrid::from_cells(cells),
            shifts,
            boundary_direction: boundary,
            family,
        };
        if let Some(f) = recipe.family {
            let derived: Vec<Vec2> = minimal_directions(f, recipe.shifts.len())?
                .iter()
                .map(|d| d.vec())
                .collect();
            let rec_ok = recipe.shifts.len() < 2
                || direction_sequence(
                    f,
                    recipe.shifts.len(),
                    &recipe
                        .recursion_string()
                        .chars()
                        .filter_map(Recursion::from_symbol)
                        .collect::<Vec<_>>(),
                )
                .map(|ds| ds.iter().map(|d| d.vec()).collect::<Vec<_>>() == recipe.shifts)
                .unwrap_or(false);
            if !(recipe.shifts == derived || rec_ok) {
                return Err(bad("shifts disagree with the family recursion"));
            }
        }
        Ok(recipe)
    }
}

/// Result of a recipe build: the ghost plus per-step overwrite tracking.
#[derive(Debug, Clone)]
pub struct BuildReport {
    pub ghost: SignedGrid,
    /// One flag per dilation step, boundary step included when present.
    pub step_overwrite_free: Vec<bool>,
}

impl BuildReport {
    pub fn all_overwrite_free(&self) -> bool {
        self.step_overwrite_free.iter().all(|&f| f)
    }
}

/// Dilates the start tile by each shift in order, then by the boundary
/// direction when present. Family recipes error on any overwrite, naming
/// the step; the boundary step always checks the uniform-sign
/// precondition.
pub fn build_ghost(recipe: &GhostRecipe) -> Result<BuildReport, BuildError> {
    if recipe.start_tile.is_empty() {
        return Err(BuildError::EmptyStartTile);
    }
    let strict = recipe.family.is_some();
    let mut g = recipe.start_tile.clone();
    let mut flags = Vec::with_capacity(recipe.shifts.len() + 1);
    for (i, v) in recipe.shifts.iter().enumerate() {
        if *v == Vec2::new(0, 0) {
            return Err(BuildError::ZeroShift { step: i + 1 });
        }
        let free = overwrite_free(&g, *v);
        if strict && !free {
            return Err(BuildError::Overwrite {
                step: i + 1,
                shift: *v,
            });
        }
        flags.push(free);
        g = dilate(&g, *v);
    }
    if let Some(b) = recipe.boundary_direction {
        if !column_uniform(&g, b) {
            return Err(BuildError::NotColumnUniform { dir: b });
        }
        flags.push(overwrite_free(&g, b.vec()));
        g = dilate(&g, b.vec());
    }
    Ok(BuildReport {
        ghost: g,
        step_overwrite_free: flags,
    })
}

/// The minimal ghost U_n: 2^n signed pixels grown from a single +1 cell.
pub fn minimal_ghost(family: Family, n: usize) -> Result<SignedGrid, BuildError> {
    let report = build_ghost(&GhostRecipe::minimal(family, n)?)?;
    debug_assert_eq!(report.ghost.cell_count(), 1usize << n);
    Ok(report.ghost)
}

/// The minimal boundary ghost V_n: U_{n-1} dilated once along the family's
/// boundary direction, which cancels the interior.
pub fn boundary_ghost(family: Family, n: usize) -> Result<SignedGrid, BuildError> {
    Ok(build_ghost(&GhostRecipe::boundary(family, n)?)?.ghost)
}

/// Checks the componentwise linear relation between the family direction
/// sequences: p_i^b = p_i^a - q_i^a = p_i^a' + q_i^a' with equal q, for
/// 2 < i <= n.
pub fn family_transform_check(n: usize) -> Result<bool, BuildError> {
    if n < 3 {
        return Err(BuildError::BadTransformOrder(n));
    }
    let a = minimal_directions(Family::A, n)?;
    let ap = minimal_directions(Family::APrime, n)?;
    let b = minimal_directions(Family::B, n)?;
    Ok((2..n).all(|i| {
        b[i].p() == a[i].p() - a[i].q()
            && b[i].q() == a[i].q()
            && b[i].p() == ap[i].p() + ap[i].q()
            && b[i].q() == ap[i].q()
    }))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::lattice::box_size;

    fn pt(x: i64, y: i64) -> Point {
        Point::new(x, y)
    }

    fn dir(p: i64, q: i64) -> Direction {
        Direction::new(p, q).unwrap()
    }

    fn dirs(list: &[(i64, i64)]) -> Vec<Direction> {
        list.iter().map(|&(p, q)| dir(p, q)).collect()
    }

    fn vecs(list: &[(i64, i64)]) -> Vec<Vec2> {
        list.iter().map(|&(x, y)| Vec2::new(x, y)).collect()
    }

    #[test]
    fn order_seven_direction_sequences() {
        let u7a = minimal_directions(Family::A, 7).unwrap();
        assert_eq!(
            u7a,
            dirs(&[(1, 0), (1, 1), (-1, 1), (-3, -1), (-1, -3), (5, -1), (7, 5)])
        );
        let u7ap = minimal_directions(Family::APrime, 7).unwrap();
        assert_eq!(
            u7ap,
            dirs(&[(1, 0), (-1, 1), (-3, 1), (-1, -1), (5, -3), (7, -1), (-3, 5)])
        );
        let u7b = minimal_directions(Family::B, 7).unwrap();
        assert_eq!(
            u7b,
            dirs(&[(1, 0), (0, 1), (-2, 1), (-2, -1), (2, -3), (6, -1), (2, 5)])
        );
        assert_eq!(
            direction_sequence(Family::A, 1, &[]),
            Err(BuildError::SequenceTooShort(1))
        );
    }

    #[test]
    fn plus_recursion_builds_valid_ghosts() {
        let seq = direction_sequence(Family::A, 6, &[Recursion::Plus; 4]).unwrap();
        let recipe = GhostRecipe {
            start_tile: SignedGrid::from_cells([(pt(0, 0), 1)]),
            shifts: seq.iter().map(|d| d.vec()).collect(),
            boundary_direction: None,
            family: None,
        };
        let out = build_ghost(&recipe).unwrap().ghost;
        assert!(out.is_ghost_for(&seq));
    }

    #[test]
    fn dilate_single_cell() {
        let g = SignedGrid::from_cells([(pt(0, 0), 1)]);
        let d = dilate(&g, Vec2::new(1, 0));
        assert_eq!(d.get(pt(0, 0)), 1);
        assert_eq!(d.get(pt(1, 0)), -1);
        assert_eq!(d.cell_count(), 2);
    }

    #[test]
    fn overwrite_free_detects_collision() {
        let g = SignedGrid::from_cells([(pt(0, 0), 1)]);
        assert!(overwrite_free(&g, Vec2::new(1, 0)));
        let two = SignedGrid::from_cells([(pt(0, 0), 1), (pt(1, 0), -1)]);
        assert!(!overwrite_free(&two, Vec2::new(1, 0)));
    }

    #[test]
    fn u7_builds_double_every_step() {
        let recipe = GhostRecipe::minimal(Family::A, 7).unwrap();
        let mut g = recipe.start_tile.clone();
        for v in &recipe.shifts {
            assert!(overwrite_free(&g, *v));
            g = dilate(&g, *v);
        }
        assert_eq!(g.cell_count(), 128);
        let b = g.bbox().unwrap();
        assert_eq!((b.width(), b.height()), (20, 13));
    }

    #[test]
    fn minimal_ghost_sizes() {
        // 128 cells in 20x13 / 22x13 / 16x13 boxes.
        for (family, w, h) in [
            (Family::A, 20, 13),
            (Family::APrime, 22, 13),
            (Family::B, 16, 13),
        ] {
            let u = minimal_ghost(family, 7).unwrap();
            assert_eq!(u.cell_count(), 128);
            let b = u.bbox().unwrap();
            assert_eq!((b.width(), b.height()), (w, h));
            assert!(u.is_binary());
            assert_eq!(u.total(), 0);
        }
    }

    #[test]
    fn bbox_equals_box_size_for_minimal_ghosts() {
        for family in Family::ALL {
            for n in 1..=10 {
                let ds = minimal_directions(family, n).unwrap();
                let u = minimal_ghost(family, n).unwrap();
                let bs = box_size(&ds).unwrap();
                let r = u.bbox().unwrap();
                assert_eq!((r.width(), r.height()), (bs.a, bs.b));
            }
        }
    }

    #[test]
    fn order_eight_boundary_counts() {
        let v8a = boundary_ghost(Family::A, 8).unwrap();
        assert_eq!(v8a.cell_count(), 48);
        let r = v8a.bbox().unwrap();
        assert_eq!((r.width(), r.height()), (20, 14));

        let v8ap = boundary_ghost(Family::APrime, 8).unwrap();
        assert_eq!(v8ap.cell_count(), 52);
        let r = v8ap.bbox().unwrap();
        assert_eq!((r.width(), r.height()), (22, 14));

        // The b/b' boundary labels carry a sign conflict in the source;
        // the pair of counts {48, 52} is the stable claim.
        let v8b = boundary_ghost(Family::B, 8).unwrap();
        let v8bp = boundary_ghost(Family::BPrime, 8).unwrap();
        let mut counts = [v8b.cell_count(), v8bp.cell_count()];
        counts.sort();
        assert_eq!(counts, [48, 52]);
        for v in [&v8b, &v8bp] {
            let r = v.bbox().unwrap();
            assert_eq!((r.width(), r.height()), (17, 14));
            assert!(v.is_binary());
        }
    }

    #[test]
    fn minimal_and_boundary_ghosts_are_ghosts() {
        for family in Family::ALL {
            for n in 1..=14 {
                let ds = minimal_directions(family, n).unwrap();
                let u = minimal_ghost(family, n).unwrap();
                assert_eq!(u.cell_count(), 1 << n);
                assert_eq!(u.total(), 0);
                assert!(u.is_ghost_for(&ds));
            }
            for n in 2..=10 {
                let recipe = GhostRecipe::boundary(family, n).unwrap();
                let v = build_ghost(&recipe).unwrap().ghost;
                assert!(v.is_ghost_for(&recipe.zero_directions()));
            }
        }
    }

    #[test]
    fn column_uniform_families() {
        let col = dir(0, 1);
        for n in 2..=10 {
            assert!(column_uniform(&minimal_ghost(Family::A, n).unwrap(), col));
            assert!(column_uniform(&minimal_ghost(Family::APrime, n).unwrap(), col));
            let ub = minimal_ghost(Family::B, n).unwrap();
            assert!(column_uniform(&ub, dir(-1, 1)));
            assert!(column_uniform(&ub, dir(1, 1)));
        }
        // U_7^b is chequered, so vertical columns mix signs.
        assert!(!column_uniform(&minimal_ghost(Family::B, 7).unwrap(), col));
        let single = SignedGrid::from_cells([(pt(0, 0), 1)]);
        assert!(column_uniform(&single, dir(2, 1)));
    }

    #[test]
    fn family_transform_relation_holds() {
        for n in 3..=14 {
            assert!(family_transform_check(n).unwrap());
        }
        assert!(family_transform_check(2).is_err());
        // Spot values: n=7, b (2,5) vs a (7,5) and a' (-3,5).
        let a = minimal_directions(Family::A, 7).unwrap();
        let b = minimal_directions(Family::B, 7).unwrap();
        assert_eq!(b[6].p(), a[6].p() - a[6].q());
    }

    #[test]
    fn ten_direction_demo_ghost() {
        let dirs10 = crate::lattice::s10_directions();
        let recipe = GhostRecipe {
            start_tile: SignedGrid::from_cells([(pt(0, 0), 1)]),
            shifts: dirs10.iter().map(|d| d.vec()).collect(),
            boundary_direction: None,
            family: None,
        };
        let report = build_ghost(&recipe).unwrap();
        let s10 = &report.ghost;
        // 40 non-zero pixels in a 17 by 17 box, zero sums in all
        // 10 directions, 20 of each sign.
        assert_eq!(s10.cell_count(), 40);
        let r = s10.bbox().unwrap();
        assert_eq!((r.width(), r.height()), (17, 17));
        assert!(s10.is_ghost_for(&dirs10));
        assert!(s10.is_binary());
        assert_eq!(s10.iter().filter(|&(_, v)| v == 1).count(), 20);
        // A direction outside the set sees nonzero sums.
        assert!(!s10.is_ghost_for(&[dir(1, 5)]));
        // Overwrites do occur in this build.
        assert!(!report.all_overwrite_free());
    }

    /// The twelve-cell 3x6 signed start tile, columns uniformly signed.
    pub(crate) fn twelve_cell_demo_tile() -> SignedGrid {
        SignedGrid::from_cells([
            (pt(2, 5), 1),
            (pt(1, 4), -1),
            (pt(2, 4), 1),
            (pt(0, 3), 1),
            (pt(1, 3), -1),
            (pt(2, 3), 1),
            (pt(0, 2), 1),
            (pt(1, 2), -1),
            (pt(2, 2), 1),
            (pt(0, 1), 1),
            (pt(1, 1), -1),
            (pt(0, 0), 1),
        ])
    }

    #[test]
    fn twelve_cell_tile_build() {
        let tile = twelve_cell_demo_tile();
        assert_eq!(tile.cell_count(), 12);
        // v2 = (-3,-3) is deliberately non-primitive: with an arbitrary
        // start tile the shifts need not be co-prime pairs.
        let shifts = vecs(&[(1, -3), (-3, -3), (-5, 3), (1, 9), (11, 3)]);
        for k in 2..5 {
            assert_eq!(shifts[k], shifts[k - 1] - shifts[k - 2].scaled(2));
        }
        let recipe = GhostRecipe {
            start_tile: tile,
            shifts,
            boundary_direction: None,
            family: None,
        };
        let report = build_ghost(&recipe).unwrap();
        assert!(report.all_overwrite_free());
        let g = report.ghost;
        // 12 * 2^5 cells in a 24 x 27 box.
        assert_eq!(g.cell_count(), 384);
        let r = g.bbox().unwrap();
        assert_eq!((r.width(), r.height()), (24, 27));
        assert!(g.is_ghost_for(&recipe.zero_directions()));

        // Adding boundary (0,1) gives 52 pixels in 24 x 28.
        let recipe = GhostRecipe {
            boundary_direction: Some(dir(0, 1)),
            ..recipe
        };
        let v = build_ghost(&recipe).unwrap().ghost;
        assert_eq!(v.cell_count(), 52);
        let r = v.bbox().unwrap();
        assert_eq!((r.width(), r.height()), (24, 28));
        assert!(v.is_ghost_for(&recipe.zero_directions()));
    }

    #[test]
    fn signed_tile_dilation_pattern() {
        // The signed 8-cell tile dilated by (3,1): a 16-cell pattern
        // with zero line sums along (3,1).
        let tile = SignedGrid::from_cells([
            (pt(1, 2), 1),
            (pt(2, 2), -1),
            (pt(0, 1), 1),
            (pt(1, 1), 1),
            (pt(2, 1), -1),
            (pt(3, 1), 1),
            (pt(4, 1), -1),
            (pt(2, 0), 1),
        ]);
        let out = dilate(&tile, Vec2::new(3, 1));
        assert_eq!(out.cell_count(), 16);
        assert!(out.is_ghost_for(&[dir(3, 1)]));
        let expected = SignedGrid::from_cells([
            (pt(4, 3), -1),
            (pt(5, 3), 1),
            (pt(1, 2), 1),
            (pt(2, 2), -1),
            (pt(3, 2), -1),
            (pt(4, 2), -1),
            (pt(5, 2), 1),
            (pt(6, 2), -1),
            (pt(7, 2), 1),
            (pt(0, 1), 1),
            (pt(1, 1), 1),
            (pt(2, 1), -1),
            (pt(3, 1), 1),
            (pt(4, 1), -1),
            (pt(5, 1), -1),
            (pt(2, 0), 1),
        ]);
        assert_eq!(out, expected);
    }

    #[test]
    fn strict_build_rejects_overwrites() {
        let recipe = GhostRecipe {
            start_tile: SignedGrid::from_cells([(pt(0, 0), 1)]),
            shifts: vecs(&[(1, 0), (1, 0)]),
            boundary_direction: None,
            family: Some(Family::A),
        };
        match build_ghost(&recipe) {
            Err(BuildError::Overwrite { step: 2, .. }) => {}
            other => panic!("expected overwrite at step 2, got {other:?}"),
        }
    }

    #[test]
    fn recursion_string_round_trips() {
        let recipe = GhostRecipe::boundary(Family::A, 8).unwrap();
        assert_eq!(recipe.recursion_string(), "-----");
    }

    #[test]
    fn manifest_round_trips() {
        let recipe = GhostRecipe::boundary(Family::B, 6).unwrap();
        let text = recipe.manifest_text();
        let back = GhostRecipe::from_manifest_text(&text).unwrap();
        assert_eq!(back.shifts, recipe.shifts);
        assert_eq!(back.family, recipe.family);
        assert_eq!(back.boundary_direction, recipe.boundary_direction);
        assert_eq!(back.start_tile, recipe.start_tile);
        assert_eq!(
            build_ghost(&back).unwrap().ghost,
            build_ghost(&recipe).unwrap().ghost
        );

        // Arbitrary-tile manifests round trip too.
        let arb = twelve_cell_demo_tile();
        let recipe = GhostRecipe {
            start_tile: arb,
            shifts: vecs(&[(1, -3), (-3, -3)]),
            boundary_direction: None,
            family: None,
        };
        let back = GhostRecipe::from_manifest_text(&recipe.manifest_text()).unwrap();
        assert_eq!(back.shifts, recipe.shifts);
        assert_eq!(back.start_tile, recipe.start_tile);

        // Tampered family manifests are rejected.
        let mut text = GhostRecipe::boundary(Family::A, 5).unwrap().manifest_text();
        text = text.replace("shift 1 1", "shift 2 1");
        assert!(matches!(
            GhostRecipe::from_manifest_text(&text),
            Err(BuildError::BadManifest(_))
        ));
    }
}
