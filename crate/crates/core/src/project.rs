//! Discrete projection transforms (Mojette and finite Radon) and the
//! Katz sufficiency criterion.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::imageio::Image8;
use crate::lattice::{Direction, Point, SignedGrid};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProjectError {
    #[error("{0} is not prime")]
    NotPrime(usize),
    #[error("image is {w}x{h}; the transform needs a {p}x{p} frame")]
    SizeMismatch { p: usize, w: usize, h: usize },
    #[error("grid cells fall outside the {p}x{p} frame")]
    GridOutsideFrame { p: usize },
    #[error("projection sets do not match: {0}")]
    MismatchedSets(String),
    #[error("direction component |{0}| too large for modulus {1}")]
    ComponentTooLarge(i64, usize),
}

/// One Mojette projection: sums of pixels grouped by the line offset
/// t = q*x - p*y over a contiguous bin range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MojetteProjection {
    pub direction: Direction,
    pub t_min: i64,
    pub bins: Vec<i64>,
}

impl MojetteProjection {
    pub fn bin(&self, t: i64) -> i64 {
        let idx = t - self.t_min;
        if idx < 0 || idx as usize >= self.bins.len() {
            0
        } else {
            self.bins[idx as usize]
        }
    }

    pub fn sum(&self) -> i64 {
        self.bins.iter().sum()
    }

    pub fn max_abs(&self) -> i64 {
        self.bins.iter().map(|b| b.abs()).max().unwrap_or(0)
    }

    pub fn min_abs(&self) -> i64 {
        self.bins.iter().map(|b| b.abs()).min().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.bins.iter().all(|&b| b == 0)
    }

    /// CSV row: `p,q,t_min,bin0,bin1,...`
    pub fn to_csv_row(&self) -> String {
        let mut row = format!(
            "{},{},{}",
            self.direction.p(),
            self.direction.q(),
            self.t_min
        );
        for b in &self.bins {
            row.push(',');
            row.push_str(&b.to_string());
        }
        row
    }
}

/// Mojette projection of an 8-bit image. Image coordinates are
/// (x, y) = (column, row); bin count is (w-1)|q| + (h-1)|p| + 1.
pub fn mojette(img: &Image8, d: Direction) -> MojetteProjection {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let (p, q) = (d.p(), d.q());
    let corners = [(0, 0), (w - 1, 0), (0, h - 1), (w - 1, h - 1)];
    let t_min = corners.iter().map(|&(x, y)| q * x - p * y).min().unwrap_or(0);
    let count = ((w - 1) * q.abs() + (h - 1) * p.abs() + 1) as usize;
    let mut bins = vec![0i64; count];
    for y in 0..h {
        let row = &img.samples()[(y as usize * img.width())..((y as usize + 1) * img.width())];
        for (x, &s) in row.iter().enumerate() {
            let t = q * x as i64 - p * y;
            bins[(t - t_min) as usize] += s as i64;
        }
    }
    MojetteProjection {
        direction: d,
        t_min,
        bins,
    }
}

/// Mojette projection of a signed grid, binned over its bounding box.
pub fn mojette_grid(g: &SignedGrid, d: Direction) -> MojetteProjection {
    let (p, q) = (d.p(), d.q());
    let Some(r) = g.bbox() else {
        return MojetteProjection {
            direction: d,
            t_min: 0,
            bins: Vec::new(),
        };
    };
    let corners = [
        (r.min_x, r.min_y),
        (r.max_x, r.min_y),
        (r.min_x, r.max_y),
        (r.max_x, r.max_y),
    ];
    let t_min = corners.iter().map(|&(x, y)| q * x - p * y).min().unwrap();
    let t_max = corners.iter().map(|&(x, y)| q * x - p * y).max().unwrap();
    let mut bins = vec![0i64; (t_max - t_min + 1) as usize];
    for (pt, v) in g.iter() {
        bins[(d.line_offset(pt) - t_min) as usize] += v;
    }
    MojetteProjection {
        direction: d,
        t_min,
        bins,
    }
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Finite Radon transform of a p x p array, p prime: p wrapped-slope
/// rows (row m bins the lines y = m*x + t mod p) plus a final column-sum
/// row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrtSinogram {
    pub p: usize,
    /// p + 1 rows, each of length p.
    pub rows: Vec<Vec<i64>>,
}

impl FrtSinogram {
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn zero_rows(&self) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.iter().all(|&b| b == 0))
            .map(|(m, _)| m)
            .collect()
    }

    /// CSV row for slope index m: `m,bin0,bin1,...`
    pub fn to_csv_row(&self, m: usize) -> String {
        let mut row = m.to_string();
        for b in &self.rows[m] {
            row.push(',');
            row.push_str(&b.to_string());
        }
        row
    }
}

fn frt_from_cells<I>(p: usize, cells: I) -> FrtSinogram
where
    I: Iterator<Item = (usize, usize, i64)>,
{
    let mut rows = vec![vec![0i64; p]; p + 1];
    for (x, y, v) in cells {
        if v == 0 {
            continue;
        }
        for (m, row) in rows.iter_mut().take(p).enumerate() {
            // t = y - m*x mod p, so the cell lies on line y = m*x + t.
            let t = (y + (p - 1) * ((m * x) % p)) % p;
            row[t] += v;
        }
        rows[p][x] += v;
    }
    FrtSinogram { p, rows }
}

/// FRT of a square prime-sized image.
pub fn frt(img: &Image8) -> Result<FrtSinogram, ProjectError> {
    let p = img.width();
    if img.height() != p {
        return Err(ProjectError::SizeMismatch {
            p,
            w: img.width(),
            h: img.height(),
        });
    }
    if !is_prime(p) {
        return Err(ProjectError::NotPrime(p));
    }
    let cells = (0..p).flat_map(|y| (0..p).map(move |x| (x, y)));
    Ok(frt_from_cells(
        p,
        cells.map(|(x, y)| (x, y, img.get(x, y) as i64)),
    ))
}

/// FRT of a signed grid whose cells must already lie inside the frame.
pub fn frt_grid(g: &SignedGrid, p: usize) -> Result<FrtSinogram, ProjectError> {
    if !is_prime(p) {
        return Err(ProjectError::NotPrime(p));
    }
    let inside = g
        .support()
        .all(|pt| pt.x >= 0 && pt.y >= 0 && (pt.x as usize) < p && (pt.y as usize) < p);
    if !inside {
        return Err(ProjectError::GridOutsideFrame { p });
    }
    Ok(frt_from_cells(
        p,
        g.iter().map(|(pt, v)| (pt.x as usize, pt.y as usize, v)),
    ))
}

/// The FRT row index carrying the lines parallel to d: the unique m with
/// q = m*p (mod p), or the column-sum row for vertical directions.
pub fn direction_to_frt_row(d: Direction, p: usize) -> Result<usize, ProjectError> {
    if !is_prime(p) {
        return Err(ProjectError::NotPrime(p));
    }
    for c in [d.p(), d.q()] {
        if c.unsigned_abs() as usize >= p {
            return Err(ProjectError::ComponentTooLarge(c, p));
        }
    }
    let pm = d.p().rem_euclid(p as i64) as usize;
    if pm == 0 {
        return Ok(p);
    }
    let qm = d.q().rem_euclid(p as i64) as usize;
    Ok((qm * mod_inverse(pm, p)) % p)
}

fn mod_inverse(a: usize, p: usize) -> usize {
    // a^(p-2) mod p for prime p.
    let mut result = 1u64;
    let mut base = (a % p) as u64;
    let mut exp = p - 2;
    let m = p as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    result as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KatzMode {
    /// Uniqueness when either component sum reaches the frame: no ghost
    /// box fits. The default.
    Standard,
    /// The conjunctive reading: uniqueness only when both sums reach the
    /// frame. Kept for comparison.
    Conjunctive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KatzOutcome {
    Unique,
    GhostFits,
}

/// Whether a direction set admits a ghost inside an nx x ny frame. The
/// ghost box is (1 + sum|p|) x (1 + sum|q|); it fits iff both sums stay
/// strictly below the frame dimensions.
pub fn katz_unique(dirs: &[Direction], nx: i64, ny: i64, mode: KatzMode) -> KatzOutcome {
    let sp: i64 = dirs.iter().map(|d| d.p().abs()).sum();
    let sq: i64 = dirs.iter().map(|d| d.q().abs()).sum();
    let unique = match mode {
        KatzMode::Standard => sp >= nx || sq >= ny,
        KatzMode::Conjunctive => sp >= nx && sq >= ny,
    };
    if unique {
        KatzOutcome::Unique
    } else {
        KatzOutcome::GhostFits
    }
}

/// Per-direction maximum absolute bin difference between two Mojette
/// projection sets over the same directions.
pub fn projection_max_abs_diff(
    a: &[MojetteProjection],
    b: &[MojetteProjection],
) -> Result<Vec<(Direction, i64)>, ProjectError> {
    if a.len() != b.len() {
        return Err(ProjectError::MismatchedSets(format!(
            "{} vs {} projections",
            a.len(),
            b.len()
        )));
    }
    let mut out = Vec::with_capacity(a.len());
    for (pa, pb) in a.iter().zip(b) {
        if pa.direction != pb.direction {
            return Err(ProjectError::MismatchedSets(format!(
                "direction {} vs {}",
                pa.direction, pb.direction
            )));
        }
        let lo = pa.t_min.min(pb.t_min);
        let hi = (pa.t_min + pa.bins.len() as i64).max(pb.t_min + pb.bins.len() as i64);
        let diff = (lo..hi)
            .map(|t| (pa.bin(t) - pb.bin(t)).abs())
            .max()
            .unwrap_or(0);
        out.push((pa.direction, diff));
    }
    Ok(out)
}

/// Per-row maximum absolute bin difference between two sinograms.
pub fn frt_max_abs_diff(a: &FrtSinogram, b: &FrtSinogram) -> Result<Vec<i64>, ProjectError> {
    if a.p != b.p {
        return Err(ProjectError::MismatchedSets(format!(
            "modulus {} vs {}",
            a.p, b.p
        )));
    }
    Ok(a.rows
        .iter()
        .zip(&b.rows)
        .map(|(ra, rb)| {
            ra.iter()
                .zip(rb)
                .map(|(x, y)| (x - y).abs())
                .max()
                .unwrap_or(0)
        })
        .collect())
}

/// Canonical co-prime directions with |p| + |q| = s, sorted by angle.
fn farey_shell(s: i64) -> Vec<Direction> {
    let mut out = Vec::new();
    for p in 0..=s {
        let rem = s - p;
        let qs: &[i64] = if rem == 0 {
            &[0]
        } else if p == 0 {
            &[rem]
        } else {
            &[rem, -rem]
        };
        for &q in qs {
            if let Ok(d) = Direction::new(p, q) {
                if d == d.canonical() {
                    out.push(d);
                }
            }
        }
    }
    out.sort_by(|a, b| {
        let aa = (a.q() as f64).atan2(a.p() as f64);
        let ab = (b.q() as f64).atan2(b.p() as f64);
        aa.partial_cmp(&ab).expect("finite")
    });
    out
}

/// Deterministic sufficient angle set: the canonicalized must-include
/// directions extended with the shortest unused co-prime directions
/// (shells of growing |p| + |q|, ties by angle) until both component
/// sums reach the frame dimensions.
pub fn sufficient_angle_set(nx: i64, ny: i64, must_include: &[Direction]) -> Vec<Direction> {
    let mut set: Vec<Direction> = Vec::new();
    let mut seen: BTreeSet<(i64, i64)> = BTreeSet::new();
    for d in must_include {
        let c = d.canonical();
        if seen.insert((c.p(), c.q())) {
            set.push(c);
        }
    }
    let sums = |set: &[Direction]| {
        (
            set.iter().map(|d| d.p().abs()).sum::<i64>(),
            set.iter().map(|d| d.q().abs()).sum::<i64>(),
        )
    };
    let mut s = 1;
    loop {
        let (sp, sq) = sums(&set);
        if sp >= nx && sq >= ny {
            return set;
        }
        for d in farey_shell(s) {
            if seen.insert((d.p(), d.q())) {
                set.push(d);
                let (sp, sq) = sums(&set);
                if sp >= nx && sq >= ny {
                    return set;
                }
            }
        }
        s += 1;
    }
}

/// Adds a grid's cells into an image frame at the given offset, returning
/// None when a cell lands outside or a sample leaves 0..=255.
pub fn add_grid_to_image(img: &Image8, g: &SignedGrid, offset: Point) -> Option<Image8> {
    let mut out = img.clone();
    for (pt, v) in g.iter() {
        let x = pt.x + offset.x;
        let y = pt.y + offset.y;
        if x < 0 || y < 0 || x as usize >= img.width() || y as usize >= img.height() {
            return None;
        }
        let s = out.get(x as usize, y as usize) as i64 + v;
        if !(0..=255).contains(&s) {
            return None;
        }
        out.set(x as usize, y as usize, s as u8);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{boundary_ghost, minimal_directions, Family, GhostRecipe};
    use crate::lattice::{box_size, Vec2};
    use proptest::prelude::*;

    fn dir(p: i64, q: i64) -> Direction {
        Direction::new(p, q).unwrap()
    }

    #[test]
    fn mojette_bin_counts() {
        let img = Image8::new(131, 131, 0);
        assert_eq!(mojette(&img, dir(0, 1)).bins.len(), 131);
        assert_eq!(mojette(&img, dir(1, 0)).bins.len(), 131);
        // |p| + |q| = 12 gives the longest projections: 130 * 12 + 1.
        assert_eq!(mojette(&img, dir(5, 7)).bins.len(), 1561);
        assert_eq!(mojette(&img, dir(7, -5)).bins.len(), 1561);
    }

    #[test]
    fn mojette_antidiagonal_counts() {
        let img = Image8::new(3, 3, 1);
        let proj = mojette(&img, dir(1, 1));
        assert_eq!(proj.bins, vec![1, 2, 3, 2, 1]);
        assert_eq!(proj.sum(), img.total());
    }

    #[test]
    fn mojette_grid_zeroes_ghost_directions() {
        let v8a = boundary_ghost(Family::A, 8).unwrap();
        for d in minimal_directions(Family::A, 7).unwrap() {
            assert!(mojette_grid(&v8a, d).is_zero());
        }
        let off = mojette_grid(&v8a, dir(2, 1));
        assert!(!off.is_zero());
        assert_eq!(off.sum(), 0);
    }

    #[test]
    fn frt_delta_image_hits_every_row_once() {
        let mut img = Image8::new(7, 7, 0);
        img.set(0, 0, 1);
        let sino = frt(&img).unwrap();
        assert_eq!(sino.row_count(), 8);
        for row in &sino.rows {
            assert_eq!(row.iter().filter(|&&b| b != 0).count(), 1);
            assert_eq!(row.iter().sum::<i64>(), 1);
        }
    }

    #[test]
    fn frt_rejects_bad_frames() {
        assert_eq!(
            frt(&Image8::new(6, 6, 0)).unwrap_err(),
            ProjectError::NotPrime(6)
        );
        assert!(matches!(
            frt(&Image8::new(7, 5, 0)).unwrap_err(),
            ProjectError::SizeMismatch { .. }
        ));
        let g = SignedGrid::from_cells([(Point::new(10, 0), 1)]);
        assert_eq!(
            frt_grid(&g, 7).unwrap_err(),
            ProjectError::GridOutsideFrame { p: 7 }
        );
    }

    #[test]
    fn frt_rows_conserve_mass() {
        let mut img = Image8::new(7, 7, 0);
        let mut state = 11u64;
        for y in 0..7 {
            for x in 0..7 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                img.set(x, y, (state >> 56) as u8);
            }
        }
        let total = img.total();
        let sino = frt(&img).unwrap();
        for row in &sino.rows {
            assert_eq!(row.iter().sum::<i64>(), total);
        }
    }

    #[test]
    fn direction_rows_and_ghost_zero_rows() {
        assert_eq!(direction_to_frt_row(dir(1, 0), 7).unwrap(), 0);
        assert_eq!(direction_to_frt_row(dir(0, 1), 7).unwrap(), 7);
        assert_eq!(direction_to_frt_row(dir(1, 1), 7).unwrap(), 1);
        // A (1,1)-ghost's sinogram is zero exactly on row 1.
        let g = SignedGrid::from_cells([(Point::new(0, 0), 1), (Point::new(1, 1), -1)]);
        let sino = frt_grid(&g, 7).unwrap();
        assert_eq!(sino.zero_rows(), vec![1]);
    }

    #[test]
    fn v8a_in_prime_frame_zeroes_exactly_eight_rows() {
        let recipe = GhostRecipe::boundary(Family::A, 8).unwrap();
        let v8a = crate::builder::build_ghost(&recipe).unwrap().ghost;
        let r = v8a.bbox().unwrap();
        let moved = v8a.shift(Vec2::new(30 - r.min_x, 30 - r.min_y));
        let sino = frt_grid(&moved, 131).unwrap();
        let zero = sino.zero_rows();
        assert_eq!(zero.len(), 8);
        let expected: std::collections::BTreeSet<usize> = recipe
            .zero_directions()
            .iter()
            .map(|d| direction_to_frt_row(*d, 131).unwrap())
            .collect();
        assert_eq!(
            zero.into_iter().collect::<std::collections::BTreeSet<_>>(),
            expected
        );
    }

    #[test]
    fn katz_modes() {
        let dirs = [dir(131, 1), dir(0, 1)];
        assert_eq!(
            katz_unique(&dirs, 131, 131, KatzMode::Standard),
            KatzOutcome::Unique
        );
        assert_eq!(
            katz_unique(&dirs, 131, 131, KatzMode::Conjunctive),
            KatzOutcome::GhostFits
        );
        assert_eq!(
            katz_unique(&[dir(1, 0)], 2, 2, KatzMode::Standard),
            KatzOutcome::GhostFits
        );
        // The ten-direction example set exactly fills a 17x17 box.
        let ten = crate::lattice::s10_directions();
        assert_eq!(
            katz_unique(&ten, 17, 17, KatzMode::Standard),
            KatzOutcome::GhostFits
        );
        assert_eq!(
            katz_unique(&ten, 16, 17, KatzMode::Standard),
            KatzOutcome::Unique
        );
    }

    #[test]
    fn katz_agrees_with_built_ghost_boxes() {
        // Every nonempty subset of six demo directions: the built ghost
        // fits a frame iff the criterion says a ghost fits.
        let all = crate::lattice::s10_directions();
        let base = &all[..6];
        for mask in 1u32..(1 << 6) {
            let dirs: Vec<Direction> = (0..6)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| base[i])
                .collect();
            let recipe = GhostRecipe {
                start_tile: SignedGrid::from_cells([(Point::new(0, 0), 1)]),
                shifts: dirs.iter().map(|d| d.vec()).collect(),
                boundary_direction: None,
                family: None,
            };
            let ghost = crate::builder::build_ghost(&recipe).unwrap().ghost;
            let bs = box_size(&dirs).unwrap();
            if let Some(r) = ghost.bbox() {
                assert!(r.width() <= bs.a && r.height() <= bs.b);
            }
            assert!(ghost.is_ghost_for(&dirs));
            for (nx, ny) in [(5i64, 5i64), (9, 7), (12, 12)] {
                let fits = bs.a <= nx && bs.b <= ny;
                let verdict = katz_unique(&dirs, nx, ny, KatzMode::Standard);
                assert_eq!(
                    verdict == KatzOutcome::GhostFits,
                    fits,
                    "dirs {dirs:?} frame {nx}x{ny}"
                );
            }
        }
    }

    #[test]
    fn diff_is_zero_on_identical_sets() {
        let img = Image8::new(9, 9, 77);
        let dirs = [dir(1, 0), dir(1, 2)];
        let a: Vec<_> = dirs.iter().map(|d| mojette(&img, *d)).collect();
        let b = a.clone();
        for (_, diff) in projection_max_abs_diff(&a, &b).unwrap() {
            assert_eq!(diff, 0);
        }
        let mismatched = vec![mojette(&img, dir(1, 0))];
        assert!(projection_max_abs_diff(&a, &mismatched).is_err());
    }

    #[test]
    fn sufficient_set_meets_thresholds() {
        let must = [dir(1, 0), dir(0, 1)];
        let set = sufficient_angle_set(20, 20, &must);
        assert_eq!(&set[..2], &[dir(1, 0), dir(0, 1)]);
        let sp: i64 = set.iter().map(|d| d.p().abs()).sum();
        let sq: i64 = set.iter().map(|d| d.q().abs()).sum();
        assert!(sp >= 20 && sq >= 20);
        assert_eq!(
            katz_unique(&set, 20, 20, KatzMode::Standard),
            KatzOutcome::Unique
        );
        // Already-sufficient include list is returned as-is.
        let big = [dir(25, 1), dir(1, 25)];
        assert_eq!(sufficient_angle_set(20, 20, &big), big.to_vec());
        // Deterministic.
        assert_eq!(set, sufficient_angle_set(20, 20, &must));
    }

    #[test]
    fn sufficient_set_for_watermark_frame() {
        let recipe = GhostRecipe::boundary(Family::A, 8).unwrap();
        let ghost_dirs = recipe.zero_directions();
        let set = sufficient_angle_set(131, 131, &ghost_dirs);
        for (i, d) in ghost_dirs.iter().enumerate() {
            assert_eq!(set[i], d.canonical());
        }
        assert!(set.len() < 60, "greedy set stays small, got {}", set.len());
    }

    proptest! {
        #[test]
        fn mojette_linearity_on_grids(
            cells_a in proptest::collection::vec(((-9i64..9, -9i64..9), -3i64..=3), 1..25),
            cells_b in proptest::collection::vec(((-9i64..9, -9i64..9), -3i64..=3), 1..25),
        ) {
            let ga = SignedGrid::from_cells(cells_a.into_iter().map(|((x, y), v)| (Point::new(x, y), v)));
            let gb = SignedGrid::from_cells(cells_b.into_iter().map(|((x, y), v)| (Point::new(x, y), v)));
            let d = dir(2, -1);
            let sum = ga.add(&gb);
            let ps = mojette_grid(&sum, d);
            let pa = mojette_grid(&ga, d);
            let pb = mojette_grid(&gb, d);
            for t in -40..40 {
                prop_assert_eq!(ps.bin(t), pa.bin(t) + pb.bin(t));
            }
        }

        #[test]
        fn mojette_mass_conservation(w in 1usize..9, h in 1usize..9, seed in any::<u64>(), p in -4i64..=4, q in -4i64..=4) {
            prop_assume!(Direction::new(p, q).is_ok());
            let d = Direction::new(p, q).unwrap();
            let mut img = Image8::new(w, h, 0);
            let mut state = seed | 1;
            for y in 0..h {
                for x in 0..w {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                    img.set(x, y, (state >> 56) as u8);
                }
            }
            prop_assert_eq!(mojette(&img, d).sum(), img.total());
        }
    }
}
