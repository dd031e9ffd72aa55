//! Fragile ghost watermarks: embedding inflated boundary ghosts into
//! 8-bit images and verifying authenticity via projection-difference
//! signatures.
//!
//! Adding a ghost leaves every projection along its zero directions
//! bit-identical while perturbing all others, so a record of the original
//! image's projection extrema at the ghost angles (and at the rotated
//! angles, after removing the declared ghost) pins the image content.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::imageio::Image8;
use crate::lattice::{Direction, Point, SignedGrid, Vec2};
use crate::project::{
    direction_to_frt_row, frt, mojette, projection_max_abs_diff, sufficient_angle_set,
    MojetteProjection, ProjectError,
};

#[derive(Debug, Error, PartialEq)]
pub enum WatermarkError {
    #[error("empty ghost")]
    EmptyGhost,
    #[error("ghost does not fit the {w}x{h} frame at offset ({ox}, {oy})")]
    GhostOutsideFrame { w: usize, h: usize, ox: i64, oy: i64 },
    #[error("{count} pixels leave 0..=255 when embedding; first at ({x}, {y})")]
    RangeViolation { count: usize, x: i64, y: i64 },
    #[error("record frame {rw}x{rh} does not match image {iw}x{ih}")]
    FrameMismatch { rw: usize, rh: usize, iw: usize, ih: usize },
    #[error("no feasible placement for this ghost in the frame")]
    NoFeasibleOffset,
    #[error("mask dimensions do not match the image")]
    MaskMismatch,
    #[error("malformed watermark record: {0}")]
    BadRecord(String),
    #[error("ghost has a nonzero line sum along claimed direction {dir}")]
    NotAGhostFor { dir: Direction },
    #[error(transparent)]
    Project(#[from] ProjectError),
}

/// Which projection family the record stores extrema for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Mt,
    Frt,
}

/// max|bin| and min|bin| of one projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Extrema {
    pub max_abs: i64,
    pub min_abs: i64,
}

fn extrema_of(p: &MojetteProjection) -> Extrema {
    Extrema {
        max_abs: p.max_abs(),
        min_abs: p.min_abs(),
    }
}

/// Everything needed to verify a watermarked image later: the declared
/// ghost (replayable cell list plus free-text provenance), its placement,
/// the original image's total sum, and projection extrema at the ghost
/// angles and at the quarter-turned ghost angles.
#[derive(Debug, Clone, PartialEq)]
pub struct WatermarkRecord {
    pub manifest: String,
    pub ghost: SignedGrid,
    pub placement: Vec2,
    pub ghost_directions: Vec<Direction>,
    pub transform: TransformKind,
    pub frame_width: usize,
    pub frame_height: usize,
    pub total_sum: i64,
    pub recorded_extrema: Vec<(Direction, Extrema)>,
    pub rotated_extrema: Vec<(Direction, Extrema)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Authentic,
    Tampered,
    ReMarked,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// Per ghost direction: deviation of the test image's projection
    /// extrema from the recorded ones. All zero for an authentic copy.
    pub ghost_angle_diffs: Vec<(Direction, i64)>,
    /// Per rotated direction: deviation after removing the declared
    /// ghost. Nonzero entries expose a second overlaid ghost.
    pub rotated_diffs: Vec<(Direction, i64)>,
    /// Signature pattern over the comparison set: max abs projection
    /// difference between the test image and its de-watermarked replay.
    /// Zero exactly at ghost angles when the declared ghost is present.
    pub other_angle_diffs: Vec<(Direction, i64)>,
    pub sum_match: bool,
    pub extrema_match: bool,
    pub verdict: Verdict,
}

fn canonical_dedup(dirs: &[Direction]) -> Vec<Direction> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for d in dirs {
        let c = d.canonical();
        if seen.insert((c.p(), c.q())) {
            out.push(c);
        }
    }
    out
}

fn rotated_directions(dirs: &[Direction]) -> Vec<Direction> {
    canonical_dedup(&dirs.iter().map(|d| d.rotated90()).collect::<Vec<_>>())
}

/// Projection extrema of an image at each direction, via the transform
/// the record declares. For the periodic transform the extrema come from
/// the sinogram row the direction maps to.
fn extrema_for(
    img: &Image8,
    dirs: &[Direction],
    transform: TransformKind,
) -> Result<Vec<(Direction, Extrema)>, WatermarkError> {
    match transform {
        TransformKind::Mt => Ok(dirs
            .iter()
            .map(|d| (*d, extrema_of(&mojette(img, *d))))
            .collect()),
        TransformKind::Frt => {
            let sino = frt(img)?;
            dirs.iter()
                .map(|d| {
                    let row = direction_to_frt_row(*d, sino.p)?;
                    let bins = &sino.rows[row];
                    Ok((
                        *d,
                        Extrema {
                            max_abs: bins.iter().map(|b| b.abs()).max().unwrap_or(0),
                            min_abs: bins.iter().map(|b| b.abs()).min().unwrap_or(0),
                        },
                    ))
                })
                .collect()
        }
    }
}

/// Adds the ghost into the image at `offset`. Fails if any cell leaves
/// the frame or any sample would wrap outside 0..=255; the error reports
/// the offending pixel count and the first location.
fn apply_ghost(
    img: &Image8,
    ghost: &SignedGrid,
    offset: Vec2,
    sign: i64,
) -> Result<Image8, WatermarkError> {
    let (w, h) = (img.width(), img.height());
    let mut out = img.clone();
    let mut violations = Vec::new();
    for (pt, v) in ghost.iter() {
        let x = pt.x + offset.x;
        let y = pt.y + offset.y;
        if x < 0 || y < 0 || x as usize >= w || y as usize >= h {
            return Err(WatermarkError::GhostOutsideFrame {
                w,
                h,
                ox: offset.x,
                oy: offset.y,
            });
        }
        let s = out.get(x as usize, y as usize) as i64 + sign * v;
        if (0..=255).contains(&s) {
            out.set(x as usize, y as usize, s as u8);
        } else {
            violations.push((x, y));
        }
    }
    if let Some(&(x, y)) = violations.first() {
        return Err(WatermarkError::RangeViolation {
            count: violations.len(),
            x,
            y,
        });
    }
    Ok(out)
}

/// Embeds a ghost and returns the watermarked image plus the record
/// populated from the pre-embedding image.
pub fn embed(
    img: &Image8,
    ghost: &SignedGrid,
    ghost_dirs: &[Direction],
    offset: Vec2,
    transform: TransformKind,
    manifest: String,
) -> Result<(Image8, WatermarkRecord), WatermarkError> {
    if ghost.is_empty() {
        return Err(WatermarkError::EmptyGhost);
    }
    for d in ghost_dirs {
        if !ghost.is_ghost_for(&[*d]) {
            return Err(WatermarkError::NotAGhostFor { dir: *d });
        }
    }
    let marked = apply_ghost(img, ghost, offset, 1)?;
    let dirs = canonical_dedup(ghost_dirs);
    let rotated = rotated_directions(&dirs);
    let record = WatermarkRecord {
        manifest,
        ghost: ghost.clone(),
        placement: offset,
        recorded_extrema: extrema_for(img, &dirs, transform)?,
        rotated_extrema: extrema_for(img, &rotated, transform)?,
        ghost_directions: dirs,
        transform,
        frame_width: img.width(),
        frame_height: img.height(),
        total_sum: img.total(),
    };
    Ok((marked, record))
}

fn extrema_deviation(
    recorded: &[(Direction, Extrema)],
    computed: &[(Direction, Extrema)],
) -> Vec<(Direction, i64)> {
    recorded
        .iter()
        .zip(computed)
        .map(|((d, a), (_, b))| {
            (
                *d,
                (a.max_abs - b.max_abs).abs().max((a.min_abs - b.min_abs).abs()),
            )
        })
        .collect()
}

/// Verifies a test image against a record. The verdict is authentic only
/// when the image total and the ghost-angle extrema match the record and
/// removing the declared ghost restores the rotated-angle extrema; a
/// clean ghost signature with deviating rotated extrema indicates an
/// extra overlaid ghost (re-marked).
pub fn verify(
    img: &Image8,
    rec: &WatermarkRecord,
    comparison_set: Option<&[Direction]>,
) -> Result<VerificationReport, WatermarkError> {
    if img.width() != rec.frame_width || img.height() != rec.frame_height {
        return Err(WatermarkError::FrameMismatch {
            rw: rec.frame_width,
            rh: rec.frame_height,
            iw: img.width(),
            ih: img.height(),
        });
    }
    let sum_match = img.total() == rec.total_sum;
    let ghost_angle_diffs = extrema_deviation(
        &rec.recorded_extrema,
        &extrema_for(img, &rec.ghost_directions, rec.transform)?,
    );
    let extrema_match = ghost_angle_diffs.iter().all(|&(_, d)| d == 0);

    // Remove the declared ghost; a failure to subtract cleanly means the
    // watermarked samples were altered.
    let (rotated_diffs, other_angle_diffs, removal_ok) =
        match apply_ghost(img, &rec.ghost, rec.placement, -1) {
            Ok(replayed) => {
                let rot_dirs: Vec<Direction> =
                    rec.rotated_extrema.iter().map(|(d, _)| *d).collect();
                let rotated_diffs = extrema_deviation(
                    &rec.rotated_extrema,
                    &extrema_for(&replayed, &rot_dirs, rec.transform)?,
                );
                let default_set;
                let set = match comparison_set {
                    Some(s) => s,
                    None => {
                        default_set = sufficient_angle_set(
                            rec.frame_width as i64,
                            rec.frame_height as i64,
                            &rec.ghost_directions,
                        );
                        &default_set
                    }
                };
                let a: Vec<_> = set.iter().map(|d| mojette(img, *d)).collect();
                let b: Vec<_> = set.iter().map(|d| mojette(&replayed, *d)).collect();
                let sig = projection_max_abs_diff(&a, &b)?;
                (rotated_diffs, sig, true)
            }
            Err(_) => (Vec::new(), Vec::new(), false),
        };

    let rotated_match = removal_ok && rotated_diffs.iter().all(|&(_, d)| d == 0);
    let verdict = if !sum_match || !extrema_match || !removal_ok {
        Verdict::Tampered
    } else if !rotated_match {
        Verdict::ReMarked
    } else {
        Verdict::Authentic
    };
    Ok(VerificationReport {
        ghost_angle_diffs,
        rotated_diffs,
        other_angle_diffs,
        sum_match,
        extrema_match,
        verdict,
    })
}

/// Deterministic placement search: anchors scan the frame row-major; the
/// first offset with no range violations and minimal mask-weighted
/// overlap wins, earlier anchors breaking ties.
pub fn plan_placement(
    img: &Image8,
    ghost: &SignedGrid,
    mask: Option<&Image8>,
) -> Result<Vec2, WatermarkError> {
    let r = ghost.bbox().ok_or(WatermarkError::EmptyGhost)?;
    if let Some(m) = mask {
        if m.width() != img.width() || m.height() != img.height() {
            return Err(WatermarkError::MaskMismatch);
        }
    }
    let (bw, bh) = (r.width() as usize, r.height() as usize);
    if bw > img.width() || bh > img.height() {
        return Err(WatermarkError::NoFeasibleOffset);
    }
    let mut best: Option<(u64, Vec2)> = None;
    for ay in 0..=(img.height() - bh) {
        for ax in 0..=(img.width() - bw) {
            let offset = Vec2::new(ax as i64 - r.min_x, ay as i64 - r.min_y);
            let mut cost = 0u64;
            let mut feasible = true;
            for (pt, v) in ghost.iter() {
                let x = (pt.x + offset.x) as usize;
                let y = (pt.y + offset.y) as usize;
                let s = img.get(x, y) as i64 + v;
                if !(0..=255).contains(&s) {
                    feasible = false;
                    break;
                }
                if let Some(m) = mask {
                    cost += m.get(x, y) as u64;
                }
            }
            if feasible && best.map_or(true, |(c, _)| cost < c) {
                best = Some((cost, offset));
                if cost == 0 && mask.is_none() {
                    return Ok(offset);
                }
            }
        }
    }
    best.map(|(_, o)| o).ok_or(WatermarkError::NoFeasibleOffset)
}

impl TransformKind {
    fn tag(self) -> &'static str {
        match self {
            TransformKind::Mt => "mt",
            TransformKind::Frt => "frt",
        }
    }
}

impl WatermarkRecord {
    /// Line-oriented record text (.wmr).
    pub fn to_text(&self) -> String {
        let mut out = String::from("wmr v1\n");
        writeln!(out, "manifest {}", self.manifest).expect("string write");
        writeln!(out, "frame {} {}", self.frame_width, self.frame_height).unwrap();
        writeln!(out, "transform {}", self.transform.tag()).unwrap();
        writeln!(out, "placement {} {}", self.placement.x, self.placement.y).unwrap();
        writeln!(out, "sum {}", self.total_sum).unwrap();
        for (d, e) in &self.recorded_extrema {
            writeln!(out, "extrema {} {} {} {}", d.p(), d.q(), e.max_abs, e.min_abs).unwrap();
        }
        for (d, e) in &self.rotated_extrema {
            writeln!(out, "extrema-rot {} {} {} {}", d.p(), d.q(), e.max_abs, e.min_abs).unwrap();
        }
        writeln!(out, "cells {}", self.ghost.cell_count()).unwrap();
        for (pt, v) in self.ghost.iter() {
            writeln!(out, "cell {} {} {}", pt.x, pt.y, v).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, WatermarkError> {
        let bad = |msg: &str| WatermarkError::BadRecord(msg.to_string());
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some("wmr v1") {
            return Err(bad("missing 'wmr v1' header"));
        }
        let mut manifest = String::new();
        let mut frame = None;
        let mut transform = None;
        let mut placement = None;
        let mut sum = None;
        let mut extrema = Vec::new();
        let mut rotated = Vec::new();
        let mut cells: Vec<(Point, i64)> = Vec::new();
        let mut declared_cells = None;
        for line in lines {
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            let nums = || -> Vec<i64> {
                rest.split_whitespace()
                    .filter_map(|t| t.parse().ok())
                    .collect()
            };
            match key {
                "manifest" => manifest = rest.to_string(),
                "frame" => match nums()[..] {
                    [w, h] if w > 0 && h > 0 => frame = Some((w as usize, h as usize)),
                    _ => return Err(bad("bad frame line")),
                },
                "transform" => {
                    transform = Some(match rest {
                        "mt" => TransformKind::Mt,
                        "frt" => TransformKind::Frt,
                        _ => return Err(bad("unknown transform")),
                    })
                }
                "placement" => match nums()[..] {
                    [x, y] => placement = Some(Vec2::new(x, y)),
                    _ => return Err(bad("bad placement line")),
                },
                "sum" => match nums()[..] {
                    [s] => sum = Some(s),
                    _ => return Err(bad("bad sum line")),
                },
                "extrema" | "extrema-rot" => match nums()[..] {
                    [p, q, max, min] => {
                        let d = Direction::new(p, q).map_err(|e| bad(&e.to_string()))?;
                        let e = Extrema {
                            max_abs: max,
                            min_abs: min,
                        };
                        if key == "extrema" {
                            extrema.push((d, e));
                        } else {
                            rotated.push((d, e));
                        }
                    }
                    _ => return Err(bad("bad extrema line")),
                },
                "cells" => match nums()[..] {
                    [n] if n >= 0 => declared_cells = Some(n as usize),
                    _ => return Err(bad("bad cells line")),
                },
                "cell" => match nums()[..] {
                    [x, y, v] if v != 0 => cells.push((Point::new(x, y), v)),
                    _ => return Err(bad("bad cell line")),
                },
                other => return Err(bad(&format!("unknown line '{other}'"))),
            }
        }
        let (frame_width, frame_height) = frame.ok_or_else(|| bad("missing frame"))?;
        if declared_cells != Some(cells.len()) {
            return Err(bad("cell count mismatch"));
        }
        let ghost_directions: Vec<Direction> = extrema.iter().map(|(d, _)| *d).collect();
        Ok(WatermarkRecord {
            manifest,
            ghost: SignedGrid::from_cells(cells),
            placement: placement.ok_or_else(|| bad("missing placement"))?,
            ghost_directions,
            transform: transform.ok_or_else(|| bad("missing transform"))?,
            frame_width,
            frame_height,
            total_sum: sum.ok_or_else(|| bad("missing sum"))?,
            recorded_extrema: extrema,
            rotated_extrema: rotated,
        })
    }
}
