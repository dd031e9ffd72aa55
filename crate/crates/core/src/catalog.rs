//! Named demonstration constructions with pinned reference statistics,
//! shared by the CLI's `reproduce` subcommand and the acceptance
//! suite.

use crate::builder::{minimal_directions, Family, GhostRecipe};
use crate::inflate::{
    alternate_shifts, angular_ring, constant_perimeter_selection, hexagon_ring, run_script,
    InflateError, InflationScript, Method, Step,
};
use crate::lattice::{s10_directions, Point, SignedGrid, Vec2};

/// The 40-pixel ten-direction ghost grown from a single cell.
pub fn s10_recipe() -> GhostRecipe {
    GhostRecipe {
        start_tile: SignedGrid::from_cells([(Point::new(0, 0), 1)]),
        shifts: s10_directions().iter().map(|d| d.vec()).collect(),
        boundary_direction: None,
        family: None,
    }
}

/// The twelve-cell 3x6 start tile with uniformly signed columns, grown by
/// five recursion shifts (the second deliberately non-primitive); with the
/// boundary it hollows to a 52-pixel curve covering 410 cells.
pub fn tile_demo_recipe(with_boundary: bool) -> GhostRecipe {
    let tile = SignedGrid::from_cells([
        (Point::new(2, 5), 1),
        (Point::new(1, 4), -1),
        (Point::new(2, 4), 1),
        (Point::new(0, 3), 1),
        (Point::new(1, 3), -1),
        (Point::new(2, 3), 1),
        (Point::new(0, 2), 1),
        (Point::new(1, 2), -1),
        (Point::new(2, 2), 1),
        (Point::new(0, 1), 1),
        (Point::new(1, 1), -1),
        (Point::new(0, 0), 1),
    ]);
    GhostRecipe {
        start_tile: tile,
        shifts: [(1, -3), (-3, -3), (-5, 3), (1, 9), (11, 3)]
            .iter()
            .map(|&(x, y)| Vec2::new(x, y))
            .collect(),
        boundary_direction: with_boundary.then(|| {
            crate::lattice::Direction::new(0, 1).expect("vertical")
        }),
        family: None,
    }
}

/// The three pairwise merges of the eight-direction a-family boundary
/// ghost at its second-tiling shifts, with their perimeter/area targets
/// (84/298, 68/290, 88/300).
pub fn v8a_pair_merge_scripts() -> Result<Vec<(Vec2, InflationScript)>, InflateError> {
    let dirs7 = minimal_directions(Family::A, 7)?;
    let alt = alternate_shifts(&dirs7)?.positive_triple();
    Ok(alt
        .iter()
        .map(|&w| {
            (
                w,
                InflationScript {
                    family: Family::A,
                    n: 8,
                    method: Method::BoundaryMerge,
                    seed: None,
                    steps: vec![Step::MergeSelf(w)],
                },
            )
        })
        .collect())
}

/// The b-family ghost surrounded by m-1 ring copies under the
/// constant-perimeter selections: 144 cells, area m * 128 + 72.
pub fn v8b_ring_script(m: usize) -> Result<InflationScript, InflateError> {
    let sel = constant_perimeter_selection(m).ok_or(InflateError::BadScript(format!(
        "no constant-perimeter pattern for m = {m}"
    )))?;
    let dirs7 = minimal_directions(Family::B, 7)?;
    let ring = hexagon_ring(&dirs7)?;
    Ok(InflationScript {
        family: Family::B,
        n: 8,
        method: Method::BoundaryMerge,
        seed: None,
        steps: sel.iter().map(|&i| Step::Tile(ring[i])).collect(),
    })
}

/// Nine-tile inflation of the a-family ghost: the full second-tiling ring
/// plus a pair of copies at +-(w1' + w2'). 160 cells covering 1232.
pub fn w8_9_script() -> Result<InflationScript, InflateError> {
    let dirs7 = minimal_directions(Family::A, 7)?;
    let alt = alternate_shifts(&dirs7)?;
    let ring = angular_ring(alt);
    let outrigger = alt.positive_triple()[0] + alt.positive_triple()[1];
    let mut steps: Vec<Step> = ring.iter().map(|&w| Step::Tile(w)).collect();
    steps.push(Step::Tile(outrigger));
    steps.push(Step::Tile(-outrigger));
    Ok(InflationScript {
        family: Family::A,
        n: 8,
        method: Method::BoundaryMerge,
        seed: None,
        steps,
    })
}

/// The eighteen-tile inflation: the nine-tile ghost merged with itself at
/// three times the 2 v_6 shift. 220 cells covering 2414.
pub fn w8_18_script() -> Result<InflationScript, InflateError> {
    let dirs7 = minimal_directions(Family::A, 7)?;
    let alt = alternate_shifts(&dirs7)?.positive_triple();
    let mut script = w8_9_script()?;
    script.steps.push(Step::MergeSelf(alt[1].scaled(3)));
    Ok(script)
}

pub fn w8_9() -> Result<SignedGrid, InflateError> {
    Ok(run_script(&w8_9_script()?)?.ghost)
}

pub fn w8_18() -> Result<SignedGrid, InflateError> {
    Ok(run_script(&w8_18_script()?)?.ghost)
}

/// Measured segment table for the a-family boundary ghosts V_3..V_max:
/// last recursion vector, both segment triples, perimeter and enclosed
/// area per row.
pub fn segment_table(n_max: usize) -> Result<Vec<crate::boundary::SegmentTableRow>, InflateError> {
    use crate::boundary::{enclosed_area, perimeter_count, segment_lengths, SegmentTableRow};
    let mut rows = Vec::new();
    for n in 3..=n_max {
        let dirs = minimal_directions(Family::A, n - 1)?;
        let v = crate::builder::boundary_ghost(Family::A, n)?;
        let (adj, alt) = crate::inflate::segment_shift_triples(&dirs)?;
        rows.push(SegmentTableRow {
            n,
            last_vector: dirs[n - 2].vec(),
            adjacency: segment_lengths(&v, adj),
            alternate: segment_lengths(&v, alt),
            perimeter: perimeter_count(&v),
            area: enclosed_area(&v, Family::A.boundary_direction()).map_err(|e| {
                InflateError::BadScript(format!("area measurement failed: {e}"))
            })?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::enclosed_area;
    use crate::builder::build_ghost;
    use crate::lattice::Direction;

    #[test]
    fn s10_recipe_builds_40_cells() {
        let g = build_ghost(&s10_recipe()).unwrap().ghost;
        assert_eq!(g.cell_count(), 40);
    }

    #[test]
    fn w8_9_and_w8_18_match_reference_counts() {
        let col = Direction::new(0, 1).unwrap();
        let w9 = w8_9().unwrap();
        assert_eq!(w9.cell_count(), 160);
        assert_eq!(enclosed_area(&w9, col).unwrap(), 1232);
        let w18 = w8_18().unwrap();
        assert_eq!(w18.cell_count(), 220);
        assert_eq!(enclosed_area(&w18, col).unwrap(), 2414);
        // Both keep all eight zero directions.
        let dirs = w8_18_script().unwrap().zero_directions().unwrap();
        assert_eq!(dirs.len(), 8);
        assert!(w9.is_ghost_for(&dirs));
        assert!(w18.is_ghost_for(&dirs));
    }

    #[test]
    fn scripts_replay_deterministically() {
        let a = run_script(&w8_18_script().unwrap()).unwrap().ghost;
        let b = run_script(&w8_18_script().unwrap()).unwrap().ghost;
        assert_eq!(a, b);
    }
}
