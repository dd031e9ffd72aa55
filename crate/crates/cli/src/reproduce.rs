//! The `reproduce` subcommand: regenerates the named demonstration
//! objects and checks each against its pinned reference statistics.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Result};
use clap::Args;

use ghost_core::boundary::enclosed_area;
use ghost_core::builder::{build_ghost, minimal_ghost, Family};
use ghost_core::catalog;
use ghost_core::imageio::{read_pgm, write_pgm};
use ghost_core::inflate::run_script;
use ghost_core::lattice::SignedGrid;
use ghost_core::project::{
    direction_to_frt_row, frt, frt_max_abs_diff, mojette, projection_max_abs_diff,
    sufficient_angle_set,
};
use ghost_core::watermark::{embed, plan_placement, TransformKind};

use crate::write_ghost_and_render;

const CATALOG: &[(&str, &str)] = &[
    ("fig1", "ten-direction ghost: 40 cells in a 17x17 box"),
    ("fig3a", "twelve-cell tile ghost: 384 cells in 24x27"),
    ("fig3b", "its boundary: 52 cells in 24x28, area 410"),
    ("fig4", "family a: U_7 128 cells 20x13; V_8 48 cells 20x14, area 152"),
    ("fig5", "family a': U_7 128 cells 22x13; V_8 52 cells 22x14, area 154"),
    ("fig6", "family b/b': U_7 128 cells 16x13; V_8 pair {48,52} cells 17x14, areas {152,154}"),
    ("fig7", "three pair merges: perimeters 84/68/88, areas 298/290/300"),
    ("fig8", "ring inflations m=4..7: perimeter 144, areas 584/712/840/968"),
    ("fig9a", "nine-tile inflation: 160 cells, area 1232"),
    ("fig9b", "eighteen-tile inflation: 220 cells, area 2414"),
    ("fig12", "MT watermark signature: zero diffs exactly at the 8 ghost angles (needs --image, 131x131)"),
    ("fig13", "FRT watermark signature: exactly 8 zero-diff rows of 132 (needs --image, 131x131)"),
];

const CATALOG_HELP: &str = "Figure catalog (each id asserts its statistics):
  fig1   ten-direction ghost: 40 cells in a 17x17 box
  fig3a  twelve-cell tile ghost: 384 cells in 24x27
  fig3b  its boundary: 52 cells in 24x28, area 410
  fig4   family a:  U_7 128 cells 20x13; V_8 48 cells 20x14, area 152
  fig5   family a': U_7 128 cells 22x13; V_8 52 cells 22x14, area 154
  fig6   family b/b': U_7 128 cells 16x13; V_8 pair {48,52} cells 17x14
  fig7   pair merges: perimeters 84/68/88, areas 298/290/300
  fig8   ring inflations m=4..7: perimeter 144, areas 584/712/840/968
  fig9a  nine-tile inflation: 160 cells, area 1232
  fig9b  eighteen-tile inflation: 220 cells, area 2414
  fig12  MT signature: zero diffs exactly at the 8 ghost angles (--image)
  fig13  FRT signature: exactly 8 zero-diff rows of 132 (--image)";

#[derive(Args)]
#[command(after_help = CATALOG_HELP)]
pub(crate) struct ReproduceArgs {
    /// Figure id (see --list).
    #[arg(required_unless_present = "list")]
    id: Option<String>,
    /// 131x131 8-bit PGM carrier for fig12/fig13.
    #[arg(long)]
    image: Option<PathBuf>,
    /// Print the figure catalog with the statistics each id asserts.
    #[arg(long)]
    list: bool,
}

pub(crate) fn run(out_dir: &Path, args: &ReproduceArgs) -> Result<()> {
    if args.list {
        for (id, desc) in CATALOG {
            println!("{id}\t{desc}");
        }
        return Ok(());
    }
    let id = args.id.as_deref().expect("clap enforces");
    match id {
        "fig1" => fig1(out_dir),
        "fig3a" => fig3(out_dir, false),
        "fig3b" => fig3(out_dir, true),
        "fig4" => family_pair(out_dir, "fig4", Family::A, (20, 13), (20, 14), 48, 152),
        "fig5" => family_pair(out_dir, "fig5", Family::APrime, (22, 13), (22, 14), 52, 154),
        "fig6" => fig6(out_dir),
        "fig7" => fig7(out_dir),
        "fig8" => fig8(out_dir),
        "fig9a" => w_inflation(out_dir, "fig9a", catalog::w8_9()?, 160, 1232),
        "fig9b" => w_inflation(out_dir, "fig9b", catalog::w8_18()?, 220, 2414),
        "fig12" => fig12(out_dir, args.image.as_deref()),
        "fig13" => fig13(out_dir, args.image.as_deref()),
        other => bail!("unknown figure id '{other}'; try --list"),
    }
}

fn expect(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        bail!("reproduction check failed: {what}")
    }
}

fn stats(g: &SignedGrid) -> (usize, i64, i64) {
    let r = g.bbox().expect("nonempty ghost");
    (g.cell_count(), r.width(), r.height())
}

fn fig1(out_dir: &Path) -> Result<()> {
    let g = build_ghost(&catalog::s10_recipe())?.ghost;
    let (cells, w, h) = stats(&g);
    expect(cells == 40 && (w, h) == (17, 17), "40 cells in 17x17")?;
    let (ghost_path, pgm_path) = write_ghost_and_render(out_dir, "fig1_s10", &g)?;
    println!(
        "fig1 cells={cells} box={w}x{h} files={},{}",
        ghost_path.display(),
        pgm_path.display()
    );
    Ok(())
}

fn fig3(out_dir: &Path, boundary: bool) -> Result<()> {
    let recipe = catalog::tile_demo_recipe(boundary);
    let g = build_ghost(&recipe)?.ghost;
    let (cells, w, h) = stats(&g);
    let (id, stem) = if boundary {
        ("fig3b", "fig3b_boundary")
    } else {
        ("fig3a", "fig3a_tiling")
    };
    if boundary {
        let area = enclosed_area(&g, recipe.boundary_direction.unwrap())?;
        expect(
            cells == 52 && (w, h) == (24, 28) && area == 410,
            "52 cells in 24x28 covering 410",
        )?;
        write_ghost_and_render(out_dir, stem, &g)?;
        println!("{id} cells={cells} box={w}x{h} area={area}");
    } else {
        expect(cells == 384 && (w, h) == (24, 27), "384 cells in 24x27")?;
        write_ghost_and_render(out_dir, stem, &g)?;
        println!("{id} cells={cells} box={w}x{h}");
    }
    Ok(())
}

fn family_pair(
    out_dir: &Path,
    id: &str,
    family: Family,
    u_box: (i64, i64),
    v_box: (i64, i64),
    v_cells: usize,
    v_area: usize,
) -> Result<()> {
    let u = minimal_ghost(family, 7)?;
    let (cells, w, h) = stats(&u);
    expect(cells == 128 && (w, h) == u_box, "minimal ghost size")?;
    let v = ghost_core::builder::boundary_ghost(family, 8)?;
    let (bcells, bw, bh) = stats(&v);
    let area = enclosed_area(&v, family.boundary_direction())?;
    expect(
        bcells == v_cells && (bw, bh) == v_box && area == v_area,
        "boundary ghost size",
    )?;
    let tag = match family {
        Family::APrime => "ap",
        Family::BPrime => "bp",
        f => f.tag(),
    };
    write_ghost_and_render(out_dir, &format!("{id}_u7{tag}"), &u)?;
    write_ghost_and_render(out_dir, &format!("{id}_v8{tag}"), &v)?;
    println!(
        "{id} U cells={cells} box={w}x{h}; V cells={bcells} box={bw}x{bh} area={area}"
    );
    Ok(())
}

fn fig6(out_dir: &Path) -> Result<()> {
    let u = minimal_ghost(Family::B, 7)?;
    let (cells, w, h) = stats(&u);
    expect(cells == 128 && (w, h) == (16, 13), "U_7^b size")?;
    write_ghost_and_render(out_dir, "fig6_u7b", &u)?;
    let mut counts = Vec::new();
    for family in [Family::B, Family::BPrime] {
        let v = ghost_core::builder::boundary_ghost(family, 8)?;
        let (bc, bw, bh) = stats(&v);
        expect((bw, bh) == (17, 14), "V_8 b-family box")?;
        let area = enclosed_area(&v, family.boundary_direction())?;
        counts.push((bc, area));
        let tag = if family == Family::B { "b" } else { "bp" };
        write_ghost_and_render(out_dir, &format!("fig6_v8{tag}"), &v)?;
    }
    counts.sort();
    expect(
        counts == vec![(48, 152), (52, 154)],
        "V_8 b-pair counts {48/152, 52/154}",
    )?;
    println!(
        "fig6 U cells={cells} box={w}x{h}; V pair {:?}",
        counts
    );
    Ok(())
}

fn fig7(out_dir: &Path) -> Result<()> {
    let expected = [(84usize, 298usize), (68, 290), (88, 300)];
    let boundary = Family::A.boundary_direction();
    for (i, ((shift, script), (cells, area))) in catalog::v8a_pair_merge_scripts()?
        .iter()
        .zip(expected)
        .enumerate()
    {
        let g = run_script(script)?.ghost;
        let got_area = enclosed_area(&g, boundary)?;
        expect(
            g.cell_count() == cells && got_area == area,
            &format!("pair merge {shift}"),
        )?;
        write_ghost_and_render(out_dir, &format!("fig7_pair{}", i + 1), &g)?;
        println!(
            "fig7 merge={shift} cells={} area={got_area}",
            g.cell_count()
        );
    }
    Ok(())
}

fn fig8(out_dir: &Path) -> Result<()> {
    for m in 4..=7 {
        let g = run_script(&catalog::v8b_ring_script(m)?)?.ghost;
        let area = enclosed_area(&g, Family::B.boundary_direction())?;
        expect(
            g.cell_count() == 144 && area == m * 128 + 72,
            &format!("ring m={m}"),
        )?;
        write_ghost_and_render(out_dir, &format!("fig8_m{m}"), &g)?;
        println!("fig8 m={m} cells=144 area={area}");
    }
    Ok(())
}

fn w_inflation(
    out_dir: &Path,
    id: &str,
    g: SignedGrid,
    cells: usize,
    area: usize,
) -> Result<()> {
    let got_area = enclosed_area(&g, Family::A.boundary_direction())?;
    expect(
        g.cell_count() == cells && got_area == area,
        &format!("{id}: {cells} cells, area {area}"),
    )?;
    write_ghost_and_render(out_dir, id, &g)?;
    println!("{id} cells={} area={got_area}", g.cell_count());
    Ok(())
}

fn watermark_carrier(image: Option<&Path>) -> Result<ghost_core::imageio::Image8> {
    let path =
        image.ok_or_else(|| anyhow!("this figure needs --image <131x131 8-bit PGM>"))?;
    let img = read_pgm(path)?;
    if img.width() != 131 || img.height() != 131 {
        bail!(
            "carrier must be 131x131, got {}x{}",
            img.width(),
            img.height()
        );
    }
    Ok(img)
}

fn embedded_w18(
    img: &ghost_core::imageio::Image8,
) -> Result<(
    ghost_core::imageio::Image8,
    Vec<ghost_core::lattice::Direction>,
)> {
    let ghost = catalog::w8_18()?;
    let dirs = catalog::w8_18_script()?.zero_directions()?;
    let offset = plan_placement(img, &ghost, None)?;
    let (marked, _) = embed(img, &ghost, &dirs, offset, TransformKind::Mt, "w8(18)".into())?;
    Ok((marked, dirs))
}

fn fig12(out_dir: &Path, image: Option<&Path>) -> Result<()> {
    let img = watermark_carrier(image)?;
    let (marked, dirs) = embedded_w18(&img)?;
    let set = sufficient_angle_set(131, 131, &dirs);
    let before: Vec<_> = set.iter().map(|d| mojette(&img, *d)).collect();
    let after: Vec<_> = set.iter().map(|d| mojette(&marked, *d)).collect();
    let diffs = projection_max_abs_diff(&before, &after)?;
    let mut text = String::from("p\tq\tmax_abs_diff\n");
    let mut zeros = 0;
    for (d, diff) in &diffs {
        text.push_str(&format!("{}\t{}\t{}\n", d.p(), d.q(), diff));
        if *diff == 0 {
            zeros += 1;
        }
    }
    let ghost_dirs: std::collections::BTreeSet<(i64, i64)> = dirs
        .iter()
        .map(|d| (d.canonical().p(), d.canonical().q()))
        .collect();
    for (d, diff) in &diffs {
        let is_ghost_dir = ghost_dirs.contains(&(d.p(), d.q()));
        expect(
            (*diff == 0) == is_ghost_dir,
            &format!("direction {d}: diff {diff}"),
        )?;
    }
    expect(zeros == 8, "exactly eight zero diffs")?;
    let out = out_dir.join("fig12_mt_diffs.tsv");
    std::fs::write(&out, text)?;
    write_pgm(&out_dir.join("fig12_watermarked.pgm"), &marked)?;
    println!(
        "fig12 directions={} zero_diffs={zeros} out={}",
        diffs.len(),
        out.display()
    );
    Ok(())
}

fn fig13(out_dir: &Path, image: Option<&Path>) -> Result<()> {
    let img = watermark_carrier(image)?;
    let (marked, dirs) = embedded_w18(&img)?;
    let diffs = frt_max_abs_diff(&frt(&img)?, &frt(&marked)?)?;
    let mut text = String::from("row\tmax_abs_diff\n");
    for (m, diff) in diffs.iter().enumerate() {
        text.push_str(&format!("{m}\t{diff}\n"));
    }
    let zero_rows: std::collections::BTreeSet<usize> = diffs
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == 0)
        .map(|(m, _)| m)
        .collect();
    let expected: std::collections::BTreeSet<usize> = dirs
        .iter()
        .map(|d| direction_to_frt_row(*d, 131))
        .collect::<Result<_, _>>()?;
    expect(diffs.len() == 132, "132 rows")?;
    expect(
        zero_rows == expected,
        &format!("zero rows {zero_rows:?} at the ghost indices {expected:?}"),
    )?;
    let out = out_dir.join("fig13_frt_diffs.tsv");
    std::fs::write(&out, text)?;
    println!(
        "fig13 rows=132 zero_rows={} out={}",
        zero_rows.len(),
        out.display()
    );
    Ok(())
}
