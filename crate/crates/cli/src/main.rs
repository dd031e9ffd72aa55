//! ghostmark: construct projection ghosts, analyze and inflate their
//! boundaries, project images, and embed/verify fragile ghost watermarks.

mod reproduce;

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ghost_core::boundary::{connectivity, enclosed_area, perimeter_count, segment_lengths};
use ghost_core::builder::{build_ghost, minimal_directions, Family, GhostRecipe, Recursion};
use ghost_core::catalog;
use ghost_core::imageio::{
    read_ghost, read_pgm, render_ghost, write_ghost, write_pgm, RenderStyle,
};
use ghost_core::inflate::{
    random_walk_inflate, run_script, segment_shift_triples, InflationScript,
};
use ghost_core::lattice::{Direction, SignedGrid, Vec2};
use ghost_core::project::{frt, mojette};
use ghost_core::watermark::{
    embed, plan_placement, verify, TransformKind, Verdict, WatermarkRecord,
};

#[derive(Parser)]
#[command(
    name = "ghostmark",
    version,
    about = "Projection ghosts: generation, boundary analysis, inflation, projection and watermarking",
    after_help = "Run `ghostmark reproduce --list` for the catalog of named demonstration figures."
)]
struct Cli {
    /// Directory for output files given as relative paths.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Seed for randomized constructions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a minimal or boundary ghost and write it with its manifest.
    Generate(GenerateArgs),
    /// Emit a TSV of perimeter, area, segment and connectivity data.
    Analyze(AnalyzeArgs),
    /// Replay an inflation script or grow a random-walk inflation.
    Inflate(InflateArgs),
    /// Project an image with the Mojette transform or the FRT, as CSV.
    Project(ProjectArgs),
    /// Add a ghost watermark to an image and write the record sidecar.
    Embed(EmbedArgs),
    /// Check a watermarked image against its record.
    Verify(VerifyArgs),
    /// Render a ghost file to a PGM image.
    Render(RenderArgs),
    /// Emit the boundary-segment table for the a-family ghosts, n = 3..8.
    Table5(Table5Args),
    /// Regenerate a named demonstration figure and check its statistics.
    Reproduce(reproduce::ReproduceArgs),
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    std::fs::create_dir_all(&cli.out_dir)
        .with_context(|| format!("creating out-dir {}", cli.out_dir.display()))?;
    match &cli.command {
        Command::Generate(args) => generate(&cli, args),
        Command::Analyze(args) => analyze(&cli, args),
        Command::Inflate(args) => inflate(&cli, args),
        Command::Project(args) => project(&cli, args),
        Command::Embed(args) => embed_cmd(&cli, args),
        Command::Verify(args) => verify_cmd(&cli, args),
        Command::Render(args) => render(&cli, args),
        Command::Table5(args) => table5(&cli, args),
        Command::Reproduce(args) => reproduce::run(&cli.out_dir, args),
    }
}

fn out_path(cli: &Cli, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        cli.out_dir.join(p)
    }
}

fn parse_family(tag: &str) -> Result<Family> {
    Family::from_tag(tag).ok_or_else(|| anyhow!("unknown family '{tag}' (use a, a', b or b')"))
}

fn parse_offset(s: &str) -> Result<Vec2> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| anyhow!("offset wants 'X,Y', got '{s}'"))?;
    Ok(Vec2::new(x.trim().parse()?, y.trim().parse()?))
}

fn read_directions_file(path: &Path) -> Result<Vec<Direction>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading directions from {}", path.display()))?;
    let mut dirs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut nums = line.split_whitespace().map(|t| t.parse::<i64>());
        match (nums.next(), nums.next(), nums.next()) {
            (Some(Ok(p)), Some(Ok(q)), None) => {
                dirs.push(Direction::new(p, q).map_err(|e| anyhow!("line {}: {e}", i + 1))?)
            }
            _ => bail!("line {}: expected 'p q'", i + 1),
        }
    }
    Ok(dirs)
}

#[derive(Args)]
struct GenerateArgs {
    /// Family tag: a, a', b or b'.
    #[arg(
        long,
        conflicts_with = "from_manifest",
        required_unless_present = "from_manifest"
    )]
    family: Option<String>,
    /// Number of zero-sum directions.
    #[arg(
        long,
        conflicts_with = "from_manifest",
        required_unless_present = "from_manifest"
    )]
    n: Option<usize>,
    /// Hollow the ghost with the family's boundary direction.
    #[arg(long)]
    boundary: bool,
    /// Recursion choices for steps 3..n as a +/- string (default all minus).
    #[arg(long)]
    recursions: Option<String>,
    /// Rebuild from a previously written manifest instead.
    #[arg(long)]
    from_manifest: Option<PathBuf>,
    /// Ghost output file (default derived from the family and n).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Manifest output file (default: ghost file with .manifest appended).
    #[arg(long)]
    manifest_out: Option<PathBuf>,
}

fn family_recipe(args: &GenerateArgs) -> Result<GhostRecipe> {
    if let Some(path) = &args.from_manifest {
        let text = std::fs::read_to_string(path)?;
        return Ok(GhostRecipe::from_manifest_text(&text)?);
    }
    let family = parse_family(args.family.as_deref().expect("clap enforces"))?;
    let n = args.n.expect("clap enforces");
    let mut recipe = if args.boundary {
        GhostRecipe::boundary(family, n)?
    } else {
        GhostRecipe::minimal(family, n)?
    };
    if let Some(rec) = &args.recursions {
        let len = if args.boundary { n - 1 } else { n };
        recipe.shifts = shifts_with_recursions(family, len, rec)?;
        // Plus-recursion sequences leave the minimal-ghost guarantees
        // behind, so drop the strict family tag for them.
        if rec.contains('+') {
            recipe.family = None;
        }
    }
    Ok(recipe)
}

fn shifts_with_recursions(family: Family, n: usize, rec: &str) -> Result<Vec<Vec2>> {
    let choices: Vec<Recursion> = rec
        .chars()
        .map(|c| Recursion::from_symbol(c).ok_or_else(|| anyhow!("bad recursion symbol '{c}'")))
        .collect::<Result<_>>()?;
    Ok(ghost_core::builder::direction_sequence(family, n, &choices)?
        .iter()
        .map(|d| d.vec())
        .collect())
}

fn default_ghost_name(args: &GenerateArgs) -> String {
    let family = args.family.as_deref().unwrap_or("x");
    let tag = match family {
        "a'" | "ap" | "aprime" => "ap",
        "b'" | "bp" | "bprime" => "bp",
        other => other,
    };
    let kind = if args.boundary { "v" } else { "u" };
    format!("{kind}{}{}.txt", args.n.unwrap_or(0), tag)
}

fn generate(cli: &Cli, args: &GenerateArgs) -> Result<()> {
    let recipe = family_recipe(args)?;
    let report = build_ghost(&recipe)?;
    let ghost = &report.ghost;
    let out = out_path(
        cli,
        &args
            .out
            .clone()
            .unwrap_or_else(|| default_ghost_name(args).into()),
    );
    write_ghost(&out, ghost)?;
    let manifest_path = args
        .manifest_out
        .clone()
        .map(|p| out_path(cli, &p))
        .unwrap_or_else(|| {
            let mut p = out.as_os_str().to_owned();
            p.push(".manifest");
            PathBuf::from(p)
        });
    std::fs::write(&manifest_path, recipe.manifest_text())?;
    let r = ghost.bbox().ok_or_else(|| anyhow!("empty ghost"))?;
    let area = match recipe.boundary_direction {
        Some(b) => enclosed_area(ghost, b)?,
        None => ghost.cell_count(),
    };
    println!(
        "cells={} box={}x{} P={} A={} out={} manifest={}",
        ghost.cell_count(),
        r.width(),
        r.height(),
        ghost.cell_count(),
        area,
        out.display(),
        manifest_path.display()
    );
    Ok(())
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Family tag: a, a', b or b'.
    #[arg(long, required_unless_present = "all")]
    family: Option<String>,
    /// Boundary-ghost order (number of zero directions).
    #[arg(long, required_unless_present = "all")]
    n: Option<usize>,
    /// Emit rows for every family and n = 3..8.
    #[arg(long)]
    all: bool,
    /// Write the TSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

const ANALYZE_HEADER: &str =
    "family\tn\tP\tA\ts1\ts2\ts3\ts1p\ts2p\ts3p\tfour\teight\tsimply\tmax_gap\talternating";

fn analyze_row(family: Family, n: usize) -> Result<String> {
    let recipe = GhostRecipe::boundary(family, n)?;
    let v = build_ghost(&recipe)?.ghost;
    let dirs = minimal_directions(family, n - 1)?;
    let (adj, alt) = segment_shift_triples(&dirs)?;
    let s = segment_lengths(&v, adj);
    let sp = segment_lengths(&v, alt);
    let area = enclosed_area(&v, family.boundary_direction())?;
    let conn = connectivity(&v)?;
    Ok(format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{}",
        family.tag(),
        n,
        perimeter_count(&v),
        area,
        s.0,
        s.1,
        s.2,
        sp.0,
        sp.1,
        sp.2,
        conn.four_connected,
        conn.eight_connected,
        conn.simply_connected,
        conn.max_gap,
        conn.alternating.map_or("skipped".into(), |b| b.to_string()),
    ))
}

fn analyze(cli: &Cli, args: &AnalyzeArgs) -> Result<()> {
    let mut rows = vec![ANALYZE_HEADER.to_string()];
    if args.all {
        for family in Family::ALL {
            for n in 3..=8 {
                rows.push(analyze_row(family, n)?);
            }
        }
    } else {
        let family = parse_family(args.family.as_deref().expect("clap enforces"))?;
        rows.push(analyze_row(family, args.n.expect("clap enforces"))?);
    }
    emit(cli, args.out.as_deref(), &(rows.join("\n") + "\n"))
}

fn emit(cli: &Cli, out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            let p = out_path(cli, p);
            std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
            println!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Args)]
struct InflateArgs {
    /// Replay this inflation script.
    #[arg(long, conflicts_with = "random_walk")]
    script: Option<PathBuf>,
    /// Grow a self-avoiding random-walk inflation instead.
    #[arg(long, requires = "family", requires = "n", requires = "tiles")]
    random_walk: bool,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of tiles the walk should place.
    #[arg(long)]
    tiles: Option<usize>,
    /// Ghost output file.
    #[arg(long)]
    out: PathBuf,
    /// Where to save the (replayable) script of a random walk.
    #[arg(long)]
    script_out: Option<PathBuf>,
    /// Print the per-step cell/area trace.
    #[arg(long)]
    trace: bool,
}

fn inflate(cli: &Cli, args: &InflateArgs) -> Result<()> {
    let (ghost, script, trace) = if args.random_walk {
        let family = parse_family(args.family.as_deref().expect("clap enforces"))?;
        let (ghost, script) = random_walk_inflate(
            family,
            args.n.expect("clap enforces"),
            args.tiles.expect("clap enforces"),
            cli.seed,
        )?;
        (ghost, script, Vec::new())
    } else {
        let path = args
            .script
            .as_ref()
            .ok_or_else(|| anyhow!("either --script or --random-walk is required"))?;
        let script = InflationScript::from_text(&std::fs::read_to_string(path)?)?;
        let outcome = run_script(&script)?;
        (outcome.ghost, script, outcome.trace)
    };
    if args.trace {
        for t in &trace {
            match t.area {
                Some(a) => println!("step={} cells={} area={}", t.step, t.cells, a),
                None => println!("step={} cells={}", t.step, t.cells),
            }
        }
    }
    let out = out_path(cli, &args.out);
    write_ghost(&out, &ghost)?;
    if let Some(sp) = &args.script_out {
        std::fs::write(out_path(cli, sp), script.to_text())?;
    }
    let r = ghost.bbox().ok_or_else(|| anyhow!("empty ghost"))?;
    let area = enclosed_area(&ghost, script.family.boundary_direction())?;
    println!(
        "cells={} box={}x{} P={} A={} out={}",
        ghost.cell_count(),
        r.width(),
        r.height(),
        ghost.cell_count(),
        area,
        out.display()
    );
    Ok(())
}

#[derive(Args)]
struct ProjectArgs {
    /// Input PGM image.
    #[arg(long)]
    image: PathBuf,
    /// Mojette transform over the directions in this file (one `p q`
    /// pair per line).
    #[arg(long, conflicts_with = "frt")]
    mt: Option<PathBuf>,
    /// Finite Radon transform (image must be square with prime side).
    #[arg(long)]
    frt: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn project(cli: &Cli, args: &ProjectArgs) -> Result<()> {
    let img = read_pgm(&args.image)?;
    let mut csv = String::new();
    if args.frt {
        let sino = frt(&img)?;
        for m in 0..sino.row_count() {
            csv.push_str(&sino.to_csv_row(m));
            csv.push('\n');
        }
    } else {
        let dirs_path = args
            .mt
            .as_ref()
            .ok_or_else(|| anyhow!("either --mt <dirs-file> or --frt is required"))?;
        for d in read_directions_file(dirs_path)? {
            csv.push_str(&mojette(&img, d).to_csv_row());
            csv.push('\n');
        }
    }
    emit(cli, args.out.as_deref(), &csv)
}

#[derive(Args)]
struct EmbedArgs {
    /// Carrier PGM image.
    #[arg(long)]
    image: PathBuf,
    /// Ghost file to embed.
    #[arg(long)]
    ghost: PathBuf,
    /// Lattice offset 'X,Y' added to the ghost cells; omit to search.
    #[arg(long)]
    offset: Option<String>,
    /// Optional mask image (same size): placement search minimises the
    /// masked weight under the ghost.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Watermarked output image.
    #[arg(long)]
    out: PathBuf,
    /// Watermark record sidecar (.wmr).
    #[arg(long)]
    record: PathBuf,
    /// Zero directions of the ghost: from a family boundary recipe...
    #[arg(long, requires = "n")]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// ...or from an inflation script...
    #[arg(long)]
    dirs_script: Option<PathBuf>,
    /// ...or listed one `p q` per line.
    #[arg(long)]
    dirs_file: Option<PathBuf>,
    /// Record FRT-row extrema instead of Mojette extrema.
    #[arg(long)]
    frt: bool,
}

fn embed_dirs(args: &EmbedArgs) -> Result<(Vec<Direction>, String)> {
    if let Some(path) = &args.dirs_script {
        let script = InflationScript::from_text(&std::fs::read_to_string(path)?)?;
        let manifest = format!(
            "script {} {} steps={}",
            script.family.tag(),
            script.n,
            script.steps.len()
        );
        return Ok((script.zero_directions()?, manifest));
    }
    if let Some(tag) = &args.family {
        let family = parse_family(tag)?;
        let n = args.n.expect("clap enforces");
        let recipe = GhostRecipe::boundary(family, n)?;
        return Ok((
            recipe.zero_directions(),
            format!("family {} n {}", family.tag(), n),
        ));
    }
    if let Some(path) = &args.dirs_file {
        return Ok((
            read_directions_file(path)?,
            format!("dirs {}", path.display()),
        ));
    }
    bail!("ghost directions required: --family/--n, --dirs-script or --dirs-file")
}

fn embed_cmd(cli: &Cli, args: &EmbedArgs) -> Result<()> {
    let img = read_pgm(&args.image)?;
    let ghost = read_ghost(&args.ghost)?;
    let (dirs, manifest) = embed_dirs(args)?;
    let offset = match &args.offset {
        Some(s) => parse_offset(s)?,
        None => {
            let mask = args.mask.as_ref().map(|p| read_pgm(p)).transpose()?;
            plan_placement(&img, &ghost, mask.as_ref())?
        }
    };
    let transform = if args.frt {
        TransformKind::Frt
    } else {
        TransformKind::Mt
    };
    let (marked, record) = embed(&img, &ghost, &dirs, offset, transform, manifest)?;
    let out = out_path(cli, &args.out);
    write_pgm(&out, &marked)?;
    let record_path = out_path(cli, &args.record);
    std::fs::write(&record_path, record.to_text())?;
    println!(
        "embedded cells={} offset={},{} out={} record={}",
        ghost.cell_count(),
        offset.x,
        offset.y,
        out.display(),
        record_path.display()
    );
    Ok(())
}

#[derive(Args)]
struct VerifyArgs {
    /// Watermarked PGM image.
    #[arg(long)]
    image: PathBuf,
    /// Record sidecar written at embed time.
    #[arg(long)]
    record: PathBuf,
    /// Write the per-direction difference report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn verify_cmd(cli: &Cli, args: &VerifyArgs) -> Result<()> {
    let img = read_pgm(&args.image)?;
    let record = WatermarkRecord::from_text(&std::fs::read_to_string(&args.record)?)?;
    let report = verify(&img, &record, None)?;
    if let Some(path) = &args.report {
        let mut text = String::from("section\tp\tq\tdiff\n");
        for (d, diff) in &report.ghost_angle_diffs {
            text.push_str(&format!("ghost\t{}\t{}\t{}\n", d.p(), d.q(), diff));
        }
        for (d, diff) in &report.rotated_diffs {
            text.push_str(&format!("rotated\t{}\t{}\t{}\n", d.p(), d.q(), diff));
        }
        for (d, diff) in &report.other_angle_diffs {
            text.push_str(&format!("signature\t{}\t{}\t{}\n", d.p(), d.q(), diff));
        }
        std::fs::write(out_path(cli, path), text)?;
    }
    let verdict = match report.verdict {
        Verdict::Authentic => "authentic",
        Verdict::Tampered => "tampered",
        Verdict::ReMarked => "re-marked",
    };
    println!(
        "verdict={verdict} sum_match={} extrema_match={}",
        report.sum_match, report.extrema_match
    );
    if report.verdict != Verdict::Authentic {
        std::process::exit(3);
    }
    Ok(())
}

#[derive(Args)]
struct RenderArgs {
    /// Ghost file to render.
    #[arg(long)]
    ghost: PathBuf,
    /// Output PGM.
    #[arg(long)]
    out: PathBuf,
    /// Integer magnification.
    #[arg(long, default_value_t = 1)]
    scale: usize,
    /// Keep lattice orientation (by default y is flipped for display).
    #[arg(long)]
    no_flip: bool,
}

fn render(cli: &Cli, args: &RenderArgs) -> Result<()> {
    let g = read_ghost(&args.ghost)?;
    let img = render_ghost(
        &g,
        RenderStyle {
            scale: args.scale,
            flip_y: !args.no_flip,
        },
    )?;
    let out = out_path(cli, &args.out);
    write_pgm(&out, &img)?;
    println!(
        "rendered {}x{} out={}",
        img.width(),
        img.height(),
        out.display()
    );
    Ok(())
}

#[derive(Args)]
struct Table5Args {
    /// Write the TSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub(crate) fn table5_text() -> Result<String> {
    let mut text = String::from("ghost\tpn\tqn\ts1\ts2\ts3\ts1p\ts2p\ts3p\tP\tA\n");
    for row in catalog::segment_table(8)? {
        text.push_str(&format!(
            "V{}a\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            row.n,
            row.last_vector.x,
            row.last_vector.y,
            row.adjacency.0,
            row.adjacency.1,
            row.adjacency.2,
            row.alternate.0,
            row.alternate.1,
            row.alternate.2,
            row.perimeter,
            row.area
        ));
    }
    Ok(text)
}

fn table5(cli: &Cli, args: &Table5Args) -> Result<()> {
    emit(cli, args.out.as_deref(), &table5_text()?)
}

/// Writes a ghost file plus its rendered PGM under `out_dir`.
pub(crate) fn write_ghost_and_render(
    out_dir: &Path,
    stem: &str,
    g: &SignedGrid,
) -> Result<(PathBuf, PathBuf)> {
    let ghost_path = out_dir.join(format!("{stem}.txt"));
    write_ghost(&ghost_path, g)?;
    let img = render_ghost(g, RenderStyle::default())?;
    let pgm_path = out_dir.join(format!("{stem}.pgm"));
    write_pgm(&pgm_path, &img)?;
    Ok((ghost_path, pgm_path))
}
