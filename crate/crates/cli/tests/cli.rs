//! End-to-end tests driving the ghostmark binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ghostmark")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}\n{}",
        String::from_utf8_lossy(&out.stderr),
        String::from_utf8_lossy(&out.stdout)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "ghostmark-test-{tag}-{}",
        std::process::id()
    ));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Deterministic 131x131 carrier with mid-range samples.
fn write_carrier(path: &Path) {
    let mut data = Vec::with_capacity(131 * 131);
    let mut state = 0x2545f4914f6cdd1du64;
    for _ in 0..131 * 131 {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        data.push(40 + ((state >> 56) as u8 % 176));
    }
    let mut bytes = b"P5\n131 131\n255\n".to_vec();
    bytes.extend_from_slice(&data);
    std::fs::write(path, bytes).unwrap();
}

#[test]
fn table5_matches_golden_file() {
    let dir = temp_dir("table5");
    let out = stdout_of(&run_in(&dir, &["table5"]));
    let golden = include_str!("data/table5_golden.tsv");
    assert_eq!(out, golden);
}

#[test]
fn generate_writes_ghost_and_manifest() {
    let dir = temp_dir("generate");
    let out = stdout_of(&run_in(
        &dir,
        &["generate", "--family", "a", "--n", "8", "--boundary"],
    ));
    assert!(out.contains("cells=48"), "stdout: {out}");
    assert!(out.contains("box=20x14"));
    assert!(out.contains("A=152"));
    let ghost = std::fs::read_to_string(dir.join("v8a.txt")).unwrap();
    assert!(ghost.starts_with("ghost v1 48\n"));

    // 2^3 cells for the plain minimal ghost.
    let out = stdout_of(&run_in(&dir, &["generate", "--family", "b", "--n", "3"]));
    assert!(out.contains("cells=8"), "stdout: {out}");

    // Rebuilding from the manifest reproduces the file bit for bit.
    stdout_of(&run_in(
        &dir,
        &[
            "generate",
            "--from-manifest",
            dir.join("v8a.txt.manifest").to_str().unwrap(),
            "--out",
            "again.txt",
        ],
    ));
    assert_eq!(
        std::fs::read(dir.join("v8a.txt")).unwrap(),
        std::fs::read(dir.join("again.txt")).unwrap()
    );
}

#[test]
fn generated_perimeter_follows_the_recursion() {
    let dir = temp_dir("perimeter");
    let out = stdout_of(&run_in(
        &dir,
        &["generate", "--family", "a", "--n", "12", "--boundary"],
    ));
    let predicted = ghost_core::boundary::predicted_perimeter(12);
    assert!(
        out.contains(&format!("P={predicted}")),
        "stdout {out} lacks P={predicted}"
    );
}

#[test]
fn analyze_emits_full_grid() {
    let dir = temp_dir("analyze");
    let out = stdout_of(&run_in(&dir, &["analyze", "--all"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 1 + 4 * 6, "header plus 4 families x n=3..8");
    assert!(lines[0].starts_with("family\tn\tP\tA"));
    // The a-family n=8 row carries the reference values.
    assert!(
        lines.iter().any(|l| l.starts_with("a\t8\t48\t152\t13\t6\t5\t6\t14\t4")),
        "missing V_8^a row in: {out}"
    );
}

#[test]
fn random_walk_script_replays_bit_identically() {
    let dir = temp_dir("walk");
    let out = stdout_of(&run_in(
        &dir,
        &[
            "--seed",
            "17",
            "inflate",
            "--random-walk",
            "--family",
            "b",
            "--n",
            "10",
            "--tiles",
            "25",
            "--out",
            "walk.txt",
            "--script-out",
            "walk.script",
        ],
    ));
    assert!(out.contains("cells="));
    stdout_of(&run_in(
        &dir,
        &[
            "inflate",
            "--script",
            dir.join("walk.script").to_str().unwrap(),
            "--out",
            "replay.txt",
        ],
    ));
    assert_eq!(
        std::fs::read(dir.join("walk.txt")).unwrap(),
        std::fs::read(dir.join("replay.txt")).unwrap()
    );
}

#[test]
fn render_produces_expected_frame() {
    let dir = temp_dir("render");
    stdout_of(&run_in(
        &dir,
        &["generate", "--family", "a", "--n", "8", "--boundary", "--out", "v.txt"],
    ));
    let out = stdout_of(&run_in(
        &dir,
        &[
            "render",
            "--ghost",
            dir.join("v.txt").to_str().unwrap(),
            "--out",
            "v.pgm",
            "--scale",
            "3",
        ],
    ));
    assert!(out.contains("rendered 66x48"), "stdout: {out}");
    let bytes = std::fs::read(dir.join("v.pgm")).unwrap();
    assert!(bytes.starts_with(b"P5\n66 48\n255\n"));
}

#[test]
fn project_frt_and_mt() {
    let dir = temp_dir("project");
    write_carrier(&dir.join("img.pgm"));
    let out = stdout_of(&run_in(
        &dir,
        &["project", "--image", dir.join("img.pgm").to_str().unwrap(), "--frt"],
    ));
    assert_eq!(out.lines().count(), 132);
    std::fs::write(dir.join("dirs.txt"), "1 0\n0 1\n2 -1\n").unwrap();
    let out = stdout_of(&run_in(
        &dir,
        &[
            "project",
            "--image",
            dir.join("img.pgm").to_str().unwrap(),
            "--mt",
            dir.join("dirs.txt").to_str().unwrap(),
        ],
    ));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("1,0,"));
    // Every projection sums to the image total.
    let total: i64 = {
        let bytes = std::fs::read(dir.join("img.pgm")).unwrap();
        bytes[b"P5\n131 131\n255\n".len()..]
            .iter()
            .map(|&b| b as i64)
            .sum()
    };
    for line in &lines {
        let sum: i64 = line
            .split(',')
            .skip(3)
            .map(|t| t.parse::<i64>().unwrap())
            .sum();
        assert_eq!(sum, total);
    }
}

#[test]
fn embed_verify_tamper_cycle() {
    let dir = temp_dir("wmr");
    write_carrier(&dir.join("img.pgm"));
    stdout_of(&run_in(&dir, &["reproduce", "fig9b"]));
    let out = stdout_of(&run_in(
        &dir,
        &[
            "embed",
            "--image",
            dir.join("img.pgm").to_str().unwrap(),
            "--ghost",
            dir.join("fig9b.txt").to_str().unwrap(),
            "--family",
            "a",
            "--n",
            "8",
            "--out",
            "marked.pgm",
            "--record",
            "rec.wmr",
        ],
    ));
    assert!(out.contains("embedded cells=220"), "stdout: {out}");

    let out = run_in(
        &dir,
        &[
            "verify",
            "--image",
            dir.join("marked.pgm").to_str().unwrap(),
            "--record",
            dir.join("rec.wmr").to_str().unwrap(),
            "--report",
            "report.tsv",
        ],
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("verdict=authentic"));
    let report = std::fs::read_to_string(dir.join("report.tsv")).unwrap();
    assert!(report.lines().any(|l| l.starts_with("signature\t")));

    // One flipped sample: non-authentic verdict, exit code 3.
    let mut bytes = std::fs::read(dir.join("marked.pgm")).unwrap();
    let last = bytes.len() - 1;
    bytes[last] = bytes[last].wrapping_add(1);
    std::fs::write(dir.join("tampered.pgm"), bytes).unwrap();
    let out = run_in(
        &dir,
        &[
            "verify",
            "--image",
            dir.join("tampered.pgm").to_str().unwrap(),
            "--record",
            dir.join("rec.wmr").to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verdict=tampered"));
}

#[test]
fn reproduce_catalog_runs_and_is_byte_stable() {
    let dir = temp_dir("repro");
    for id in ["fig1", "fig3a", "fig3b", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9a"] {
        let out = run_in(&dir, &["reproduce", id]);
        assert!(
            out.status.success(),
            "{id} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    // Byte stability across runs.
    let first = stdout_of(&run_in(&dir, &["reproduce", "fig9b"]));
    let bytes1 = std::fs::read(dir.join("fig9b.txt")).unwrap();
    let again = stdout_of(&run_in(&dir, &["reproduce", "fig9b"]));
    let bytes2 = std::fs::read(dir.join("fig9b.txt")).unwrap();
    assert_eq!(first, again);
    assert_eq!(bytes1, bytes2);

    write_carrier(&dir.join("img.pgm"));
    for id in ["fig12", "fig13"] {
        let out = run_in(
            &dir,
            &["reproduce", id, "--image", dir.join("img.pgm").to_str().unwrap()],
        );
        assert!(
            out.status.success(),
            "{id} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let diffs = std::fs::read_to_string(dir.join("fig13_frt_diffs.tsv")).unwrap();
    assert_eq!(diffs.lines().count(), 133, "header plus 132 rows");
}

#[test]
fn errors_exit_nonzero_with_message() {
    let dir = temp_dir("errors");
    let out = run_in(&dir, &["reproduce", "fig99"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown figure id"));

    let out = run_in(&dir, &["reproduce", "fig12"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--image"));

    let out = run_in(&dir, &["generate", "--family", "z", "--n", "4"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown family"));
}
