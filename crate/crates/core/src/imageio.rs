//! Bit-exact image and ghost serialization, plus figure-style rendering.
//!
//! PGM (P5/P2, maxval 255) is the one image format; writes are canonical
//! P5 so identical inputs produce identical bytes. Ghosts travel in a
//! line-oriented text format sorted by (y, x).

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::lattice::{Point, SignedGrid};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed PGM header: {0}")]
    BadHeader(String),
    #[error("PGM maxval {0} unsupported; only 255")]
    BadMaxval(u32),
    #[error("PGM sample data truncated: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("malformed ghost file at line {line}: {reason}")]
    BadGhostLine { line: usize, reason: String },
    #[error("ghost cell count mismatch: header says {header}, found {found}")]
    CellCountMismatch { header: usize, found: usize },
    #[error("duplicate ghost cell at ({x}, {y})")]
    DuplicateCell { x: i64, y: i64 },
    #[error("ghost cell at ({x}, {y}) has zero value")]
    ZeroCell { x: i64, y: i64 },
    #[error("render input has value {value} at ({x}, {y}); only -1, 0, +1 are renderable")]
    UnrenderableValue { x: i64, y: i64, value: i64 },
    #[error("image dimensions {w}x{h} overflow")]
    BadDimensions { w: u64, h: u64 },
}

/// An 8-bit grayscale image, row-major, row 0 first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image8 {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl Image8 {
    pub fn new(width: usize, height: usize, fill: u8) -> Self {
        Image8 {
            width,
            height,
            samples: vec![fill; width * height],
        }
    }

    pub fn from_samples(width: usize, height: usize, samples: Vec<u8>) -> Option<Self> {
        (samples.len() == width * height).then_some(Image8 {
            width,
            height,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.samples[y * self.width + x] = v;
    }

    pub fn total(&self) -> i64 {
        self.samples.iter().map(|&s| s as i64).sum()
    }
}

fn read_token<'a>(data: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    // Skips whitespace and '#' comments between header tokens.
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (*pos > start).then(|| &data[start..*pos])
}

fn parse_number(tok: &[u8]) -> Result<u64, FormatError> {
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .ok_or_else(|| FormatError::BadHeader(format!("bad number '{}'", String::from_utf8_lossy(tok))))
}

/// Parses a P5 or P2 PGM with maxval 255.
pub fn parse_pgm(data: &[u8]) -> Result<Image8, FormatError> {
    let mut pos = 0;
    let magic = read_token(data, &mut pos)
        .ok_or_else(|| FormatError::BadHeader("empty file".into()))?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(FormatError::BadHeader(format!(
                "magic '{}' is not P5/P2",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let mut next_num = || -> Result<u64, FormatError> {
        read_token(data, &mut pos)
            .ok_or_else(|| FormatError::BadHeader("truncated header".into()))
            .and_then(|t| parse_number(t))
    };
    let w = next_num()?;
    let h = next_num()?;
    let maxval = next_num()?;
    if maxval != 255 {
        return Err(FormatError::BadMaxval(maxval as u32));
    }
    let (w, h) = (w as usize, h as usize);
    let count = w
        .checked_mul(h)
        .ok_or(FormatError::BadDimensions { w: w as u64, h: h as u64 })?;
    let samples = if binary {
        // Exactly one whitespace byte separates the header from the raster.
        pos += 1;
        let raster = data.get(pos..).unwrap_or(&[]);
        if raster.len() < count {
            return Err(FormatError::Truncated {
                expected: count,
                got: raster.len(),
            });
        }
        raster[..count].to_vec()
    } else {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let v = read_token(data, &mut pos)
                .ok_or(FormatError::Truncated {
                    expected: count,
                    got: out.len(),
                })
                .and_then(|t| parse_number(t))?;
            if v > 255 {
                return Err(FormatError::BadHeader(format!("sample {v} exceeds 255")));
            }
            out.push(v as u8);
        }
        out
    };
    Image8::from_samples(w, h, samples).ok_or(FormatError::BadDimensions {
        w: w as u64,
        h: h as u64,
    })
}

/// Canonical P5 bytes: `P5\n<w> <h>\n255\n` followed by the raster.
pub fn encode_pgm(img: &Image8) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.samples);
    out
}

pub fn read_pgm(path: &Path) -> Result<Image8, FormatError> {
    let mut data = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut data)?;
    parse_pgm(&data)
}

pub fn write_pgm(path: &Path, img: &Image8) -> Result<(), FormatError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode_pgm(img))?;
    Ok(())
}

/// Ghost text format v1: `ghost v1 <ncells>` then one `x y value` line
/// per cell in (y, x) order. Blank lines and '#' comments are ignored on
/// input; unsorted input is accepted and re-emitted sorted.
pub fn encode_ghost(g: &SignedGrid) -> String {
    let mut out = format!("ghost v1 {}\n", g.cell_count());
    for (pt, v) in g.iter() {
        writeln!(out, "{} {} {}", pt.x, pt.y, v).expect("string write");
    }
    out
}

pub fn parse_ghost(text: &str) -> Result<SignedGrid, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| FormatError::BadGhostLine {
            line: 0,
            reason: "empty file".into(),
        })?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("ghost") || parts.next() != Some("v1") {
        return Err(FormatError::BadGhostLine {
            line: line_no,
            reason: "expected 'ghost v1 <ncells>' header".into(),
        });
    }
    let ncells: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| FormatError::BadGhostLine {
            line: line_no,
            reason: "bad cell count".into(),
        })?;
    let mut cells = Vec::with_capacity(ncells);
    let mut seen = std::collections::HashSet::with_capacity(ncells);
    for (line_no, line) in lines {
        let mut nums = line.split_whitespace().map(|t| t.parse::<i64>());
        let (x, y, v) = match (nums.next(), nums.next(), nums.next(), nums.next()) {
            (Some(Ok(x)), Some(Ok(y)), Some(Ok(v)), None) => (x, y, v),
            _ => {
                return Err(FormatError::BadGhostLine {
                    line: line_no,
                    reason: "expected 'x y value'".into(),
                })
            }
        };
        if v == 0 {
            return Err(FormatError::ZeroCell { x, y });
        }
        if !seen.insert((x, y)) {
            return Err(FormatError::DuplicateCell { x, y });
        }
        cells.push((Point::new(x, y), v));
    }
    if cells.len() != ncells {
        return Err(FormatError::CellCountMismatch {
            header: ncells,
            found: cells.len(),
        });
    }
    Ok(SignedGrid::from_cells(cells))
}

pub fn read_ghost(path: &Path) -> Result<SignedGrid, FormatError> {
    parse_ghost(&std::fs::read_to_string(path)?)
}

pub fn write_ghost(path: &Path, g: &SignedGrid) -> Result<(), FormatError> {
    std::fs::write(path, encode_ghost(g))?;
    Ok(())
}

/// Figure palette and geometry: +1 white, -1 black, 0 grey, one grey
/// margin pixel around the bbox, integer magnification, y flipped for
/// display by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderStyle {
    pub scale: usize,
    pub flip_y: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            scale: 1,
            flip_y: true,
        }
    }
}

const GREY: u8 = 128;

/// Renders a ghost to an image: (bbox + 2) * scale pixels each way. The
/// empty grid renders as a 2x2 grey margin.
pub fn render_ghost(g: &SignedGrid, style: RenderStyle) -> Result<Image8, FormatError> {
    let scale = style.scale.max(1);
    for (pt, v) in g.iter() {
        if v.abs() > 1 {
            return Err(FormatError::UnrenderableValue {
                x: pt.x,
                y: pt.y,
                value: v,
            });
        }
    }
    let (w, h, origin) = match g.bbox() {
        Some(r) => (
            (r.width() + 2) as usize,
            (r.height() + 2) as usize,
            Point::new(r.min_x - 1, r.min_y - 1),
        ),
        None => (2, 2, Point::new(0, 0)),
    };
    let mut img = Image8::new(w * scale, h * scale, GREY);
    for (pt, v) in g.iter() {
        let cx = (pt.x - origin.x) as usize;
        let cy = (pt.y - origin.y) as usize;
        let row = if style.flip_y { h - 1 - cy } else { cy };
        let shade = if v > 0 { 255 } else { 0 };
        for dy in 0..scale {
            for dx in 0..scale {
                img.set(cx * scale + dx, row * scale + dy, shade);
            }
        }
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{boundary_ghost, Family};
    use proptest::prelude::*;

    #[test]
    fn pgm_p5_round_trips_byte_exact() {
        let img = Image8::from_samples(3, 2, vec![0, 17, 255, 128, 64, 1]).unwrap();
        let bytes = encode_pgm(&img);
        let back = parse_pgm(&bytes).unwrap();
        assert_eq!(back, img);
        assert_eq!(encode_pgm(&back), bytes);
    }

    #[test]
    fn pgm_p2_converts_to_same_samples() {
        let ascii = b"P2\n# comment\n3 2\n255\n0 17 255\n128 64 1\n";
        let img = parse_pgm(ascii).unwrap();
        assert_eq!(img.samples(), &[0, 17, 255, 128, 64, 1]);
    }

    #[test]
    fn pgm_rejects_bad_inputs() {
        assert!(parse_pgm(b"P6\n1 1\n255\nx").is_err());
        assert!(matches!(
            parse_pgm(b"P5\n2 2\n65535\n"),
            Err(FormatError::BadMaxval(65535))
        ));
        assert!(matches!(
            parse_pgm(b"P5\n4 4\n255\nab"),
            Err(FormatError::Truncated { .. })
        ));
    }

    #[test]
    fn ghost_text_round_trips_and_sorts() {
        let v = boundary_ghost(Family::A, 8).unwrap();
        let text = encode_ghost(&v);
        assert!(text.starts_with("ghost v1 48\n"));
        assert_eq!(parse_ghost(&text).unwrap(), v);

        // Unsorted input with comments parses and re-emits sorted.
        let unsorted = "# demo\nghost v1 2\n5 5 -1\n0 0 1\n";
        let g = parse_ghost(unsorted).unwrap();
        assert_eq!(encode_ghost(&g), "ghost v1 2\n0 0 1\n5 5 -1\n");
    }

    #[test]
    fn ghost_text_rejects_zero_and_duplicates() {
        assert!(matches!(
            parse_ghost("ghost v1 1\n0 0 0\n"),
            Err(FormatError::ZeroCell { .. })
        ));
        assert!(matches!(
            parse_ghost("ghost v1 2\n0 0 1\n0 0 -1\n"),
            Err(FormatError::DuplicateCell { .. })
        ));
        assert!(matches!(
            parse_ghost("ghost v1 3\n0 0 1\n"),
            Err(FormatError::CellCountMismatch { .. })
        ));
    }

    #[test]
    fn render_boundary_ghost_geometry() {
        let v = boundary_ghost(Family::A, 8).unwrap();
        let img = render_ghost(&v, RenderStyle::default()).unwrap();
        // 20x14 bbox plus one grey pixel margin each side.
        assert_eq!((img.width(), img.height()), (22, 16));
        let white = img.samples().iter().filter(|&&s| s == 255).count();
        let black = img.samples().iter().filter(|&&s| s == 0).count();
        assert_eq!((white, black), (24, 24));
    }

    #[test]
    fn render_flip_and_negate_symmetry() {
        let g = SignedGrid::from_cells([(Point::new(0, 0), 1), (Point::new(1, 2), -1)]);
        let img = render_ghost(&g, RenderStyle::default()).unwrap();
        let neg = render_ghost(&g.negate(), RenderStyle::default()).unwrap();
        let swapped: Vec<u8> = img
            .samples()
            .iter()
            .map(|&s| match s {
                255 => 0,
                0 => 255,
                other => other,
            })
            .collect();
        assert_eq!(neg.samples(), &swapped[..]);
    }

    #[test]
    fn render_empty_is_grey_margin() {
        let img = render_ghost(&SignedGrid::new(), RenderStyle::default()).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert!(img.samples().iter().all(|&s| s == GREY));
        let big = render_ghost(
            &SignedGrid::from_cells([(Point::new(0, 0), 3)]),
            RenderStyle::default(),
        );
        assert!(big.is_err());
    }

    proptest! {
        #[test]
        fn pgm_round_trip_random(w in 1usize..12, h in 1usize..12, seed in any::<u64>()) {
            let mut state = seed;
            let samples: Vec<u8> = (0..w * h)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 56) as u8
                })
                .collect();
            let img = Image8::from_samples(w, h, samples).unwrap();
            prop_assert_eq!(parse_pgm(&encode_pgm(&img)).unwrap(), img);
        }

        #[test]
        fn ghost_text_round_trip_random(cells in proptest::collection::vec(((-50i64..50, -50i64..50), -5i64..=5), 0..60)) {
            let g = SignedGrid::from_cells(
                cells.into_iter().map(|((x, y), v)| (Point::new(x, y), v)),
            );
            prop_assert_eq!(parse_ghost(&encode_ghost(&g)).unwrap(), g);
        }
    }
}
