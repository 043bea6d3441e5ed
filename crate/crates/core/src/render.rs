//! Images (binary PPM and PNG), point-cloud CSV and JSON reports.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fiber::{FiberGrid, NOT_ESCAPED};
use crate::grid::GridSpec;
use crate::julia::{CellLabel, GridRegion};
use crate::poly::C64;

/// Bumped whenever a palette changes; recorded in report metadata.
pub const PALETTE_VERSION: u32 = 1;

const JULIA: [u8; 3] = [0, 0, 0];
const BOUNDED: [u8; 3] = [32, 48, 112];
const ESCAPED: [u8; 3] = [236, 236, 228];
const MIXED: [u8; 3] = [240, 150, 40];
const UNDECIDED: [u8; 3] = [200, 0, 200];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB, top row first.
    pub rgb: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, fill: [u8; 3]) -> Self {
        Image { width, height, rgb: fill.repeat(width * height) }
    }

    pub fn set(&mut self, i: usize, j: usize, c: [u8; 3]) {
        let k = 3 * (j * self.width + i);
        self.rgb[k..k + 3].copy_from_slice(&c);
    }

    pub fn get(&self, i: usize, j: usize) -> [u8; 3] {
        let k = 3 * (j * self.width + i);
        [self.rgb[k], self.rgb[k + 1], self.rgb[k + 2]]
    }

    pub fn ppm_bytes(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.rgb);
        out
    }

    pub fn write_ppm(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.ppm_bytes())?;
        Ok(())
    }

    pub fn write_png(&self, path: &Path) -> Result<()> {
        let w = BufWriter::new(File::create(path)?);
        let mut enc = png::Encoder::new(w, self.width as u32, self.height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(|e| Error::Io(e.to_string()))?;
        writer.write_image_data(&self.rgb).map_err(|e| Error::Io(e.to_string()))?;
        writer.finish().map_err(|e| Error::Io(e.to_string()))?;
        Ok(())
    }
}

fn lerp(a: [u8; 3], b: [u8; 3], t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let mix = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * t).round() as u8;
    [mix(a[0], b[0]), mix(a[1], b[1]), mix(a[2], b[2])]
}

/// Escape-time colour: black inside, light outside, darker near the set.
pub fn escape_color(e: u32, max_iter: usize) -> [u8; 3] {
    if e == NOT_ESCAPED {
        return JULIA;
    }
    let t = (1.0 + e as f64).ln() / (2.0 + max_iter as f64).ln();
    lerp(ESCAPED, [20, 60, 160], t.sqrt())
}

pub fn label_color(l: CellLabel) -> [u8; 3] {
    match l {
        CellLabel::BoundedAll => BOUNDED,
        CellLabel::EscapedAll => ESCAPED,
        CellLabel::Mixed => MIXED,
        CellLabel::Undecided => UNDECIDED,
    }
}

/// Cell labels with the fate-split Julia mask drawn in black.
pub fn render_region(region: &GridRegion) -> Image {
    let g = &region.grid;
    let mut img = Image::new(g.nx, g.ny, ESCAPED);
    for idx in 0..g.len() {
        let (i, j) = g.coords(idx);
        let c = if region.julia[idx] { JULIA } else { label_color(region.labels[idx]) };
        img.set(i, j, c);
    }
    img
}

pub fn render_fiber(fg: &FiberGrid) -> Image {
    let g = &fg.grid;
    let mut img = Image::new(g.nx, g.ny, ESCAPED);
    for idx in 0..g.len() {
        let (i, j) = g.coords(idx);
        img.set(i, j, escape_color(fg.escape[idx], fg.max_iter));
    }
    img
}

/// Cells hit by at least one point, in black.
pub fn render_points(points: &[C64], grid: &GridSpec) -> Image {
    let mut img = Image::new(grid.nx, grid.ny, ESCAPED);
    for z in points {
        if let Some((i, j)) = grid.locate(*z) {
            img.set(i, j, JULIA);
        }
    }
    img
}

/// `re,im` per line with a header; values round-trip exactly.
pub fn write_csv(points: &[C64], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "re,im")?;
    for z in points {
        writeln!(w, "{:?},{:?}", z.re, z.im)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<C64>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some("re,im") {
        return Err(Error::Parse("missing re,im header".into()));
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let (a, b) = line.split_once(',').ok_or_else(|| Error::Parse(format!("line {}: expected re,im", k + 2)))?;
            let p = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("line {}: bad number", k + 2)));
            Ok(C64::new(p(a)?, p(b)?))
        })
        .collect()
}

/// Pretty JSON with a trailing newline.
pub fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    std::fs::write(path, json_string(value)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Window;

    #[test]
    fn ppm_layout() {
        let mut img = Image::new(3, 2, [1, 2, 3]);
        img.set(2, 1, [9, 8, 7]);
        let bytes = img.ppm_bytes();
        let header = b"P6\n3 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(bytes.len(), header.len() + 18);
        assert_eq!(&bytes[bytes.len() - 3..], &[9, 8, 7]);
        assert_eq!(&bytes[header.len()..header.len() + 3], &[1, 2, 3]);
    }

    #[test]
    fn png_round_trip() {
        let dir = std::env::temp_dir().join(format!("sjg-render-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let mut img = Image::new(5, 4, [10, 20, 30]);
        img.set(4, 3, [200, 100, 0]);
        let path = dir.join("a.png");
        img.write_png(&path).unwrap();
        let dec = png::Decoder::new(std::io::BufReader::new(File::open(&path).unwrap()));
        let mut reader = dec.read_info().unwrap();
        let mut buf = vec![0; reader.output_buffer_size().unwrap()];
        let info = reader.next_frame(&mut buf).unwrap();
        assert_eq!((info.width, info.height), (5, 4));
        assert_eq!(&buf[..info.buffer_size()], &img.rgb[..]);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn csv_round_trip() {
        let dir = std::env::temp_dir().join(format!("sjg-csv-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let pts = vec![C64::new(0.1, -1e-300), C64::new(-3.25, 1.0 / 3.0)];
        let path = dir.join("p.csv");
        write_csv(&pts, &path).unwrap();
        assert!(std::fs::read_to_string(&path).unwrap().starts_with("re,im\n"));
        assert_eq!(read_csv(&path).unwrap(), pts);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn palettes() {
        assert_eq!(escape_color(NOT_ESCAPED, 100), [0, 0, 0]);
        assert_ne!(escape_color(1, 100), escape_color(50, 100));
        let g = GridSpec::square(Window::square(1.0), 4).unwrap();
        let img = render_points(&[C64::new(-0.9, 0.9)], &g);
        assert_eq!(img.get(0, 0), JULIA);
        assert_eq!(img.get(3, 3), ESCAPED);
    }
}
