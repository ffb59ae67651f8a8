//! Raster frames, boolean masks, background estimation and polygon fill.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geometry::{Cell, GridGeometry, Vec2};

pub type Rgb = [u8; 3];

/// An H x W x 3 image with 8-bit channels, tagged with its frame index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    height: usize,
    width: usize,
    pixels: Vec<Rgb>,
    pub timestamp: u32,
}

impl Frame {
    pub fn filled(height: usize, width: usize, color: Rgb) -> Self {
        Self {
            height,
            width,
            pixels: vec![color; height * width],
            timestamp: 0,
        }
    }

    pub fn from_pixels(height: usize, width: usize, pixels: Vec<Rgb>) -> Result<Self> {
        if pixels.len() != height * width {
            return Err(Error::arg(format!(
                "expected {} pixels for a {height}x{width} frame, got {}",
                height * width,
                pixels.len()
            )));
        }
        Ok(Self {
            height,
            width,
            pixels,
            timestamp: 0,
        })
    }

    pub fn with_timestamp(mut self, timestamp: u32) -> Self {
        self.timestamp = timestamp;
        self
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> Rgb {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, color: Rgb) {
        self.pixels[row * self.width + col] = color;
    }

    /// Paint `color` onto every true pixel of `mask`.
    pub fn paint(&mut self, mask: &PixelMask, color: Rgb) {
        debug_assert_eq!(mask.dims(), self.dims());
        for idx in mask.iter_true() {
            self.pixels[idx] = color;
        }
    }

    /// Binary PPM (P6, maxval 255).
    pub fn write_ppm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        let bytes: Vec<u8> = self.pixels.iter().flatten().copied().collect();
        out.write_all(&bytes)
    }

    pub fn to_ppm_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(self.pixels.len() * 3 + 20);
        self.write_ppm(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_ppm<R: Read>(mut input: R) -> Result<Self> {
        let mut data = Vec::new();
        input
            .read_to_end(&mut data)
            .map_err(|e| Error::format("PPM", e.to_string()))?;
        let (width, height, body) = parse_netpbm_header(&data, b"P6", "PPM")?;
        if body.len() != width * height * 3 {
            return Err(Error::format(
                "PPM",
                format!("expected {} data bytes, found {}", width * height * 3, body.len()),
            ));
        }
        let pixels = body.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Frame::from_pixels(height, width, pixels)
    }
}

/// H x W boolean array.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PixelMask {
    height: usize,
    width: usize,
    bits: Vec<bool>,
}

impl PixelMask {
    pub fn new(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            bits: vec![false; height * width],
        }
    }

    pub fn for_geometry(g: &GridGeometry) -> Self {
        Self::new(g.height(), g.width())
    }

    pub fn from_bits(height: usize, width: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != height * width {
            return Err(Error::arg(format!(
                "expected {} mask entries, got {}",
                height * width,
                bits.len()
            )));
        }
        Ok(Self {
            height,
            width,
            bits,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn get_cell(&self, cell: Cell) -> bool {
        self.get(cell.row, cell.col)
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.width + col] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn any(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }

    /// Flat row-major indices of true pixels.
    pub fn iter_true(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn union_with(&mut self, other: &PixelMask) {
        debug_assert_eq!(self.dims(), other.dims());
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn intersects(&self, other: &PixelMask) -> bool {
        debug_assert_eq!(self.dims(), other.dims());
        self.bits.iter().zip(&other.bits).any(|(&a, &b)| a && b)
    }

    pub fn inverted(&self) -> PixelMask {
        PixelMask {
            height: self.height,
            width: self.width,
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }

    /// Binary PGM (P5) with 0/255 values.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
        let bytes: Vec<u8> = self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
        out.write_all(&bytes)
    }

    pub fn to_pgm_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(self.bits.len() + 20);
        self.write_pgm(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_pgm<R: Read>(mut input: R) -> Result<Self> {
        let mut data = Vec::new();
        input
            .read_to_end(&mut data)
            .map_err(|e| Error::format("PGM", e.to_string()))?;
        let (width, height, body) = parse_netpbm_header(&data, b"P5", "PGM")?;
        if body.len() != width * height {
            return Err(Error::format(
                "PGM",
                format!("expected {} data bytes, found {}", width * height, body.len()),
            ));
        }
        let bits = body
            .iter()
            .map(|&v| match v {
                0 => Ok(false),
                255 => Ok(true),
                other => Err(Error::format("PGM", format!("mask value {other} is not 0 or 255"))),
            })
            .collect::<Result<Vec<_>>>()?;
        PixelMask::from_bits(height, width, bits)
    }
}

/// Parses `magic width height maxval` followed by a single whitespace byte.
fn parse_netpbm_header<'a>(
    data: &'a [u8],
    magic: &[u8],
    what: &'static str,
) -> Result<(usize, usize, &'a [u8])> {
    if !data.starts_with(magic) {
        return Err(Error::format(what, "bad magic number"));
    }
    let mut pos = magic.len();
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        loop {
            match data.get(pos) {
                Some(b'#') => {
                    while data.get(pos).is_some_and(|&c| c != b'\n') {
                        pos += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(Error::format(what, "truncated header")),
            }
        }
        let start = pos;
        while data.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(what, "expected a number in header"));
        }
        *field = std::str::from_utf8(&data[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(what, "header number out of range"))?;
    }
    if fields[2] != 255 {
        return Err(Error::format(what, format!("maxval {} unsupported", fields[2])));
    }
    match data.get(pos) {
        Some(c) if c.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::format(what, "missing whitespace after header")),
    }
    Ok((fields[0], fields[1], &data[pos..]))
}

/// Per-pixel, per-channel mean of `frames`, rounded half-up.
pub fn estimate_background(frames: &[Frame]) -> Result<Frame> {
    let first = frames
        .first()
        .ok_or_else(|| Error::arg("background estimation needs at least one frame"))?;
    let (h, w) = first.dims();
    let mut sums = vec![[0u64; 3]; h * w];
    for f in frames {
        if f.dims() != (h, w) {
            return Err(Error::arg(format!(
                "frame {} is {}x{}, expected {h}x{w}",
                f.timestamp,
                f.height(),
                f.width()
            )));
        }
        for (acc, px) in sums.iter_mut().zip(f.pixels()) {
            for c in 0..3 {
                acc[c] += px[c] as u64;
            }
        }
    }
    let n = frames.len() as u64;
    // floor(sum / n + 1/2) == floor((2 sum + n) / 2n)
    let pixels = sums
        .iter()
        .map(|acc| acc.map(|s| ((2 * s + n) / (2 * n)).min(255) as u8))
        .collect();
    Frame::from_pixels(h, w, pixels)
}

/// Rasterize a polygon given in continuous pixel coordinates (`x` = column,
/// `y` = row, pixel centers on integers).
///
/// A pixel is set when its center lies inside the polygon under the even-odd
/// rule or exactly on its boundary. Vertices outside the grid are clipped.
pub fn fill_polygon(g: &GridGeometry, vertices: &[Vec2]) -> Result<PixelMask> {
    if vertices.len() < 3 {
        return Err(Error::arg(format!(
            "polygon needs at least 3 vertices, got {}",
            vertices.len()
        )));
    }
    if vertices.iter().any(|v| !(v.x.is_finite() && v.y.is_finite())) {
        return Err(Error::arg("polygon vertices must be finite"));
    }
    let (h, w) = (g.height(), g.width());
    let mut mask = PixelMask::new(h, w);
    let n = vertices.len();
    let edges = || (0..n).map(move |k| (vertices[k], vertices[(k + 1) % n]));

    let min_y = vertices.iter().map(|v| v.y).fold(f64::INFINITY, f64::min);
    let max_y = vertices.iter().map(|v| v.y).fold(f64::NEG_INFINITY, f64::max);
    let Some((row_lo, row_hi)) = clip_range(min_y, max_y, h) else {
        return Ok(mask);
    };

    let mut xs: Vec<f64> = Vec::with_capacity(n);
    for row in row_lo..=row_hi {
        let y = row as f64;
        xs.clear();
        for (a, b) in edges() {
            // half-open in y so shared vertices are counted once
            if (a.y <= y && y < b.y) || (b.y <= y && y < a.y) {
                xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        xs.sort_by(f64::total_cmp);
        for span in xs.chunks_exact(2) {
            if let Some((c0, c1)) = clip_range(span[0], span[1], w) {
                for col in c0..=c1 {
                    mask.set(row, col, true);
                }
            }
        }
        // Horizontal edges and vertices are skipped by the crossing count
        // but their centers are on the boundary.
        for (a, b) in edges() {
            if a.y == y && b.y == y {
                if let Some((c0, c1)) = clip_range(a.x.min(b.x), a.x.max(b.x), w) {
                    for col in c0..=c1 {
                        mask.set(row, col, true);
                    }
                }
            }
            if a.y == y && a.x.fract() == 0.0 && a.x >= 0.0 && a.x < w as f64 {
                mask.set(row, a.x as usize, true);
            }
        }
    }
    Ok(mask)
}

/// Integer indices in `[lo, hi]` intersected with `[0, n)`.
fn clip_range(lo: f64, hi: f64, n: usize) -> Option<(usize, usize)> {
    let lo = lo.ceil().max(0.0);
    let hi = hi.floor().min(n as f64 - 1.0);
    (lo <= hi).then(|| (lo as usize, hi as usize))
}
