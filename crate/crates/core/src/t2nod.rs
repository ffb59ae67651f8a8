//! Time-to-next-occupancy (O) and time-to-next-departure (D) fields.
//!
//! Both fields hold frame indices relative to the first predicted frame.
//! A pixel is *occupied* at frame `t` when its L1 channel difference from the
//! background reaches `tau_o`, and has *departed* once the difference falls to
//! `tau_d` or below.

use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Frame, Rgb};

/// A frame index or the `INFINITY` sentinel, which orders after every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrameTime(u32);

impl FrameTime {
    pub const INFINITY: FrameTime = FrameTime(u32::MAX);

    /// Panics if `t` collides with the sentinel.
    pub fn at(t: u32) -> Self {
        assert!(t != u32::MAX, "frame index {t} is reserved for INFINITY");
        FrameTime(t)
    }

    pub fn is_finite(self) -> bool {
        self != Self::INFINITY
    }

    pub fn finite(self) -> Option<u32> {
        self.is_finite().then_some(self.0)
    }

    /// Raw encoding used by the binary format (`0xFFFFFFFF` = INFINITY).
    pub fn to_raw(self) -> u32 {
        self.0
    }

    pub fn from_raw(raw: u32) -> Self {
        FrameTime(raw)
    }

    /// Numeric value with INFINITY replaced by `cap`.
    pub fn capped(self, cap: u32) -> u32 {
        self.finite().unwrap_or(cap)
    }
}

impl fmt::Display for FrameTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.finite() {
            Some(t) => write!(f, "{t}"),
            None => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for FrameTime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Self::INFINITY);
        }
        match s.parse::<u32>() {
            Ok(t) if t != u32::MAX => Ok(FrameTime(t)),
            _ => Err(Error::format("time field CSV", format!("bad entry {s:?}"))),
        }
    }
}

/// Occupancy / departure thresholds on the 0..=765 L1 scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ThresholdSpec", into = "ThresholdSpec")]
pub struct Thresholds {
    tau_o: u16,
    tau_d: u16,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdSpec {
    tau_o: u16,
    tau_d: u16,
}

impl TryFrom<ThresholdSpec> for Thresholds {
    type Error = Error;
    fn try_from(s: ThresholdSpec) -> Result<Self> {
        Thresholds::new(s.tau_o, s.tau_d)
    }
}

impl From<Thresholds> for ThresholdSpec {
    fn from(t: Thresholds) -> Self {
        ThresholdSpec {
            tau_o: t.tau_o,
            tau_d: t.tau_d,
        }
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { tau_o: 90, tau_d: 45 }
    }
}

impl Thresholds {
    pub const MAX: u16 = 765;

    /// Requires `0 < tau_d <= tau_o <= 765`.
    pub fn new(tau_o: u16, tau_d: u16) -> Result<Self> {
        if tau_d == 0 || tau_d > tau_o || tau_o > Self::MAX {
            return Err(Error::arg(format!(
                "thresholds must satisfy 0 < tau_d <= tau_o <= 765, got tau_o={tau_o}, tau_d={tau_d}"
            )));
        }
        Ok(Thresholds { tau_o, tau_d })
    }

    pub fn tau_o(&self) -> u16 {
        self.tau_o
    }

    pub fn tau_d(&self) -> u16 {
        self.tau_d
    }
}

/// L1 distance over the three channels.
pub fn pixel_difference(a: Rgb, b: Rgb) -> u16 {
    a.iter()
        .zip(&b)
        .map(|(&x, &y)| x.abs_diff(y) as u16)
        .sum()
}

/// An H x W array of [`FrameTime`] entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeField {
    height: usize,
    width: usize,
    values: Vec<FrameTime>,
}

const MAGIC: &[u8; 4] = b"T2NF";

impl TimeField {
    pub fn infinite(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            values: vec![FrameTime::INFINITY; height * width],
        }
    }

    pub fn from_values(height: usize, width: usize, values: Vec<FrameTime>) -> Result<Self> {
        if values.len() != height * width {
            return Err(Error::arg(format!(
                "expected {} time entries, got {}",
                height * width,
                values.len()
            )));
        }
        Ok(Self {
            height,
            width,
            values,
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

    pub fn values(&self) -> &[FrameTime] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> FrameTime {
        self.values[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: FrameTime) {
        self.values[row * self.width + col] = value;
    }

    pub fn at_index(&self, idx: usize) -> FrameTime {
        self.values[idx]
    }

    /// Rows of comma-separated integers with `inf` for the sentinel.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 4);
        for row in self.values.chunks(self.width) {
            let line: Vec<String> = row.iter().map(ToString::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        let mut width = None;
        let mut height = 0;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let row = line
                .split(',')
                .map(str::parse)
                .collect::<Result<Vec<FrameTime>>>()?;
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(Error::format(
                        "time field CSV",
                        format!("row {height} has {} entries, expected {w}", row.len()),
                    ))
                }
                Some(_) => {}
            }
            values.extend(row);
            height += 1;
        }
        let width = width.ok_or_else(|| Error::format("time field CSV", "empty input"))?;
        TimeField::from_values(height, width, values)
    }

    /// `"T2NF"`, u32 H, u32 W, then row-major u32 values, all little-endian.
    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&(self.height as u32).to_le_bytes())?;
        out.write_all(&(self.width as u32).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.values.len() * 4);
        for v in &self.values {
            buf.extend_from_slice(&v.to_raw().to_le_bytes());
        }
        out.write_all(&buf)
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_binary(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_binary<R: Read>(input: R) -> Result<Self> {
        let mut words = BinaryWords::new(input, "time field")?;
        let height = words.next()? as usize;
        let width = words.next()? as usize;
        let values = (0..height * width)
            .map(|_| words.next().map(FrameTime::from_raw))
            .collect::<Result<Vec<_>>>()?;
        words.finish()?;
        TimeField::from_values(height, width, values)
    }
}

struct BinaryWords {
    data: Vec<u8>,
    pos: usize,
    what: &'static str,
}

impl BinaryWords {
    fn new<R: Read>(mut input: R, what: &'static str) -> Result<Self> {
        let mut data = Vec::new();
        input
            .read_to_end(&mut data)
            .map_err(|e| Error::format(what, e.to_string()))?;
        if !data.starts_with(MAGIC) {
            return Err(Error::format(what, "bad magic, expected T2NF"));
        }
        Ok(Self { data, pos: 4, what })
    }

    fn next(&mut self) -> Result<u32> {
        let bytes = self
            .data
            .get(self.pos..self.pos + 4)
            .ok_or_else(|| Error::format(self.what, "truncated data"))?;
        self.pos += 4;
        Ok(u32::from_le_bytes(bytes.try_into().expect("4 bytes")))
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::format(self.what, "trailing bytes"));
        }
        Ok(())
    }
}

fn check_sequence(prediction: &[Frame], background: &Frame) -> Result<()> {
    if prediction.is_empty() {
        return Err(Error::arg("prediction must contain at least one frame (T >= 0)"));
    }
    if prediction.len() > u32::MAX as usize - 1 {
        return Err(Error::arg("prediction horizon too long"));
    }
    for (t, f) in prediction.iter().enumerate() {
        if f.dims() != background.dims() {
            return Err(Error::arg(format!(
                "prediction frame {t} is {:?}, background is {:?}",
                f.dims(),
                background.dims()
            )));
        }
    }
    Ok(())
}

/// Compute the O (T2NO) and D (T2ND) fields from a predicted sequence
/// `I_0..I_T` and a background frame.
///
/// `O[i,j]` is the first `t` whose difference is at least `tau_o`;
/// `D[i,j]` is the first `t >= O[i,j]` whose difference is at most `tau_d`.
/// Missing events stay `INFINITY`.
pub fn compute_t2no_t2nd(
    prediction: &[Frame],
    background: &Frame,
    thr: Thresholds,
) -> Result<(TimeField, TimeField)> {
    check_sequence(prediction, background)?;
    let (h, w) = background.dims();
    let mut occ = TimeField::infinite(h, w);
    let mut dep = TimeField::infinite(h, w);
    let bg = background.pixels();
    let (tau_o, tau_d) = (thr.tau_o, thr.tau_d);

    // Frame-major sweep: each pixel is a tiny state machine that first waits
    // for occupancy, then for departure (checked from the occupancy frame on).
    let mut open = h * w;
    for (t, frame) in prediction.iter().enumerate() {
        let t = FrameTime(t as u32);
        for (idx, (px, b)) in frame.pixels().iter().zip(bg).enumerate() {
            if dep.values[idx].is_finite() {
                continue;
            }
            let delta = pixel_difference(*px, *b);
            if !occ.values[idx].is_finite() {
                if delta < tau_o {
                    continue;
                }
                occ.values[idx] = t;
            }
            if delta <= tau_d {
                dep.values[idx] = t;
                open -= 1;
            }
        }
        if open == 0 {
            break;
        }
    }
    Ok((occ, dep))
}

/// Per-pixel list of alternating occupancy / departure times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyList {
    height: usize,
    width: usize,
    capacity: usize,
    times: Vec<FrameTime>,
}

impl OccupancyList {
    pub fn from_times(
        height: usize,
        width: usize,
        capacity: usize,
        times: Vec<FrameTime>,
    ) -> Result<Self> {
        if capacity < 2 || capacity % 2 != 0 {
            return Err(Error::arg(format!("list capacity must be even and >= 2, got {capacity}")));
        }
        if times.len() != height * width * capacity {
            return Err(Error::arg(format!(
                "expected {} list entries, got {}",
                height * width * capacity,
                times.len()
            )));
        }
        Ok(Self {
            height,
            width,
            capacity,
            times,
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

    /// `n_L`, the number of slots per pixel.
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn entries(&self, row: usize, col: usize) -> &[FrameTime] {
        self.entries_at(row * self.width + col)
    }

    pub fn entries_at(&self, idx: usize) -> &[FrameTime] {
        &self.times[idx * self.capacity..(idx + 1) * self.capacity]
    }

    /// The `(occupancy, departure)` pairs stored at a pixel, skipping empty slots.
    pub fn windows_at(&self, idx: usize) -> impl Iterator<Item = (FrameTime, FrameTime)> + '_ {
        self.entries_at(idx)
            .chunks_exact(2)
            .map(|c| (c[0], c[1]))
            .take_while(|(o, _)| o.is_finite())
    }

    /// The first window of every pixel as a pair of fields.
    pub fn first_window(&self) -> (TimeField, TimeField) {
        let n = self.height * self.width;
        let occ = (0..n).map(|i| self.times[i * self.capacity]).collect();
        let dep = (0..n).map(|i| self.times[i * self.capacity + 1]).collect();
        (
            TimeField::from_values(self.height, self.width, occ).expect("sizes match"),
            TimeField::from_values(self.height, self.width, dep).expect("sizes match"),
        )
    }

    /// Same layout as [`TimeField::write_binary`] with a u32 `n_L` after `W`.
    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(MAGIC)?;
        for v in [self.height, self.width, self.capacity] {
            out.write_all(&(v as u32).to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(self.times.len() * 4);
        for v in &self.times {
            buf.extend_from_slice(&v.to_raw().to_le_bytes());
        }
        out.write_all(&buf)
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_binary(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_binary<R: Read>(input: R) -> Result<Self> {
        let mut words = BinaryWords::new(input, "occupancy list")?;
        let height = words.next()? as usize;
        let width = words.next()? as usize;
        let capacity = words.next()? as usize;
        let times = (0..height * width * capacity)
            .map(|_| words.next().map(FrameTime::from_raw))
            .collect::<Result<Vec<_>>>()?;
        words.finish()?;
        OccupancyList::from_times(height, width, capacity, times)
    }
}

/// Repeat the occupancy / departure scans until the horizon is exhausted or
/// `capacity` entries are filled. The first two entries of every pixel equal
/// the output of [`compute_t2no_t2nd`].
pub fn compute_occupancy_list(
    prediction: &[Frame],
    background: &Frame,
    thr: Thresholds,
    capacity: usize,
) -> Result<OccupancyList> {
    if capacity < 2 || capacity % 2 != 0 {
        return Err(Error::arg(format!("list capacity must be even and >= 2, got {capacity}")));
    }
    check_sequence(prediction, background)?;
    let (h, w) = background.dims();
    let mut times = vec![FrameTime::INFINITY; h * w * capacity];
    // slots filled per pixel; even = waiting for occupancy, odd = for departure
    let mut filled = vec![0usize; h * w];
    let bg = background.pixels();

    for (t, frame) in prediction.iter().enumerate() {
        let t = FrameTime(t as u32);
        for (idx, (px, b)) in frame.pixels().iter().zip(bg).enumerate() {
            let k = filled[idx];
            if k == capacity {
                continue;
            }
            let delta = pixel_difference(*px, *b);
            let slot = &mut times[idx * capacity..(idx + 1) * capacity];
            if k % 2 == 0 {
                // A fresh occupancy scan starts the frame after a departure.
                let resumes_after = k > 0 && slot[k - 1] == t;
                if resumes_after || delta < thr.tau_o {
                    continue;
                }
                slot[k] = t;
                filled[idx] = k + 1;
            }
            if delta <= thr.tau_d {
                let k = filled[idx];
                slot[k] = t;
                filled[idx] = k + 1;
            }
        }
    }
    OccupancyList::from_times(h, w, capacity, times)
}

/// Weighted squared error between two pairs of fields, with `INFINITY`
/// mapped to `horizon_cap` before differencing.
#[allow(clippy::too_many_arguments)]
pub fn prediction_error(
    occ_true: &TimeField,
    dep_true: &TimeField,
    occ_pred: &TimeField,
    dep_pred: &TimeField,
    alpha: f64,
    beta: f64,
    horizon_cap: u32,
) -> Result<f64> {
    let dims = occ_true.dims();
    if [dep_true, occ_pred, dep_pred].iter().any(|f| f.dims() != dims) {
        return Err(Error::arg("prediction error needs fields of matching dimensions"));
    }
    let sq = |a: &TimeField, b: &TimeField| -> f64 {
        a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| {
                let d = x.capped(horizon_cap) as f64 - y.capped(horizon_cap) as f64;
                d * d
            })
            .sum()
    };
    Ok(alpha * sq(occ_true, occ_pred) + beta * sq(dep_true, dep_pred))
}
