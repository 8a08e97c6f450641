//! Raster containers and Netpbm graymap I/O.
//!
//! Everything is row-major with the origin at the top-left corner and y
//! growing downwards.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayRaster {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayRaster {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::DimensionMismatch {
                width,
                height,
                len: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(
            width > 0 && height > 0,
            "raster dimensions must be positive"
        );
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut r = Self::filled(width, height, 0);
        for y in 0..height {
            for x in 0..width {
                r.pixels[y * width + x] = f(x, y);
            }
        }
        r
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }
}

/// Bitmap where 1 is ink and 0 is background.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryRaster {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl BinaryRaster {
    pub fn new(width: usize, height: usize, bits: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || bits.len() != width * height {
            return Err(Error::DimensionMismatch {
                width,
                height,
                len: bits.len(),
            });
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument(
                "binary raster values must be 0 or 1".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    /// All-background raster.
    pub fn empty(width: usize, height: usize) -> Self {
        assert!(
            width > 0 && height > 0,
            "raster dimensions must be positive"
        );
        Self {
            width,
            height,
            bits: vec![0; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut r = Self::empty(width, height);
        for y in 0..height {
            for x in 0..width {
                r.bits[y * width + x] = f(x, y) as u8;
            }
        }
        r
    }

    /// Parses rows of `'1'`/`'#'` (ink) and anything else (background).
    pub fn from_rows(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        Self::from_fn(width, height, |x, y| {
            matches!(rows[y].chars().nth(x), Some('1') | Some('#'))
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x] != 0
    }

    /// Signed lookup; anything outside the raster reads as background.
    #[inline]
    pub fn get_or_bg(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.get(x as usize, y as usize)
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, ink: bool) {
        self.bits[y * self.width + x] = ink as u8;
    }

    pub fn ink_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b != 0).count()
    }

    /// Coordinates of every ink pixel in scan order.
    pub fn ink_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0)
            .map(move |(i, _)| (i % w, i / w))
    }

    /// Copies the `w`×`h` window whose top-left corner is `(x0, y0)`.
    pub fn sub_raster(&self, x0: usize, y0: usize, w: usize, h: usize) -> Self {
        assert!(x0 + w <= self.width && y0 + h <= self.height);
        let mut out = Self::empty(w, h);
        for y in 0..h {
            let src = (y0 + y) * self.width + x0;
            out.bits[y * w..(y + 1) * w].copy_from_slice(&self.bits[src..src + w]);
        }
        out
    }

    /// `true` if every ink pixel of `self` is also ink in `other`.
    pub fn is_subset_of(&self, other: &BinaryRaster) -> bool {
        self.width == other.width
            && self.height == other.height
            && self
                .bits
                .iter()
                .zip(&other.bits)
                .all(|(&a, &b)| a == 0 || b != 0)
    }
}

/// Ink renders black (0), background white (255).
pub fn to_gray(binary: &BinaryRaster) -> GrayRaster {
    let pixels = binary
        .bits
        .iter()
        .map(|&b| if b != 0 { 0 } else { 255 })
        .collect();
    GrayRaster {
        width: binary.width,
        height: binary.height,
        pixels,
    }
}

/// Netpbm graymap flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// `P2`, ASCII samples.
    Ascii,
    /// `P5`, one byte per sample.
    Binary,
}

/// Decodes a P2 or P5 graymap. Samples are rescaled to 0–255 when maxval is
/// below 255.
pub fn decode_pgm(data: &[u8]) -> Result<GrayRaster> {
    let mut cur = HeaderCursor { data, pos: 0 };
    let format = match cur.token()? {
        b"P2" => PgmFormat::Ascii,
        b"P5" => PgmFormat::Binary,
        other => {
            return Err(Error::MalformedHeader(format!(
                "bad magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::UnsupportedMaxval(maxval as u32));
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| Error::MalformedHeader("dimensions overflow".into()))?;

    let mut pixels = Vec::with_capacity(expected);
    match format {
        PgmFormat::Binary => {
            // exactly one whitespace byte separates maxval from the raster
            match data.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => {
                    return Err(Error::MalformedHeader(
                        "missing separator after maxval".into(),
                    ))
                }
            }
            let body = &data[cur.pos..];
            if body.len() < expected {
                return Err(Error::TruncatedPixelData {
                    expected,
                    found: body.len(),
                });
            }
            pixels.extend_from_slice(&body[..expected]);
        }
        PgmFormat::Ascii => {
            for _ in 0..expected {
                let tok = match cur.try_token()? {
                    Some(t) => t,
                    None => {
                        return Err(Error::TruncatedPixelData {
                            expected,
                            found: pixels.len(),
                        })
                    }
                };
                let v = parse_usize(tok).ok_or_else(|| {
                    Error::InvalidArgument(format!("bad sample {:?}", String::from_utf8_lossy(tok)))
                })?;
                if v > maxval {
                    return Err(Error::InvalidArgument(format!(
                        "sample {v} exceeds maxval {maxval}"
                    )));
                }
                pixels.push(v as u8);
            }
        }
    }
    if maxval < 255 {
        for p in &mut pixels {
            if usize::from(*p) > maxval {
                return Err(Error::InvalidArgument(format!(
                    "sample {p} exceeds maxval {maxval}"
                )));
            }
            *p = ((usize::from(*p) * 255 + maxval / 2) / maxval) as u8;
        }
    }
    GrayRaster::new(width, height, pixels)
}

pub fn encode_pgm(raster: &GrayRaster, format: PgmFormat) -> Vec<u8> {
    let mut out = Vec::with_capacity(raster.pixels.len() + 32);
    let magic = match format {
        PgmFormat::Ascii => "P2",
        PgmFormat::Binary => "P5",
    };
    out.extend_from_slice(format!("{magic}\n{} {}\n255\n", raster.width, raster.height).as_bytes());
    match format {
        PgmFormat::Binary => out.extend_from_slice(&raster.pixels),
        PgmFormat::Ascii => {
            for row in raster.pixels.chunks(raster.width) {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
    }
    out
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayRaster> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&data)
}

/// Writes a binary (P5) graymap.
pub fn save_pgm(raster: &GrayRaster, path: impl AsRef<Path>) -> Result<()> {
    save_pgm_as(raster, path, PgmFormat::Binary)
}

pub fn save_pgm_as(raster: &GrayRaster, path: impl AsRef<Path>, format: PgmFormat) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode_pgm(raster, format))
        .map_err(|e| Error::io(path, e))
}

struct HeaderCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_ws_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn try_token(&mut self) -> Result<Option<&'a [u8]>> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while let Some(&b) = self.data.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        Ok((self.pos > start).then(|| &self.data[start..self.pos]))
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.try_token()?
            .ok_or_else(|| Error::MalformedHeader("unexpected end of header".into()))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token()?;
        parse_usize(tok).ok_or_else(|| {
            Error::MalformedHeader(format!("bad {what} {:?}", String::from_utf8_lossy(tok)))
        })
    }
}

fn parse_usize(tok: &[u8]) -> Option<usize> {
    std::str::from_utf8(tok).ok()?.parse().ok()
}
