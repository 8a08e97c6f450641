//! Zoning features: per-tile ink counts ("energy"), per-tile folded
//! chain-code direction histograms, and the bounding-box aspect ratio.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::preprocess::{
    preprocess_pipeline, SegmentGrid, CANONICAL_HEIGHT, CANONICAL_WIDTH, GRID_COLS, GRID_ROWS,
};
use crate::raster::{BinaryRaster, GrayRaster};
use crate::scalar::Scalar;

pub const SEGMENTS: usize = GRID_ROWS * GRID_COLS;
pub const DIRECTION_CLASSES: usize = 4;

/// Version of the ordering + scaling convention below. Bump on any change.
pub const SCALING_VERSION: u32 = 1;

/// Tile area of the canonical 200×100 raster.
pub const SEGMENT_AREA: usize = (CANONICAL_WIDTH / GRID_COLS) * (CANONICAL_HEIGHT / GRID_ROWS);
/// Upper bound of any one direction count: each ink pixel has at most one
/// forward neighbour per class, so a class never exceeds the tile's ink.
pub const HISTOGRAM_CAP: usize = SEGMENT_AREA;
/// Aspect ratios above this clamp to +1 after scaling.
pub const ASPECT_CAP: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layout {
    /// aspect + 100 energies
    Energy,
    /// 400 direction counts
    Direction,
    /// aspect + 100 energies + 400 direction counts
    Combined,
}

#[allow(clippy::len_without_is_empty)]
impl Layout {
    pub const ALL: [Layout; 3] = [Layout::Energy, Layout::Direction, Layout::Combined];

    pub fn len(self) -> usize {
        match self {
            Layout::Energy => 1 + SEGMENTS,
            Layout::Direction => SEGMENTS * DIRECTION_CLASSES,
            Layout::Combined => 1 + SEGMENTS + SEGMENTS * DIRECTION_CLASSES,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Layout::Energy => "energy",
            Layout::Direction => "direction",
            Layout::Combined => "combined",
        }
    }

    pub fn from_input_len(n: usize) -> Option<Layout> {
        Self::ALL.into_iter().find(|l| l.len() == n)
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "energy" => Ok(Layout::Energy),
            "direction" => Ok(Layout::Direction),
            "combined" => Ok(Layout::Combined),
            other => Err(Error::InvalidArgument(format!("unknown layout {other:?}"))),
        }
    }
}

/// Folded Freeman direction: codes 4–7 are the reverses of 0–3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DirectionClass(u8);

impl DirectionClass {
    pub fn from_freeman(code: u8) -> Self {
        assert!(code < 8, "Freeman codes are 0..8");
        Self(code % 4)
    }

    pub fn code(self) -> u8 {
        self.0
    }
}

/// Forward neighbour offsets (dx, dy) in image coordinates and their class:
/// E, NE, N, NW. Checking only these counts each 8-adjacent pair once.
pub const FORWARD_OFFSETS: [(isize, isize, DirectionClass); 4] = [
    (1, 0, DirectionClass(0)),
    (1, -1, DirectionClass(1)),
    (0, -1, DirectionClass(2)),
    (-1, -1, DirectionClass(3)),
];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T> {
    layout: Layout,
    values: Vec<T>,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn new(layout: Layout, values: Vec<T>) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::LayoutMismatch(format!(
                "{layout} needs {} values, got {}",
                layout.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "feature values must be finite".into(),
            ));
        }
        Ok(Self { layout, values })
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

/// Ink count of every tile, in grid order.
pub fn energy_densities(grid: &SegmentGrid) -> Vec<u32> {
    grid.segments()
        .iter()
        .map(|s| s.ink_count() as u32)
        .collect()
}

/// Folded direction histogram of one tile, pairs crossing its border ignored.
pub fn segment_direction_histogram(seg: &BinaryRaster) -> [u32; DIRECTION_CLASSES] {
    let mut hist = [0u32; DIRECTION_CLASSES];
    for (x, y) in seg.ink_pixels() {
        for &(dx, dy, class) in &FORWARD_OFFSETS {
            if seg.get_or_bg(x as isize + dx, y as isize + dy) {
                hist[class.0 as usize] += 1;
            }
        }
    }
    hist
}

/// 400 counts: segment-major, direction-class-minor.
pub fn chain_code_histograms(grid: &SegmentGrid) -> Vec<u32> {
    grid.segments()
        .iter()
        .flat_map(segment_direction_histogram)
        .collect()
}

/// Unscaled measurements of one signature, enough for every layout.
#[derive(Debug, Clone, PartialEq)]
pub struct RawFeatures {
    pub aspect: f64,
    pub energies: Vec<u32>,
    pub histograms: Vec<u32>,
}

impl RawFeatures {
    pub fn from_grid(grid: &SegmentGrid, aspect: f64) -> Self {
        Self {
            aspect,
            energies: energy_densities(grid),
            histograms: chain_code_histograms(grid),
        }
    }

    pub fn from_image(gray: &GrayRaster) -> Result<Self> {
        let (grid, aspect) = preprocess_pipeline(gray)?;
        Ok(Self::from_grid(&grid, aspect))
    }

    /// Assembled and scaled vector for `layout`.
    pub fn vector<T: Scalar>(&self, layout: Layout) -> Result<FeatureVector<T>> {
        let v = assemble(
            layout,
            Some(self.aspect),
            Some(&self.energies),
            Some(&self.histograms),
        )?;
        Ok(scale(&v))
    }
}

/// Concatenates the components `layout` asks for, unscaled.
pub fn assemble<T: Scalar>(
    layout: Layout,
    aspect: Option<f64>,
    energies: Option<&[u32]>,
    histograms: Option<&[u32]>,
) -> Result<FeatureVector<T>> {
    let missing = |what: &str| Error::LayoutMismatch(format!("{layout} layout needs {what}"));
    let mut values = Vec::with_capacity(layout.len());
    if matches!(layout, Layout::Energy | Layout::Combined) {
        values.push(T::lit(aspect.ok_or_else(|| missing("the aspect ratio"))?));
        let e = energies.ok_or_else(|| missing("energies"))?;
        if e.len() != SEGMENTS {
            return Err(Error::LayoutMismatch(format!(
                "expected {SEGMENTS} energies, got {}",
                e.len()
            )));
        }
        values.extend(e.iter().map(|&c| T::lit(f64::from(c))));
    }
    if matches!(layout, Layout::Direction | Layout::Combined) {
        let h = histograms.ok_or_else(|| missing("direction histograms"))?;
        if h.len() != SEGMENTS * DIRECTION_CLASSES {
            return Err(Error::LayoutMismatch(format!(
                "expected {} histogram counts, got {}",
                SEGMENTS * DIRECTION_CLASSES,
                h.len()
            )));
        }
        values.extend(h.iter().map(|&c| T::lit(f64::from(c))));
    }
    FeatureVector::new(layout, values)
}

fn scale_energy<T: Scalar>(e: T) -> T {
    let area = T::lit(SEGMENT_AREA as f64);
    T::lit(2.0) * e.min(area) / area - T::one()
}

fn scale_count<T: Scalar>(c: T) -> T {
    let cap = T::lit(HISTOGRAM_CAP as f64);
    T::lit(2.0) * c.min(cap) / cap - T::one()
}

fn scale_aspect<T: Scalar>(a: T) -> T {
    let cap = T::lit(ASPECT_CAP);
    T::lit(2.0) * a.max(T::zero()).min(cap) / cap - T::one()
}

/// Fixed affine maps of every component into [−1, 1].
pub fn scale<T: Scalar>(v: &FeatureVector<T>) -> FeatureVector<T> {
    let vals = v.values();
    let mut out = Vec::with_capacity(vals.len());
    let histograms = match v.layout {
        Layout::Energy | Layout::Combined => {
            out.push(scale_aspect(vals[0]));
            out.extend(vals[1..=SEGMENTS].iter().map(|&e| scale_energy(e)));
            &vals[1 + SEGMENTS..]
        }
        Layout::Direction => vals,
    };
    out.extend(histograms.iter().map(|&c| scale_count(c)));
    FeatureVector {
        layout: v.layout,
        values: out,
    }
}

/// Image → scaled feature vector in one call.
pub fn extract<T: Scalar>(gray: &GrayRaster, layout: Layout) -> Result<FeatureVector<T>> {
    RawFeatures::from_image(gray)?.vector(layout)
}
