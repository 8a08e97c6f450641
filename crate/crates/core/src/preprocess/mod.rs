//! Signature clean-up: binarize, denoise, thin, deskew, crop, resize, zone.

mod geometry;
mod morphology;
mod skew;
mod threshold;

pub use geometry::{
    aspect_ratio, crop_to_content, ink_bbox, resize_nn, segment_grid, SegmentGrid,
    CANONICAL_HEIGHT, CANONICAL_WIDTH, GRID_COLS, GRID_ROWS,
};
pub use morphology::{median_filter3, thin, zhang_suen_pass};
pub use skew::{deskew, estimate_skew, ink_centroid, SkewAngle};
pub use threshold::{binarize, histogram, otsu_threshold};

use crate::error::{Error, Result};
use crate::raster::{to_gray, BinaryRaster, GrayRaster};

/// Every intermediate produced by [`run_stages`].
#[derive(Debug, Clone)]
pub struct Stages {
    pub threshold: u8,
    pub binary: BinaryRaster,
    pub denoised: BinaryRaster,
    pub thinned: BinaryRaster,
    pub skew: SkewAngle,
    pub deskewed: BinaryRaster,
    pub cropped: BinaryRaster,
    pub aspect: f64,
    pub resized: BinaryRaster,
    pub grid: SegmentGrid,
}

pub fn run_stages(gray: &GrayRaster) -> Result<Stages> {
    let threshold = otsu_threshold(gray);
    let binary = binarize(gray, threshold);
    let denoised = median_filter3(&binary);
    let thinned = thin(&denoised);
    let skew = match estimate_skew(&thinned) {
        Ok(a) => a,
        Err(Error::InsufficientInk(0)) => return Err(Error::EmptyImage),
        Err(Error::InsufficientInk(_)) => SkewAngle::default(),
        Err(e) => return Err(e),
    };
    let deskewed = deskew(&thinned, skew);
    let cropped = crop_to_content(&deskewed)?;
    let aspect = aspect_ratio(&cropped)?;
    let resized = resize_nn(&cropped, CANONICAL_WIDTH, CANONICAL_HEIGHT)?;
    let grid = segment_grid(&resized)?;
    Ok(Stages {
        threshold,
        binary,
        denoised,
        thinned,
        skew,
        deskewed,
        cropped,
        aspect,
        resized,
        grid,
    })
}

/// Full pipeline; returns the zoned signature and its aspect ratio.
pub fn preprocess_pipeline(gray: &GrayRaster) -> Result<(SegmentGrid, f64)> {
    let s = run_stages(gray)?;
    Ok((s.grid, s.aspect))
}

/// Gray level of the tile boundaries in [`render_grid`].
pub const GRID_LINE_LEVEL: u8 = 128;

/// Renders a binary raster with the 10×10 tile boundaries burned in.
pub fn render_grid(b: &BinaryRaster) -> GrayRaster {
    let mut g = to_gray(b);
    let (w, h) = (b.width(), b.height());
    for x in 0..w {
        for y in 0..h {
            let on_col = (x * GRID_COLS).is_multiple_of(w) && x > 0;
            let on_row = (y * GRID_ROWS).is_multiple_of(h) && y > 0;
            if on_col || on_row {
                g.set(x, y, GRID_LINE_LEVEL);
            }
        }
    }
    g
}
