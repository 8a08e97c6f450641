use crate::error::{Error, Result};
use crate::raster::BinaryRaster;

/// Default canonical size (width × height) before zoning.
pub const CANONICAL_WIDTH: usize = 200;
pub const CANONICAL_HEIGHT: usize = 100;
pub const GRID_ROWS: usize = 10;
pub const GRID_COLS: usize = 10;

/// Inclusive ink bounding box `(x0, y0, x1, y1)`.
pub fn ink_bbox(b: &BinaryRaster) -> Option<(usize, usize, usize, usize)> {
    let mut bbox: Option<(usize, usize, usize, usize)> = None;
    for (x, y) in b.ink_pixels() {
        bbox = Some(match bbox {
            None => (x, y, x, y),
            Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
        });
    }
    bbox
}

pub fn crop_to_content(b: &BinaryRaster) -> Result<BinaryRaster> {
    let (x0, y0, x1, y1) = ink_bbox(b).ok_or(Error::EmptyImage)?;
    Ok(b.sub_raster(x0, y0, x1 - x0 + 1, y1 - y0 + 1))
}

/// Bounding-box height over width.
pub fn aspect_ratio(b: &BinaryRaster) -> Result<f64> {
    let (x0, y0, x1, y1) = ink_bbox(b).ok_or(Error::EmptyImage)?;
    Ok((y1 - y0 + 1) as f64 / (x1 - x0 + 1) as f64)
}

/// Nearest-neighbour resize with `src = floor(dst * src_len / dst_len)`.
pub fn resize_nn(b: &BinaryRaster, width: usize, height: usize) -> Result<BinaryRaster> {
    if width < 10 || height < 10 {
        return Err(Error::BadTargetSize { width, height });
    }
    let (sw, sh) = (b.width(), b.height());
    Ok(BinaryRaster::from_fn(width, height, |x, y| {
        b.get(x * sw / width, y * sh / height)
    }))
}

/// The 10×10 zoning of a raster; tiles are stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentGrid {
    rows: usize,
    cols: usize,
    segment_width: usize,
    segment_height: usize,
    segments: Vec<BinaryRaster>,
}

impl SegmentGrid {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn segment_width(&self) -> usize {
        self.segment_width
    }

    pub fn segment_height(&self) -> usize {
        self.segment_height
    }

    pub fn segments(&self) -> &[BinaryRaster] {
        &self.segments
    }

    pub fn segment(&self, row: usize, col: usize) -> &BinaryRaster {
        &self.segments[row * self.cols + col]
    }

    /// Pixel area of one tile.
    pub fn segment_area(&self) -> usize {
        self.segment_width * self.segment_height
    }
}

pub fn segment_grid(b: &BinaryRaster) -> Result<SegmentGrid> {
    let (w, h) = (b.width(), b.height());
    if w % GRID_COLS != 0 || h % GRID_ROWS != 0 {
        return Err(Error::IndivisibleDimensions {
            width: w,
            height: h,
        });
    }
    let (sw, sh) = (w / GRID_COLS, h / GRID_ROWS);
    let mut segments = Vec::with_capacity(GRID_ROWS * GRID_COLS);
    for r in 0..GRID_ROWS {
        for c in 0..GRID_COLS {
            segments.push(b.sub_raster(c * sw, r * sh, sw, sh));
        }
    }
    Ok(SegmentGrid {
        rows: GRID_ROWS,
        cols: GRID_COLS,
        segment_width: sw,
        segment_height: sh,
        segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crop_single_pixel() {
        let b = BinaryRaster::from_fn(10, 6, |x, y| x == 7 && y == 3);
        let c = crop_to_content(&b).unwrap();
        assert_eq!((c.width(), c.height(), c.ink_count()), (1, 1, 1));
    }

    #[test]
    fn crop_full_canvas_is_identity() {
        let b = BinaryRaster::from_fn(4, 3, |_, _| true);
        assert_eq!(crop_to_content(&b).unwrap(), b);
    }

    #[test]
    fn crop_blank_fails() {
        assert!(matches!(
            crop_to_content(&BinaryRaster::empty(4, 4)),
            Err(Error::EmptyImage)
        ));
        assert!(matches!(
            aspect_ratio(&BinaryRaster::empty(4, 4)),
            Err(Error::EmptyImage)
        ));
    }

    #[test]
    fn aspect_examples() {
        let b = BinaryRaster::from_fn(300, 80, |x, y| {
            (x == 10 || x == 209) && (5..55).contains(&y)
        });
        assert_eq!(aspect_ratio(&b).unwrap(), 0.25);
        let sq = BinaryRaster::from_fn(9, 9, |x, y| x == y);
        assert_eq!(aspect_ratio(&sq).unwrap(), 1.0);
        let px = BinaryRaster::from_fn(9, 9, |x, y| x == 4 && y == 2);
        assert_eq!(aspect_ratio(&px).unwrap(), 1.0);
    }

    #[test]
    fn resize_identity_and_bad_size() {
        let b = BinaryRaster::from_fn(13, 11, |x, y| (x * 7 + y * 3) % 5 == 0);
        assert_eq!(resize_nn(&b, 13, 11).unwrap(), b);
        assert!(matches!(
            resize_nn(&b, 9, 20),
            Err(Error::BadTargetSize { .. })
        ));
        let r = resize_nn(&b, CANONICAL_WIDTH, CANONICAL_HEIGHT).unwrap();
        assert_eq!((r.width(), r.height()), (200, 100));
    }

    #[test]
    fn checkerboard_upscale_makes_blocks() {
        let b = BinaryRaster::new(2, 2, vec![1, 0, 0, 1]).unwrap();
        let r = resize_nn(&b, 20, 20).unwrap();
        for y in 0..20 {
            for x in 0..20 {
                assert_eq!(r.get(x, y), (x < 10) == (y < 10));
            }
        }
    }

    #[test]
    fn grid_of_canonical_raster() {
        let b = BinaryRaster::from_fn(200, 100, |x, y| (x + y) % 3 == 0);
        let g = segment_grid(&b).unwrap();
        assert_eq!(g.segments().len(), 100);
        assert_eq!((g.segment_width(), g.segment_height()), (20, 10));
        let total: usize = g.segments().iter().map(BinaryRaster::ink_count).sum();
        assert_eq!(total, b.ink_count());
        assert_eq!(g.segment(3, 7), &b.sub_raster(140, 30, 20, 10));
    }

    #[test]
    fn grid_needs_divisible_sides() {
        assert!(matches!(
            segment_grid(&BinaryRaster::empty(201, 100)),
            Err(Error::IndivisibleDimensions {
                width: 201,
                height: 100
            })
        ));
    }
}
