//! Principal-axis skew estimation and rotation.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::raster::BinaryRaster;

/// Orientation of the content's principal axis, counterclockwise from +x,
/// always in (−π/2, π/2].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct SkewAngle(f64);

impl SkewAngle {
    /// Wraps any finite angle into (−π/2, π/2].
    pub fn from_radians(radians: f64) -> Self {
        let mut r = radians % PI;
        if r <= -FRAC_PI_2 {
            r += PI;
        } else if r > FRAC_PI_2 {
            r -= PI;
        }
        Self(r)
    }

    pub fn from_degrees(degrees: f64) -> Self {
        Self::from_radians(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }
}

/// Centroid of the ink pixels in image coordinates.
pub fn ink_centroid(b: &BinaryRaster) -> Option<(f64, f64)> {
    let (mut n, mut sx, mut sy) = (0usize, 0.0, 0.0);
    for (x, y) in b.ink_pixels() {
        n += 1;
        sx += x as f64;
        sy += y as f64;
    }
    (n > 0).then(|| (sx / n as f64, sy / n as f64))
}

/// θ = ½·atan2(2μ11, μ20 − μ02) over ink coordinates with y flipped up.
///
/// A content with μ11 = 0 and μ20 = μ02 has no preferred axis and yields 0.
pub fn estimate_skew(b: &BinaryRaster) -> Result<SkewAngle> {
    let n = b.ink_count();
    if n < 2 {
        return Err(Error::InsufficientInk(n));
    }
    let (cx, cy) = ink_centroid(b).expect("ink present");
    let (mut mu20, mut mu02, mut mu11) = (0.0, 0.0, 0.0);
    for (x, y) in b.ink_pixels() {
        let dx = x as f64 - cx;
        let dy = -(y as f64 - cy);
        mu20 += dx * dx;
        mu02 += dy * dy;
        mu11 += dx * dy;
    }
    if mu11 == 0.0 && mu20 == mu02 {
        return Ok(SkewAngle(0.0));
    }
    Ok(SkewAngle::from_radians(
        0.5 * (2.0 * mu11).atan2(mu20 - mu02),
    ))
}

/// Rotates the content by −`angle` about its ink centroid.
///
/// Output pixels are inverse-mapped into the source with nearest-neighbour
/// sampling. The canvas grows to hold the whole rotated source rectangle.
pub fn deskew(b: &BinaryRaster, angle: SkewAngle) -> BinaryRaster {
    let (cx, cy) = ink_centroid(b).unwrap_or((
        (b.width() as f64 - 1.0) / 2.0,
        (b.height() as f64 - 1.0) / 2.0,
    ));
    let (sin, cos) = angle.radians().sin_cos();

    // image coords (y down): a rotation by φ in the math sense maps
    // (x, y) to (x cosφ + y sinφ, −x sinφ + y cosφ); forward uses φ = −θ
    let forward = |x: f64, y: f64| (x * cos - y * sin, x * sin + y * cos);
    let inverse = |x: f64, y: f64| (x * cos + y * sin, -x * sin + y * cos);

    let (w, h) = (b.width() as f64, b.height() as f64);
    let corners = [
        (0.0, 0.0),
        (w - 1.0, 0.0),
        (0.0, h - 1.0),
        (w - 1.0, h - 1.0),
    ];
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (x, y) in corners {
        let (rx, ry) = forward(x - cx, y - cy);
        min_x = min_x.min(rx);
        min_y = min_y.min(ry);
        max_x = max_x.max(rx);
        max_y = max_y.max(ry);
    }
    let (ox, oy) = ((min_x + 0.5).floor(), (min_y + 0.5).floor());
    let out_w = ((max_x + 0.5).floor() - ox) as usize + 1;
    let out_h = ((max_y + 0.5).floor() - oy) as usize + 1;

    BinaryRaster::from_fn(out_w, out_h, |u, v| {
        let (sx, sy) = inverse(u as f64 + ox, v as f64 + oy);
        let sx = (sx + cx + 0.5).floor();
        let sy = (sy + cy + 0.5).floor();
        sx >= 0.0 && sy >= 0.0 && sx < w && sy < h && b.get(sx as usize, sy as usize)
    })
}
