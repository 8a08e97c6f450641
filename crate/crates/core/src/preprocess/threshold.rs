//! Global (Otsu) threshold and binarization.

use crate::raster::{BinaryRaster, GrayRaster};

pub fn histogram(gray: &GrayRaster) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &p in gray.pixels() {
        hist[p as usize] += 1;
    }
    hist
}

/// Otsu's threshold for the `pixel < t` ink split.
///
/// Returns the `t` in 0..=255 maximizing the between-class variance of the
/// classes `{v < t}` and `{v >= t}`; the smallest `t` wins ties. An image of
/// a single intensity returns that intensity.
pub fn otsu_threshold(gray: &GrayRaster) -> u8 {
    let hist = histogram(gray);
    let mut levels = hist.iter().enumerate().filter(|(_, &h)| h > 0);
    let first = levels.next().map(|(v, _)| v as u8).unwrap_or(0);
    if levels.next().is_none() {
        return first;
    }

    let total = gray.pixels().len() as i128;
    let sum_total: i128 = hist
        .iter()
        .enumerate()
        .map(|(v, &h)| v as i128 * h as i128)
        .sum();

    // between-class variance for split t is a^2 / (N^2 n0 n1) with
    // a = S0*N - S*n0, so comparing a^2 / (n0 n1) is enough.
    let mut best = Score::zero();
    let mut best_t = 0u8;
    let mut n0: i128 = 0;
    let mut s0: i128 = 0;
    for t in 1..=255usize {
        n0 += hist[t - 1] as i128;
        s0 += (t as i128 - 1) * hist[t - 1] as i128;
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let a = s0 * total - sum_total * n0;
        let cand = Score {
            num: (a * a) as u128,
            den: (n0 * n1) as u128,
        };
        if cand.greater_than(&best) {
            best = cand;
            best_t = t as u8;
        }
    }
    best_t
}

/// Nonnegative fraction compared exactly where `u128` allows.
#[derive(Clone, Copy)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    fn greater_than(&self, other: &Score) -> bool {
        match (
            self.num.checked_mul(other.den),
            other.num.checked_mul(self.den),
        ) {
            (Some(l), Some(r)) => l > r,
            _ => (self.num as f64 / self.den as f64) > (other.num as f64 / other.den as f64),
        }
    }
}

/// Ink is dark: `pixel < t` becomes 1.
pub fn binarize(gray: &GrayRaster, t: u8) -> BinaryRaster {
    BinaryRaster::new(
        gray.width(),
        gray.height(),
        gray.pixels().iter().map(|&p| (p < t) as u8).collect(),
    )
    .expect("same dimensions as a valid gray raster")
}
