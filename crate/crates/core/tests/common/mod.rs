//! Brute-force oracles and generators shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sigver::mlp::{MlpModel, Sample};
use sigver::{BinaryRaster, GrayRaster};

/// Exhaustive between-class-variance argmax straight from the pixels.
/// Compared as exact rationals; the first maximum wins.
pub fn otsu_oracle(gray: &GrayRaster) -> u8 {
    let px = gray.pixels();
    let first = px[0];
    if px.iter().all(|&p| p == first) {
        return first;
    }
    // sigma_b^2 * N^2 = (S0*n1 - S1*n0)^2 / (n0*n1)
    let mut best: Option<(u128, u128, u8)> = None;
    for t in 1..=255u16 {
        let (mut n0, mut s0, mut n1, mut s1) = (0i128, 0i128, 0i128, 0i128);
        for &p in px {
            if (p as u16) < t {
                n0 += 1;
                s0 += p as i128;
            } else {
                n1 += 1;
                s1 += p as i128;
            }
        }
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let d = (s0 * n1 - s1 * n0).unsigned_abs();
        let num = d * d;
        let den = (n0 * n1) as u128;
        let better = match best {
            None => true,
            Some((bn, bd, _)) => num * bd > bn * den,
        };
        if better {
            best = Some((num, den, t as u8));
        }
    }
    best.map_or(first, |(_, _, t)| t)
}

/// Unordered pairs of 8-adjacent ink pixels lying in the same
/// `seg_w` x `seg_h` tile, found by scanning every neighbour of every pixel.
pub fn adjacent_pairs_within_tiles(b: &BinaryRaster, seg_w: usize, seg_h: usize) -> u64 {
    let mut ordered = 0u64;
    for y in 0..b.height() {
        for x in 0..b.width() {
            if !b.get(x, y) {
                continue;
            }
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if nx < 0 || ny < 0 || nx as usize >= b.width() || ny as usize >= b.height() {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    if b.get(nx, ny) && nx / seg_w == x / seg_w && ny / seg_h == y / seg_h {
                        ordered += 1;
                    }
                }
            }
        }
    }
    ordered / 2
}

/// Random grayscale image from one of several intensity distributions.
pub fn random_gray(rng: &mut ChaCha8Rng) -> GrayRaster {
    let w = rng.gen_range(1..=64);
    let h = rng.gen_range(1..=64);
    let kind = rng.gen_range(0..5);
    let lo: u8 = rng.gen();
    let hi: u8 = rng.gen();
    let levels: Vec<u8> = (0..rng.gen_range(1..=4)).map(|_| rng.gen()).collect();
    GrayRaster::from_fn(w, h, |_, _| match kind {
        0 => rng.gen(),
        1 => {
            let centre = if rng.gen_bool(0.3) { lo } else { hi } as i32;
            (centre + rng.gen_range(-20..=20)).clamp(0, 255) as u8
        }
        2 => levels[rng.gen_range(0..levels.len())],
        3 => lo,
        _ => rng.gen_range(lo.min(hi)..=lo.max(hi)),
    })
}

pub fn random_binary(
    rng: &mut ChaCha8Rng,
    width: usize,
    height: usize,
    density: f64,
) -> BinaryRaster {
    BinaryRaster::from_fn(width, height, |_, _| rng.gen_bool(density))
}

/// Random blobs: filled discs and bars, the kind of shapes thinning sees.
pub fn random_shapes(rng: &mut ChaCha8Rng) -> BinaryRaster {
    let (w, h) = (rng.gen_range(8..=80), rng.gen_range(8..=80));
    let mut b = BinaryRaster::empty(w, h);
    for _ in 0..rng.gen_range(1..=6) {
        let (cx, cy) = (rng.gen_range(0..w) as isize, rng.gen_range(0..h) as isize);
        let (rx, ry) = (rng.gen_range(1..=12isize), rng.gen_range(1..=12isize));
        let disc = rng.gen_bool(0.5);
        for y in (cy - ry)..=(cy + ry) {
            for x in (cx - rx)..=(cx + rx) {
                if x < 0 || y < 0 || x as usize >= w || y as usize >= h {
                    continue;
                }
                let (dx, dy) = ((x - cx) as f64 / rx as f64, (y - cy) as f64 / ry as f64);
                if !disc || dx * dx + dy * dy <= 1.0 {
                    b.set(x as usize, y as usize, true);
                }
            }
        }
    }
    b
}

/// One-pixel line through the centre of a 240x240 canvas, `degrees`
/// counter-clockwise from horizontal as seen on screen.
pub fn line_at(degrees: f64, len: f64) -> BinaryRaster {
    let mut b = BinaryRaster::empty(240, 240);
    let (s, c) = degrees.to_radians().sin_cos();
    let steps = (len * 4.0) as i32;
    for i in -steps / 2..=steps / 2 {
        let t = i as f64 / 4.0;
        let x = (120.0 + t * c).round() as usize;
        let y = (120.0 - t * s).round() as usize;
        b.set(x, y, true);
    }
    b
}

/// Largest per-parameter relative error between backprop and the batch
/// mse's numerical derivative.
///
/// The numerical side is a Richardson-extrapolated central difference
/// (steps `h` and `h/2`), which keeps truncation error far below the
/// tolerance without taking steps small enough for rounding noise to swamp
/// gradients of order 1e-7.
pub fn gradient_check(model: &MlpModel<f64>, batch: &[Sample<f64>]) -> f64 {
    const H: f64 = 1e-3;
    let analytic: Vec<f64> = model.gradients(batch).unwrap().iter().copied().collect();
    assert_eq!(analytic.len(), model.param_count());
    let mut worst = 0.0f64;
    for (k, &a) in analytic.iter().enumerate() {
        let loss_at = |delta: f64| {
            let mut m = model.clone();
            let p = m
                .layers_mut()
                .iter_mut()
                .flat_map(|l| l.params_mut())
                .nth(k)
                .unwrap();
            *p += delta;
            m.mse(batch).unwrap()
        };
        let central = |h: f64| (loss_at(h) - loss_at(-h)) / (2.0 * h);
        let numeric = (4.0 * central(H / 2.0) - central(H)) / 3.0;
        let denom = a.abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((a - numeric).abs() / denom);
    }
    worst
}

/// Random network of shape [d, h1, h2, 1] and a batch for it.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (MlpModel<f64>, Vec<Sample<f64>>) {
    let dims = [
        rng.gen_range(1..=20),
        rng.gen_range(1..=16),
        rng.gen_range(1..=16),
        1,
    ];
    let mut model = MlpModel::<f64>::init(&dims, rng.gen()).unwrap();
    for p in model.layers_mut().iter_mut().flat_map(|l| l.params_mut()) {
        *p *= rng.gen_range(0.5..3.0);
    }
    let batch = (0..rng.gen_range(1..=8))
        .map(|_| {
            let x = (0..dims[0]).map(|_| rng.gen_range(-1.0..1.0)).collect();
            Sample::new(x, if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
        })
        .collect();
    (model, batch)
}
