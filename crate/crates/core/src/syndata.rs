//! Deterministic synthetic signatures.
//!
//! A signer is a handful of polyline strokes inside a unit box. Genuine
//! samples perturb the control points slightly; skilled forgeries perturb
//! the same strokes five times harder and tilt more. Everything is derived
//! from seeds, so regenerating a dataset reproduces it byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::error::{Error, Result};
use crate::eval::{DatasetManifest, SignerEntry};
use crate::label::Label;
use crate::raster::{save_pgm, GrayRaster};
use crate::seed::{derive_seed, rng_for};

pub const CANVAS_WIDTH: usize = 600;
pub const CANVAS_HEIGHT: usize = 300;
/// Pixel size of the unit box on the canvas, before rotation.
const BOX_WIDTH: f64 = 300.0;
const BOX_HEIGHT: f64 = 100.0;

const BACKGROUND_LEVEL: u8 = 240;
const INK_LEVEL: u8 = 30;
const LEVEL_NOISE: u8 = 15;
/// Fraction of canvas pixels turned into isolated dark specks.
const SPECK_RATE: f64 = 0.0005;

#[derive(Debug, Clone, PartialEq)]
pub struct SignerStyle {
    pub seed: u64,
    /// Control points of each stroke, unit-box coordinates with y down.
    pub strokes: Vec<Vec<(f64, f64)>>,
    /// Pen radius in pixels; strokes are `2r + 1` wide.
    pub thickness: u32,
    pub slant_deg: f64,
}

impl SignerStyle {
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = rng_for(seed, 0);
        let n_strokes = rng.gen_range(3..=7usize);
        let band = 1.0 / n_strokes as f64;
        let strokes = (0..n_strokes)
            .map(|i| {
                let centre = (i as f64 + 0.5) * band;
                let n_points = rng.gen_range(4..=8usize);
                (0..n_points)
                    .map(|_| {
                        let x = (centre + rng.gen_range(-0.6..=0.6) * band).clamp(0.0, 1.0);
                        let y = rng.gen_range(0.05..=0.95);
                        (x, y)
                    })
                    .collect()
            })
            .collect();
        Self {
            seed,
            strokes,
            thickness: rng.gen_range(1..=3),
            slant_deg: rng.gen_range(-30.0..=30.0),
        }
    }
}

/// Perturbation applied to a signer's strokes for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleKind {
    pub label: Label,
    /// Control-point jitter as a fraction of the box size.
    pub jitter: f64,
    /// Extra rotation, uniform in ±this many degrees.
    pub slant_noise_deg: f64,
}

impl SampleKind {
    pub const GENUINE: SampleKind = SampleKind {
        label: Label::Genuine,
        jitter: 0.02,
        slant_noise_deg: 2.0,
    };
    pub const FORGERY: SampleKind = SampleKind {
        label: Label::Forgery,
        jitter: 0.10,
        slant_noise_deg: 8.0,
    };

    pub fn for_label(label: Label) -> Self {
        match label {
            Label::Genuine => Self::GENUINE,
            Label::Forgery => Self::FORGERY,
        }
    }
}

fn stamp(img: &mut GrayRaster, cx: f64, cy: f64, radius: u32, level: u8) {
    let r = radius as isize;
    let (px, py) = (cx.round() as isize, cy.round() as isize);
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy > r * r + r {
                continue;
            }
            let (x, y) = (px + dx, py + dy);
            if x >= 0 && y >= 0 && (x as usize) < img.width() && (y as usize) < img.height() {
                img.set(x as usize, y as usize, level);
            }
        }
    }
}

pub fn gen_signature(style: &SignerStyle, kind: SampleKind, sample_seed: u64) -> GrayRaster {
    let stream = match kind.label {
        Label::Genuine => 1,
        Label::Forgery => 2,
    };
    let mut rng = rng_for(derive_seed(style.seed, stream), sample_seed);

    let angle = (style.slant_deg + rng.gen_range(-1.0..=1.0) * kind.slant_noise_deg).to_radians();
    let (sin, cos) = angle.sin_cos();
    let (ox, oy) = (CANVAS_WIDTH as f64 / 2.0, CANVAS_HEIGHT as f64 / 2.0);
    // unit box → canvas, rotated counterclockwise on screen about the centre
    let place = |u: f64, v: f64| {
        let x = (u - 0.5) * BOX_WIDTH;
        let y = (v - 0.5) * BOX_HEIGHT;
        (ox + x * cos + y * sin, oy - x * sin + y * cos)
    };

    let mut img = GrayRaster::from_fn(CANVAS_WIDTH, CANVAS_HEIGHT, |_, _| 0);
    for p in 0..CANVAS_WIDTH * CANVAS_HEIGHT {
        let level = BACKGROUND_LEVEL - rng.gen_range(0..=LEVEL_NOISE);
        img.set(p % CANVAS_WIDTH, p / CANVAS_WIDTH, level);
    }

    for stroke in &style.strokes {
        let points: Vec<(f64, f64)> = stroke
            .iter()
            .map(|&(u, v)| {
                let u = u + rng.gen_range(-1.0..=1.0) * kind.jitter;
                let v = v + rng.gen_range(-1.0..=1.0) * kind.jitter;
                place(u, v)
            })
            .collect();
        for seg in points.windows(2) {
            let ((x0, y0), (x1, y1)) = (seg[0], seg[1]);
            let steps = ((x1 - x0).hypot(y1 - y0) * 2.0).ceil().max(1.0) as usize;
            for s in 0..=steps {
                let t = s as f64 / steps as f64;
                let level = INK_LEVEL + rng.gen_range(0..=LEVEL_NOISE);
                stamp(
                    &mut img,
                    x0 + t * (x1 - x0),
                    y0 + t * (y1 - y0),
                    style.thickness,
                    level,
                );
            }
        }
    }

    let specks = (SPECK_RATE * (CANVAS_WIDTH * CANVAS_HEIGHT) as f64) as usize;
    for _ in 0..specks {
        let (x, y) = (
            rng.gen_range(0..CANVAS_WIDTH),
            rng.gen_range(0..CANVAS_HEIGHT),
        );
        img.set(x, y, INK_LEVEL);
    }
    img
}

/// Style seed of signer `id` (1-based) under a dataset seed.
pub fn signer_seed(dataset_seed: u64, id: usize) -> u64 {
    derive_seed(dataset_seed, id as u64)
}

/// Seed of the `n`-th (1-based) sample of a class.
pub fn sample_seed(label: Label, n: usize) -> u64 {
    match label {
        Label::Genuine => n as u64,
        Label::Forgery => (1 << 32) | n as u64,
    }
}

/// In-memory samples for one signer: genuine first, then forgeries.
pub fn gen_signer_samples(
    dataset_seed: u64,
    id: usize,
    n_genuine: usize,
    n_forgery: usize,
) -> (Vec<GrayRaster>, Vec<GrayRaster>) {
    let style = SignerStyle::from_seed(signer_seed(dataset_seed, id));
    let make = |label: Label, count: usize| {
        (1..=count)
            .map(|n| gen_signature(&style, SampleKind::for_label(label), sample_seed(label, n)))
            .collect()
    };
    (
        make(Label::Genuine, n_genuine),
        make(Label::Forgery, n_forgery),
    )
}

pub fn sample_file_name(id: usize, label: Label, n: usize) -> String {
    let tag = match label {
        Label::Genuine => 'g',
        Label::Forgery => 'f',
    };
    format!("s{id}_{tag}{n}.pgm")
}

pub const MANIFEST_NAME: &str = "manifest.txt";

/// Writes `n_signers × (n_genuine + n_forgery)` PGMs plus `manifest.txt`
/// into `out_dir`.
pub fn gen_dataset(
    n_signers: usize,
    n_genuine: usize,
    n_forgery: usize,
    seed: u64,
    out_dir: impl AsRef<Path>,
) -> Result<DatasetManifest> {
    if n_signers == 0 || n_genuine == 0 || n_forgery == 0 {
        return Err(Error::InvalidArgument(
            "signer and per-class sample counts must be at least 1".into(),
        ));
    }
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut signers = Vec::with_capacity(n_signers);
    for id in 1..=n_signers {
        let (genuine, forgery) = gen_signer_samples(seed, id, n_genuine, n_forgery);
        let write = |label: Label, images: Vec<GrayRaster>| -> Result<Vec<PathBuf>> {
            images
                .iter()
                .enumerate()
                .map(|(i, img)| {
                    let path = out_dir.join(sample_file_name(id, label, i + 1));
                    save_pgm(img, &path)?;
                    Ok(path)
                })
                .collect()
        };
        signers.push(SignerEntry {
            id: id.to_string(),
            genuine: write(Label::Genuine, genuine)?,
            forgery: write(Label::Forgery, forgery)?,
        });
    }
    let manifest = DatasetManifest::new(signers)?;
    let path = out_dir.join(MANIFEST_NAME);
    fs::write(&path, manifest.to_text(Some(out_dir))).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{binarize, otsu_threshold};

    #[test]
    fn style_ranges() {
        for seed in 0..50 {
            let s = SignerStyle::from_seed(seed);
            assert!((3..=7).contains(&s.strokes.len()));
            assert!(s.strokes.iter().all(|st| (4..=8).contains(&st.len())));
            assert!(s
                .strokes
                .iter()
                .flatten()
                .all(|&(x, y)| (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)));
            assert!((1..=3).contains(&s.thickness));
            assert!((-30.0..=30.0).contains(&s.slant_deg));
            assert_eq!(s, SignerStyle::from_seed(seed));
        }
    }

    #[test]
    fn forgeries_jitter_more() {
        const {
            assert!(SampleKind::FORGERY.jitter > SampleKind::GENUINE.jitter);
            assert!(SampleKind::FORGERY.slant_noise_deg > SampleKind::GENUINE.slant_noise_deg);
        }
    }

    #[test]
    fn generation_is_deterministic_and_inked() {
        let style = SignerStyle::from_seed(17);
        for kind in [SampleKind::GENUINE, SampleKind::FORGERY] {
            let a = gen_signature(&style, kind, 3);
            assert_eq!(a, gen_signature(&style, kind, 3));
            assert_ne!(a, gen_signature(&style, kind, 4));
            assert_eq!((a.width(), a.height()), (CANVAS_WIDTH, CANVAS_HEIGHT));
            let b = binarize(&a, otsu_threshold(&a));
            assert!(b.ink_count() > 0);
        }
    }

    #[test]
    fn zero_signers_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(gen_dataset(0, 1, 1, 0, dir.path()).is_err());
    }
}
