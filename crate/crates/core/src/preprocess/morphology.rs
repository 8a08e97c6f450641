//! Binary median filtering and Zhang–Suen thinning.

use crate::raster::BinaryRaster;

/// 3×3 majority filter: a pixel is ink when at least 5 of its 9-neighbourhood
/// are ink. Pixels outside the raster count as background.
pub fn median_filter3(b: &BinaryRaster) -> BinaryRaster {
    let (w, h) = (b.width() as isize, b.height() as isize);
    BinaryRaster::from_fn(b.width(), b.height(), |x, y| {
        let (x, y) = (x as isize, y as isize);
        let mut count = 0;
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx >= 0 && ny >= 0 && nx < w && ny < h && b.get(nx as usize, ny as usize) {
                    count += 1;
                }
            }
        }
        count >= 5
    })
}

/// Neighbour offsets P2..P9: N, NE, E, SE, S, SW, W, NW.
const RING: [(isize, isize); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

/// Runs one Zhang–Suen sub-iteration (`first` selects the south-east pass)
/// and returns the number of deleted pixels.
pub fn zhang_suen_pass(b: &mut BinaryRaster, first: bool) -> usize {
    let mut doomed = Vec::new();
    for (x, y) in b.ink_pixels() {
        let (x, y) = (x as isize, y as isize);
        let p: [bool; 8] = RING.map(|(dx, dy)| b.get_or_bg(x + dx, y + dy));
        let neighbours = p.iter().filter(|&&v| v).count();
        if !(2..=6).contains(&neighbours) {
            continue;
        }
        let transitions = (0..8).filter(|&i| !p[i] && p[(i + 1) % 8]).count();
        if transitions != 1 {
            continue;
        }
        let (n, e, s, w) = (p[0], p[2], p[4], p[6]);
        let keep = if first {
            (n && e && s) || (e && s && w)
        } else {
            (n && e && w) || (n && s && w)
        };
        if !keep {
            doomed.push((x as usize, y as usize));
        }
    }
    for &(x, y) in &doomed {
        b.set(x, y, false);
    }
    doomed.len()
}

/// Zhang–Suen thinning, iterated until a full pass deletes nothing.
pub fn thin(b: &BinaryRaster) -> BinaryRaster {
    let mut out = b.clone();
    loop {
        let removed = zhang_suen_pass(&mut out, true) + zhang_suen_pass(&mut out, false);
        if removed == 0 {
            return out;
        }
    }
}
