//! Synthetic shapes and seeded noise models for desk-scale experiments.
//!
//! Every generator is a pure function of its inputs and the seed. Noise is
//! drawn from a per-pixel counter-based stream keyed by `(seed, pixel index)`,
//! so outputs are identical no matter how the work is scheduled.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::field::{BinaryMask, ScalarField};

/// Indicator of the disk `(x - cx)^2 + (y - cy)^2 <= r^2` on a `w x h` grid.
/// May be empty for small radii and off-grid centers.
pub fn disk_mask(width: usize, height: usize, cx: f64, cy: f64, radius: f64) -> BinaryMask {
    let r2 = radius * radius;
    BinaryMask::from_fn(width, height, |x, y| {
        let dx = x as f64 - cx;
        let dy = y as f64 - cy;
        dx * dx + dy * dy <= r2
    })
}

/// Axis-aligned filled rectangle covering `[x0, x0+rw) x [y0, y0+rh)`.
pub fn rect_mask(width: usize, height: usize, x0: usize, y0: usize, rw: usize, rh: usize) -> BinaryMask {
    BinaryMask::from_fn(width, height, |x, y| {
        x >= x0 && x < x0 + rw && y >= y0 && y < y0 + rh
    })
}

/// A disk with four axis-aligned rectangular tabs sticking out of it: a
/// compact core with protrusions that a compactness prior should remove.
pub fn disk_with_tabs_mask(
    width: usize,
    height: usize,
    cx: f64,
    cy: f64,
    radius: f64,
    tab_len: usize,
    tab_width: usize,
) -> BinaryMask {
    let disk = disk_mask(width, height, cx, cy, radius);
    let r = radius.round() as isize;
    let (cxi, cyi) = (cx.round() as isize, cy.round() as isize);
    let half_w = (tab_width / 2) as isize;
    let len = tab_len as isize;
    BinaryMask::from_fn(width, height, |x, y| {
        if disk.get(x, y) {
            return true;
        }
        let dx = x as isize - cxi;
        let dy = y as isize - cyi;
        // Right, left, down, up tabs.
        (dy.abs() <= half_w && dx > 0 && dx <= r + len)
            || (dy.abs() <= half_w && dx < 0 && -dx <= r + len)
            || (dx.abs() <= half_w && dy > 0 && dy <= r + len)
            || (dx.abs() <= half_w && dy < 0 && -dy <= r + len)
    })
}

fn pixel_rng(seed: u64, index: u64, stream: u64) -> ChaCha8Rng {
    // SplitMix64-style mixing of (seed, stream, pixel counter) into one word.
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}

/// Adds i.i.d. zero-mean Gaussian noise of standard deviation `rho` to every
/// pixel, then clamps to `[0, 1]`.
pub fn add_gaussian_noise(image: &ScalarField, rho: f64, seed: u64) -> ScalarField {
    assert!(rho >= 0.0, "noise standard deviation must be nonnegative");
    if rho == 0.0 {
        return image.clone();
    }
    let (width, height) = image.dims();
    let src = image.as_slice();
    let data = (0..src.len())
        .map(|i| {
            let n: f64 = pixel_rng(seed, i as u64, 0).sample(StandardNormal);
            (src[i] + rho * n).clamp(0.0, 1.0)
        })
        .collect();
    ScalarField::from_vec(width, height, data)
}

/// Replaces each pixel, independently with probability `prob`, by 0 or 1 with
/// equal odds.
pub fn add_salt_pepper(image: &ScalarField, prob: f64, seed: u64) -> ScalarField {
    assert!((0.0..=1.0).contains(&prob), "probability must be in [0, 1]");
    let (width, height) = image.dims();
    let src = image.as_slice();
    let data = (0..src.len())
        .map(|i| {
            let mut rng = pixel_rng(seed, i as u64, 1);
            if rng.random::<f64>() < prob {
                if rng.random::<bool>() {
                    1.0
                } else {
                    0.0
                }
            } else {
                src[i]
            }
        })
        .collect();
    ScalarField::from_vec(width, height, data)
}
