//! Region forces: the pixelwise fidelity field `f` driving every solver.
//! Negative values favor foreground.

use crate::field::{BinaryMask, ScalarField};

/// Two-phase fidelity `f = (I - c1)^2 - (I - c2)^2` for foreground mean `c1`
/// and background mean `c2`. Negative where the image is closer to `c1`.
pub fn two_phase_force(image: &ScalarField, c1: f64, c2: f64) -> ScalarField {
    if c1 == c2 {
        log::warn!("degenerate region force: c1 == c2 == {c1} yields an all-zero field");
    }
    image.map(|v| {
        let a = v - c1;
        let b = v - c2;
        a * a - b * b
    })
}

/// Chan-Vese-style mean refresh: `c1` over the foreground, `c2` over the
/// background. An empty side falls back to 0.5.
pub fn update_means(image: &ScalarField, mask: &BinaryMask) -> (f64, f64) {
    let mut sum_fg = 0.0;
    let mut n_fg = 0usize;
    let mut sum_bg = 0.0;
    let mut n_bg = 0usize;
    for (y, row) in image.as_slice().chunks(image.width()).enumerate() {
        for (x, &v) in row.iter().enumerate() {
            if mask.get(x, y) {
                sum_fg += v;
                n_fg += 1;
            } else {
                sum_bg += v;
                n_bg += 1;
            }
        }
    }
    let c1 = if n_fg == 0 { 0.5 } else { sum_fg / n_fg as f64 };
    let c2 = if n_bg == 0 { 0.5 } else { sum_bg / n_bg as f64 };
    (c1, c2)
}

/// Region force realizing the network-layer objective: `f = -o`, so that the
/// solver's `lambda * <f, u>` term becomes `lambda * <-o, u>`.
pub fn force_from_logits(logits: &ScalarField) -> ScalarField {
    logits.map(|v| -v)
}
