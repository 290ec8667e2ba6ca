//! Discrete Gaussian kernel, zero-padded convolution, and the
//! threshold-dynamics boundary-length estimator built on them.
//!
//! The kernel samples the continuous Gaussian at integer offsets of a
//! `(2n+1) x (2n+1)` window and renormalizes to unit mass. Because the
//! sampled window factorizes, the 2-D convolution runs as two 1-D passes.
//!
//! Fields are extended by zero outside the domain. Affine expressions of a
//! labeling, such as `1 - u` or `1 - 2u`, are evaluated through that same
//! extension of `u`, so `G * (1 - u) = 1 - G * u` everywhere (the kernel has
//! unit mass); the constant part does not lose mass at the borders while `u`
//! does.

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Normalized discrete Gaussian of standard deviation `sigma` on a
/// `(2n+1) x (2n+1)` window.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel {
    sigma: f64,
    half_width: usize,
    /// 1-D factor, length `2n+1`, sums to 1; the 2-D weight is the product
    /// of the two factors.
    taps: Vec<f64>,
}

impl GaussianKernel {
    /// Builds the kernel. `sigma` must be positive and `half_width >= 1`.
    pub fn new(sigma: f64, half_width: usize) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if half_width < 1 {
            return Err(Error::InvalidParameter(
                "kernel half-width must be at least 1".into(),
            ));
        }
        let n = half_width as isize;
        let mut taps: Vec<f64> = (-n..=n)
            .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
            .collect();
        let total: f64 = taps.iter().sum();
        for t in &mut taps {
            *t /= total;
        }
        Ok(GaussianKernel {
            sigma,
            half_width,
            taps,
        })
    }

    /// Kernel with the default truncation `n = ceil(3 sigma)`, which keeps
    /// the discarded tail below 1e-3 of the kernel mass.
    pub fn with_default_width(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Self::new(sigma, default_half_width(sigma))
    }

    #[inline]
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    #[inline]
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// 2-D weight at offset `(dx, dy)`; zero outside the window.
    pub fn weight(&self, dx: isize, dy: isize) -> f64 {
        let n = self.half_width as isize;
        if dx.abs() > n || dy.abs() > n {
            return 0.0;
        }
        self.taps[(dx + n) as usize] * self.taps[(dy + n) as usize]
    }

    /// The 1-D factor of the separable kernel, centered, summing to 1.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }
}

/// `n = ceil(3 sigma)`, clamped to at least 1.
pub fn default_half_width(sigma: f64) -> usize {
    ((3.0 * sigma).ceil() as usize).max(1)
}

/// Convolves `field` with the kernel, treating everything outside the domain
/// as zero. Linear in `field`; exact adjoint of itself under the discrete
/// inner product because the window is symmetric.
pub fn convolve_zero_pad(field: &ScalarField, kernel: &GaussianKernel) -> ScalarField {
    let (width, height) = field.dims();
    let n = kernel.half_width as isize;
    let taps = &kernel.taps;
    let src = field.as_slice();

    // Horizontal pass.
    let mut tmp = vec![0.0f64; width * height];
    for y in 0..height {
        let row = &src[y * width..(y + 1) * width];
        let out_row = &mut tmp[y * width..(y + 1) * width];
        for x in 0..width as isize {
            let d_lo = (-n).max(x - (width as isize - 1));
            let d_hi = n.min(x);
            let mut acc = 0.0;
            for d in d_lo..=d_hi {
                acc += taps[(d + n) as usize] * row[(x - d) as usize];
            }
            out_row[x as usize] = acc;
        }
    }

    // Vertical pass.
    let mut out = vec![0.0f64; width * height];
    for y in 0..height as isize {
        let d_lo = (-n).max(y - (height as isize - 1));
        let d_hi = n.min(y);
        let out_row = &mut out[y as usize * width..(y as usize + 1) * width];
        for d in d_lo..=d_hi {
            let w = taps[(d + n) as usize];
            let src_row = &tmp[(y - d) as usize * width..((y - d) as usize + 1) * width];
            for (o, &s) in out_row.iter_mut().zip(src_row) {
                *o += w * s;
            }
        }
    }

    ScalarField::from_vec(width, height, out)
}

/// The boundary-length estimator `<u, G * (1 - u)>` with `u` zero-padded, so
/// the complement contributes mass outside the domain:
/// `q = sum_x u(x) * (1 - (G * u)(x))`.
///
/// Nonnegative for `u` in `[0, 1]`, concave, and proportional to the
/// foreground perimeter for smooth regions away from the borders.
pub fn td_boundary_measure(u: &ScalarField, kernel: &GaussianKernel) -> f64 {
    let conv = convolve_zero_pad(u, kernel);
    u.as_slice()
        .iter()
        .zip(conv.as_slice())
        .map(|(&ux, &cx)| ux * (1.0 - cx))
        .sum()
}

/// Measures the proportionality constant between the boundary estimator and
/// true perimeter: `c = q / (2 pi r)` for a centered disk of radius
/// `r = grid / 4`. Dividing the estimator by `c` converts it to pixel-length
/// perimeter units.
pub fn calibrate_perimeter_constant(sigma: f64, half_width: usize, grid: usize) -> Result<f64> {
    let kernel = GaussianKernel::new(sigma, half_width)?;
    if grid < 4 * (half_width + 2) {
        return Err(Error::InvalidParameter(format!(
            "calibration grid {grid} too small for kernel half-width {half_width}"
        )));
    }
    let radius = grid as f64 / 4.0;
    let center = (grid as f64 - 1.0) / 2.0;
    let disk = crate::synth::disk_mask(grid, grid, center, center, radius);
    let q = td_boundary_measure(&disk.to_field(), &kernel);
    Ok(q / (2.0 * std::f64::consts::PI * radius))
}
