//! Dense 2-D grid containers and the elementwise operations every solver
//! shares.
//!
//! All grids are row-major with pixel `(x, y)` stored at index `y * width + x`
//! and unit pixel area, so inner products and areas are plain sums.

use crate::error::{Error, Result};

/// A dense 2-D grid of `f64` values (image, region force, label, logits).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ScalarField {
    /// All-zero field of the given size. Panics if either dimension is 0.
    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    /// Constant field.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width >= 1 && height >= 1, "field dimensions must be >= 1");
        ScalarField {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Wraps an existing row-major buffer. Panics if the length is not
    /// `width * height`.
    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert!(width >= 1 && height >= 1, "field dimensions must be >= 1");
        assert_eq!(data.len(), width * height, "buffer length mismatch");
        ScalarField {
            width,
            height,
            data,
        }
    }

    /// Builds a field by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width >= 1 && height >= 1, "field dimensions must be >= 1");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        ScalarField {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Sum over all pixels (the discrete integral).
    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// New field with `f` applied to every value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    #[inline]
    pub fn same_dims(&self, other: &ScalarField) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_same_dims(&self, other: &ScalarField) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other.dims(),
            })
        }
    }
}

/// A 2-D grid of {0, 1} labels (segmentation result, ground truth).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl BinaryMask {
    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "mask dimensions must be >= 1");
        BinaryMask {
            width,
            height,
            data: vec![0; width * height],
        }
    }

    /// Builds a mask by evaluating a predicate at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        assert!(width >= 1 && height >= 1, "mask dimensions must be >= 1");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(u8::from(f(x, y)));
            }
        }
        BinaryMask {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x] != 0
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = u8::from(value);
    }

    /// Raw 0/1 bytes, row-major.
    #[inline]
    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    /// Number of foreground pixels.
    pub fn area(&self) -> usize {
        self.data.iter().map(|&v| v as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// The mask as a 0.0/1.0 scalar field.
    pub fn to_field(&self) -> ScalarField {
        ScalarField {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f64::from(v)).collect(),
        }
    }

    #[inline]
    pub fn same_dims(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_same_dims(&self, other: &BinaryMask) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other.dims(),
            })
        }
    }
}

/// A scalar field constrained to values in `[0, 1]` (a relaxed labeling).
#[derive(Debug, Clone, PartialEq)]
pub struct LabelField(ScalarField);

impl LabelField {
    /// Validates that every value lies in `[0, 1]`.
    pub fn new(field: ScalarField) -> Result<Self> {
        if field.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v)) {
            Ok(LabelField(field))
        } else {
            Err(Error::InvalidParameter(
                "label field values must lie in [0, 1]".into(),
            ))
        }
    }

    /// Constant labeling.
    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(ScalarField::filled(width, height, value))
    }

    /// Skips validation; callers must guarantee the range invariant.
    pub(crate) fn from_field_unchecked(field: ScalarField) -> Self {
        debug_assert!(field.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v)));
        LabelField(field)
    }

    #[inline]
    pub fn field(&self) -> &ScalarField {
        &self.0
    }

    pub fn into_field(self) -> ScalarField {
        self.0
    }
}

impl From<&BinaryMask> for LabelField {
    fn from(mask: &BinaryMask) -> Self {
        LabelField(mask.to_field())
    }
}

impl std::ops::Deref for LabelField {
    type Target = ScalarField;

    fn deref(&self) -> &ScalarField {
        &self.0
    }
}

/// Discrete L2 inner product: sum over pixels of `a * b`.
pub fn inner_product(a: &ScalarField, b: &ScalarField) -> Result<f64> {
    a.check_same_dims(b)?;
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| x * y)
        .sum())
}

/// Strict binarization: `1` exactly where `u(x) > t`.
pub fn threshold(u: &ScalarField, t: f64) -> BinaryMask {
    BinaryMask {
        width: u.width(),
        height: u.height(),
        data: u.as_slice().iter().map(|&v| u8::from(v > t)).collect(),
    }
}
