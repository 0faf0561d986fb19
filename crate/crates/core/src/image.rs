//! Grayscale raster used throughout the pipeline.

use crate::error::{Error, Result};

/// Row-major grayscale image with real intensities, nominally in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::input(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::input(format!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|p| !p.is_finite()) {
            return Err(Error::input(format!("pixel {i} is not finite")));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    /// Applies `f` to every intensity.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.width, self.height, self.pixels.iter().map(|&p| f(p)).collect())
    }

    /// Copy of the image extended by `pad` pixels on every side using
    /// half-sample symmetric reflection (`c b a | a b c | c b a`). Pads wider
    /// than the image keep folding.
    pub(crate) fn reflect_padded(&self, pad: usize) -> (Vec<f64>, usize) {
        let pw = self.width + 2 * pad;
        let ph = self.height + 2 * pad;
        let cols: Vec<usize> = (0..pw)
            .map(|i| reflect_index(i as isize - pad as isize, self.width))
            .collect();
        let mut out = Vec::with_capacity(pw * ph);
        for py in 0..ph {
            let row = self.row(reflect_index(py as isize - pad as isize, self.height));
            out.extend(cols.iter().map(|&c| row[c]));
        }
        (out, pw)
    }
}

/// Folds any integer coordinate into `0..len` by symmetric reflection.
#[inline]
pub(crate) fn reflect_index(i: isize, len: usize) -> usize {
    let period = 2 * len as isize;
    let m = i.rem_euclid(period);
    if m < len as isize {
        m as usize
    } else {
        (period - 1 - m) as usize
    }
}
