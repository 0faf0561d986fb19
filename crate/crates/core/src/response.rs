//! Directional response field: the image correlated with every filter of a bank.
//!
//! Responses keep the image size; borders are handled by symmetric
//! reflection. Gabor kernels are point-symmetric, so correlation and
//! convolution coincide and the kernel is applied without flipping.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filter_bank::{FilterBank, Kernel};
use crate::image::GrayImage;

/// One response plane per orientation, each `width × height`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseStack {
    width: usize,
    height: usize,
    n_orientations: usize,
    data: Vec<f64>,
}

impl ResponseStack {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_orientations(&self) -> usize {
        self.n_orientations
    }

    /// Plane of the 1-based orientation `index`.
    pub fn plane(&self, index: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.data[(index - 1) * n..index * n]
    }

    /// Writes the response vector `r_1..r_No` at `(x, y)` into `out`.
    #[inline]
    pub fn pixel_into(&self, x: usize, y: usize, out: &mut [f64]) {
        let n = self.width * self.height;
        let idx = y * self.width + x;
        for (j, o) in out.iter_mut().enumerate().take(self.n_orientations) {
            *o = self.data[j * n + idx];
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n_orientations];
        self.pixel_into(x, y, &mut out);
        out
    }
}

/// Correlates `image` with every kernel of `bank`.
///
/// For zero-mean kernels the center intensity is subtracted inside the window
/// sum. This leaves the result unchanged in exact arithmetic and makes every
/// locally flat window produce an exact zero on all orientations.
pub fn convolve_responses(image: &GrayImage, bank: &FilterBank) -> Result<ResponseStack> {
    let (w, h) = (image.width(), image.height());
    if w < 3 || h < 3 {
        return Err(Error::input(format!("image must be at least 3x3, got {w}x{h}")));
    }
    let half = bank.kernel_size() / 2;
    let (padded, pw) = image.reflect_padded(half);
    let n_o = bank.n_orientations();

    let mut data = vec![0.0; n_o * w * h];
    data.par_chunks_mut(w)
        .enumerate()
        .for_each(|(row_id, out)| {
            let (j, y) = (row_id / h, row_id % h);
            correlate_row(&bank.filters()[j].kernel, &padded, pw, half, y, out);
        });

    Ok(ResponseStack {
        width: w,
        height: h,
        n_orientations: n_o,
        data,
    })
}

/// Computes output row `y` for one kernel. Accumulation runs over kernel
/// entries in row-major order for every pixel, so results do not depend on
/// how rows are scheduled.
fn correlate_row(kernel: &Kernel, padded: &[f64], pw: usize, half: usize, y: usize, out: &mut [f64]) {
    let w = out.len();
    let size = kernel.size();
    out.fill(0.0);
    let center_row = &padded[(y + half) * pw + half..(y + half) * pw + half + w];
    let zero_mean = kernel.is_zero_mean();
    for kr in 0..size {
        let src = &padded[(y + kr) * pw..(y + kr) * pw + pw];
        for (kc, &kv) in kernel.row(kr).iter().enumerate() {
            let window = &src[kc..kc + w];
            if zero_mean {
                for ((o, &s), &c) in out.iter_mut().zip(window).zip(center_row) {
                    *o += kv * (s - c);
                }
            } else {
                for (o, &s) in out.iter_mut().zip(window) {
                    *o += kv * s;
                }
            }
        }
    }
}

/// Smallest 1-based orientation index attaining the minimum response at `(x, y)`.
pub fn dominant_direction(stack: &ResponseStack, x: usize, y: usize) -> Result<usize> {
    if x >= stack.width || y >= stack.height {
        return Err(Error::input(format!(
            "({x}, {y}) outside {}x{} response field",
            stack.width, stack.height
        )));
    }
    Ok(argmin(&stack.pixel(x, y)) + 1)
}

/// 0-based index of the first minimum.
pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}
