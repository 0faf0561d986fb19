//! Oriented real-Gabor line detectors.
//!
//! Kernel entry `(x, y)` is sampled at integer offsets in `[-h, h]²` with
//! `h = (size - 1) / 2`. `x` indexes kernel rows (pointing down the image) and
//! `y` indexes columns (pointing right), so the positive central ridge of the
//! kernel built for angle `θ` runs at `θ` measured counter-clockwise from the
//! image's horizontal axis. A dark line at `θ_j` therefore produces the
//! smallest correlation response on filter `j`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest orientation count a bit pattern can hold (`Σ b_j 2^j` must fit in a `u64`).
pub const MAX_ORIENTATIONS: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaborParams {
    /// Radial frequency of the cosine carrier.
    pub mu: f64,
    /// Standard deviation of the isotropic Gaussian envelope, in pixels.
    pub sigma: f64,
    /// Odd side length of the sampled kernel.
    pub kernel_size: usize,
    pub n_orientations: usize,
    /// Subtract the kernel mean so every filter is DC-free.
    pub zero_mean: bool,
}

impl Default for GaborParams {
    fn default() -> Self {
        Self {
            mu: 0.11,
            sigma: 5.6179,
            kernel_size: 35,
            n_orientations: 12,
            zero_mean: true,
        }
    }
}

impl GaborParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::param(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::param(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.kernel_size < 3 || self.kernel_size.is_multiple_of(2) {
            return Err(Error::param(format!(
                "kernel size must be odd and at least 3, got {}",
                self.kernel_size
            )));
        }
        if !(2..=MAX_ORIENTATIONS).contains(&self.n_orientations) {
            return Err(Error::param(format!(
                "orientation count must be in 2..={MAX_ORIENTATIONS}, got {}",
                self.n_orientations
            )));
        }
        Ok(())
    }

    /// Angle of the 1-based orientation `index`.
    pub fn theta(&self, index: usize) -> f64 {
        (index - 1) as f64 * PI / self.n_orientations as f64
    }
}

/// Square real kernel stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    size: usize,
    data: Vec<f64>,
    zero_mean: bool,
}

impl Kernel {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn half(&self) -> usize {
        self.size / 2
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.size..(r + 1) * self.size]
    }

    /// Entry at signed offset `(x, y)` from the center.
    pub fn at(&self, x: isize, y: isize) -> f64 {
        let h = self.half() as isize;
        self.data[((x + h) * self.size as isize + (y + h)) as usize]
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn is_zero_mean(&self) -> bool {
        self.zero_mean
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalFilter {
    /// 1-based orientation index.
    pub index: usize,
    pub theta: f64,
    pub kernel: Kernel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    params: GaborParams,
    filters: Vec<DirectionalFilter>,
}

impl FilterBank {
    pub fn new(params: GaborParams) -> Result<Self> {
        build_bank(params)
    }

    pub fn params(&self) -> &GaborParams {
        &self.params
    }

    pub fn filters(&self) -> &[DirectionalFilter] {
        &self.filters
    }

    pub fn n_orientations(&self) -> usize {
        self.filters.len()
    }

    pub fn kernel_size(&self) -> usize {
        self.params.kernel_size
    }
}

/// Samples the real Gabor function
/// `exp(-(x²+y²)/2σ²) / (2πσ²) · cos(2πμ(x cosθ + y sinθ))`
/// on the kernel grid, optionally removing its mean afterwards.
pub fn build_gabor_kernel(params: &GaborParams, theta: f64) -> Result<Kernel> {
    params.validate()?;
    if !theta.is_finite() {
        return Err(Error::param("theta must be finite"));
    }
    let size = params.kernel_size;
    let h = (size / 2) as isize;
    let two_var = 2.0 * params.sigma * params.sigma;
    let norm = 1.0 / (PI * two_var);
    let (sin_t, cos_t) = theta.sin_cos();
    let omega = 2.0 * PI * params.mu;

    let mut data = Vec::with_capacity(size * size);
    for x in -h..=h {
        for y in -h..=h {
            let (xf, yf) = (x as f64, y as f64);
            let envelope = norm * (-(xf * xf + yf * yf) / two_var).exp();
            data.push(envelope * (omega * (xf * cos_t + yf * sin_t)).cos());
        }
    }
    if params.zero_mean {
        let mean = data.iter().sum::<f64>() / data.len() as f64;
        data.iter_mut().for_each(|v| *v -= mean);
    }
    Ok(Kernel {
        size,
        data,
        zero_mean: params.zero_mean,
    })
}

pub fn build_bank(params: GaborParams) -> Result<FilterBank> {
    params.validate()?;
    let filters = (1..=params.n_orientations)
        .map(|index| {
            let theta = params.theta(index);
            build_gabor_kernel(&params, theta).map(|kernel| DirectionalFilter {
                index,
                theta,
                kernel,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FilterBank { params, filters })
}
