//! Synthetic palm-line images with known line angles.
//!
//! Lines are dark Gaussian valleys on a light background, all passing through
//! the (optionally offset) image center. Angles are measured counter-clockwise
//! from the horizontal with the image's y axis pointing up, matching the
//! orientation convention of the filter bank.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::image::GrayImage;

use super::DatasetEntry;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    /// Side length of the square image.
    pub size: usize,
    /// Line angles in radians, each in `[0, π)`.
    pub angles: Vec<f64>,
    /// Full width at half depth of a line's cross-section, in pixels.
    pub width: f64,
    /// Intensity drop at a line's center.
    pub depth: f64,
    pub background: f64,
    /// Standard deviation of additive Gaussian noise.
    pub noise: f64,
    /// Displacement `(dx, dy)` of the common crossing point from the image
    /// center, in pixels (`dy` positive downwards).
    pub offset: (f64, f64),
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            size: 128,
            angles: Vec::new(),
            width: 8.0,
            depth: 80.0,
            background: 180.0,
            noise: 0.0,
            offset: (0.0, 0.0),
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size < 32 {
            return Err(Error::param(format!("synthetic size must be at least 32, got {}", self.size)));
        }
        if self.angles.len() > 4 {
            return Err(Error::param(format!("at most 4 lines, got {}", self.angles.len())));
        }
        if let Some(a) = self.angles.iter().find(|a| !(0.0..PI).contains(*a)) {
            return Err(Error::param(format!("line angle {a} outside [0, pi)")));
        }
        if !(self.width.is_finite() && self.width >= 1.0) {
            return Err(Error::param(format!("line width must be at least 1, got {}", self.width)));
        }
        for (name, v) in [("depth", self.depth), ("background", self.background)] {
            if !v.is_finite() {
                return Err(Error::param(format!("{name} must be finite")));
            }
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(Error::param(format!("noise must be non-negative, got {}", self.noise)));
        }
        if !(self.offset.0.is_finite() && self.offset.1.is_finite()) {
            return Err(Error::param("offset must be finite"));
        }
        Ok(())
    }

    /// Pixel coordinates of the crossing point.
    pub fn center(&self) -> (f64, f64) {
        let c = (self.size as f64 - 1.0) / 2.0;
        (c + self.offset.0, c + self.offset.1)
    }

    /// Perpendicular distance from pixel `(x, y)` to the line at `angle`.
    pub fn distance_to_line(&self, angle: f64, x: usize, y: usize) -> f64 {
        let (cx, cy) = self.center();
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        let (s, c) = angle.sin_cos();
        (dx * s + dy * c).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticImage {
    pub image: GrayImage,
    /// Ground-truth line angles, as rendered.
    pub angles: Vec<f64>,
}

/// Renders `spec`; noise is drawn from a ChaCha8 stream seeded by `seed`, so
/// equal inputs give bit-identical images.
pub fn render_synthetic(spec: &SynthSpec, seed: u64) -> Result<SyntheticImage> {
    spec.validate()?;
    let profile_sd = spec.width / (2.0 * (2.0 * 2f64.ln()).sqrt());
    let two_var = 2.0 * profile_sd * profile_sd;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spec.noise).map_err(|e| Error::param(e.to_string()))?;
    let image = GrayImage::from_fn(spec.size, spec.size, |x, y| {
        let darkest = spec
            .angles
            .iter()
            .map(|&a| {
                let d = spec.distance_to_line(a, x, y);
                (-d * d / two_var).exp()
            })
            .fold(0.0, f64::max);
        let mut v = spec.background - spec.depth * darkest;
        if spec.noise > 0.0 {
            v += noise.sample(&mut rng);
        }
        v.clamp(0.0, 255.0)
    })?;
    Ok(SyntheticImage {
        image,
        angles: spec.angles.clone(),
    })
}

/// Smallest angular distance between two undirected line angles.
fn line_angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Synthetic identity set: each identity is a distinct pair of crossing
/// lines, and each sample re-renders that pair with fresh noise and a random
/// crossing-point jitter of up to `jitter` pixels per axis.
///
/// Entries are named `id<NN>` / `<MM>` and come back sorted like a loaded
/// dataset.
pub fn render_identity_set(
    base: &SynthSpec,
    n_identities: usize,
    n_samples: usize,
    jitter: f64,
    seed: u64,
) -> Result<Vec<DatasetEntry>> {
    if n_identities == 0 || n_samples == 0 {
        return Err(Error::param("identity set needs at least one identity and one sample"));
    }
    if !(jitter.is_finite() && jitter >= 0.0) {
        return Err(Error::param(format!("jitter must be non-negative, got {jitter}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_gap = PI / 9.0;
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n_identities);
    let mut attempts = 0;
    while pairs.len() < n_identities {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::param(format!("cannot place {n_identities} distinct line pairs")));
        }
        let a: f64 = rng.random_range(0.0..PI);
        let b: f64 = rng.random_range(0.0..PI);
        if line_angle_gap(a, b) < min_gap {
            continue;
        }
        let distinct = pairs.iter().all(|&(p, q)| {
            let same = line_angle_gap(a, p).max(line_angle_gap(b, q));
            let swapped = line_angle_gap(a, q).max(line_angle_gap(b, p));
            same.min(swapped) >= min_gap / 2.0
        });
        if distinct {
            pairs.push((a, b));
        }
    }

    let width = (n_identities - 1).to_string().len().max(2);
    let mut entries = Vec::with_capacity(n_identities * n_samples);
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for s in 0..n_samples {
            let spec = SynthSpec {
                angles: vec![a, b],
                offset: (rng.random_range(-jitter..=jitter), rng.random_range(-jitter..=jitter)),
                ..base.clone()
            };
            let image = render_synthetic(&spec, rng.random())?.image;
            entries.push(DatasetEntry {
                palm_id: format!("id{i:0width$}"),
                sample_id: format!("{s:02}"),
                image,
            });
        }
    }
    Ok(entries)
}
