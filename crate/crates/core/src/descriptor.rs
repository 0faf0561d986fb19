//! Block-wise label histograms and Chi-square matching.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filter_bank::FilterBank;
use crate::image::GrayImage;
use crate::pattern::{label_count, label_fast};
use crate::response::convolve_responses;

/// Default block side length.
pub const DEFAULT_BLOCK_SIZE: usize = 16;

/// Pixel encoding a label map was produced with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Lmdp,
    Lbp,
    Ldp,
    Eldp,
    Ldn,
    Lldp,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Lmdp,
        Method::Lbp,
        Method::Ldp,
        Method::Eldp,
        Method::Ldn,
        Method::Lldp,
    ];

    /// Identifier stored in descriptor files.
    pub fn id(self) -> u8 {
        match self {
            Method::Lmdp => 0,
            Method::Lbp => 1,
            Method::Ldp => 2,
            Method::Eldp => 3,
            Method::Ldn => 4,
            Method::Lldp => 5,
        }
    }

    pub fn from_id(id: u8) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.id() == id)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Lmdp => "lmdp",
            Method::Lbp => "lbp",
            Method::Ldp => "ldp",
            Method::Eldp => "eldp",
            Method::Ldn => "ldn",
            Method::Lldp => "lldp",
        }
    }

    /// Whether the method needs a Gabor filter bank.
    pub fn uses_bank(self) -> bool {
        matches!(self, Method::Lmdp | Method::Lldp)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param(format!("unknown method {s:?}")))
    }
}

/// Per-pixel labels in `0..n_labels`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u16>,
    method: Method,
    n_labels: usize,
}

impl LabelMap {
    pub fn new(width: usize, height: usize, labels: Vec<u16>, method: Method, n_labels: usize) -> Result<Self> {
        if width == 0 || height == 0 || labels.len() != width * height {
            return Err(Error::input(format!(
                "{} labels do not fill a {width}x{height} map",
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= n_labels) {
            return Err(Error::input(format!(
                "label {bad} outside 0..{n_labels} for {method}"
            )));
        }
        Ok(Self {
            width,
            height,
            labels,
            method,
            n_labels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.labels[y * self.width + x]
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }
}

/// Concatenated per-block label histograms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descriptor {
    method: Method,
    block_size: usize,
    n_blocks: usize,
    bins_per_block: usize,
    counts: Vec<u32>,
}

impl Descriptor {
    pub fn new(
        method: Method,
        block_size: usize,
        n_blocks: usize,
        bins_per_block: usize,
        counts: Vec<u32>,
    ) -> Result<Self> {
        if block_size == 0 || n_blocks == 0 || bins_per_block == 0 {
            return Err(Error::input("descriptor dimensions must be positive"));
        }
        if counts.len() != n_blocks * bins_per_block {
            return Err(Error::input(format!(
                "{} counts for {n_blocks} blocks of {bins_per_block} bins",
                counts.len()
            )));
        }
        Ok(Self {
            method,
            block_size,
            n_blocks,
            bins_per_block,
            counts,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn bins_per_block(&self) -> usize {
        self.bins_per_block
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn block(&self, i: usize) -> &[u32] {
        &self.counts[i * self.bins_per_block..(i + 1) * self.bins_per_block]
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Per-pixel LMDP labels of `image`.
pub fn build_label_map(image: &GrayImage, bank: &FilterBank) -> Result<LabelMap> {
    let (labels, _) = lmdp_labels_and_counts(image, bank)?;
    LabelMap::new(
        image.width(),
        image.height(),
        labels,
        Method::Lmdp,
        label_count(bank.n_orientations()),
    )
}

/// LMDP labels together with the per-pixel DP counts.
pub(crate) fn lmdp_labels_and_counts(image: &GrayImage, bank: &FilterBank) -> Result<(Vec<u16>, Vec<u8>)> {
    let stack = convolve_responses(image, bank)?;
    let (w, h) = (image.width(), image.height());
    let n_o = bank.n_orientations();
    let rows: Vec<(Vec<u16>, Vec<u8>)> = (0..h)
        .into_par_iter()
        .map(|y| {
            let mut r = vec![0.0; n_o];
            let mut labels = Vec::with_capacity(w);
            let mut dpns = Vec::with_capacity(w);
            for x in 0..w {
                stack.pixel_into(x, y, &mut r);
                let (label, dpn) = label_fast(&r);
                labels.push(label);
                dpns.push(dpn as u8);
            }
            (labels, dpns)
        })
        .collect();
    let mut labels = Vec::with_capacity(w * h);
    let mut dpns = Vec::with_capacity(w * h);
    for (l, d) in rows {
        labels.extend(l);
        dpns.extend(d);
    }
    Ok((labels, dpns))
}

/// Histograms of non-overlapping `block_size²` blocks, scanned row-major.
///
/// Maps whose sides are not multiples of the block size are center-cropped to
/// the largest multiple first.
pub fn block_histograms(map: &LabelMap, block_size: usize) -> Result<Descriptor> {
    if block_size == 0 {
        return Err(Error::param("block size must be at least 1"));
    }
    let bx = map.width / block_size;
    let by = map.height / block_size;
    if bx == 0 || by == 0 {
        return Err(Error::input(format!(
            "{}x{} map is smaller than one {block_size}x{block_size} block",
            map.width, map.height
        )));
    }
    let x0 = (map.width - bx * block_size) / 2;
    let y0 = (map.height - by * block_size) / 2;
    let bins = map.n_labels;
    let mut counts = vec![0u32; bx * by * bins];
    for (b, hist) in counts.chunks_mut(bins).enumerate() {
        let (cx, cy) = (b % bx, b / bx);
        for y in y0 + cy * block_size..y0 + (cy + 1) * block_size {
            let row = &map.labels[y * map.width..(y + 1) * map.width];
            for &l in &row[x0 + cx * block_size..x0 + (cx + 1) * block_size] {
                hist[l as usize] += 1;
            }
        }
    }
    Descriptor::new(map.method, block_size, bx * by, bins, counts)
}

/// `Σ (a_i − b_i)² / (a_i + b_i)`; bins empty in both descriptors add nothing.
pub fn chi_square(a: &Descriptor, b: &Descriptor) -> Result<f64> {
    if a.method != b.method
        || a.block_size != b.block_size
        || a.n_blocks != b.n_blocks
        || a.bins_per_block != b.bins_per_block
    {
        return Err(Error::input(format!(
            "cannot compare {} ({} blocks of {} bins, p={}) with {} ({} blocks of {} bins, p={})",
            a.method, a.n_blocks, a.bins_per_block, a.block_size,
            b.method, b.n_blocks, b.bins_per_block, b.block_size
        )));
    }
    Ok(a.counts
        .iter()
        .zip(&b.counts)
        .map(|(&x, &y)| {
            let sum = x as u64 + y as u64;
            if sum == 0 {
                0.0
            } else {
                let d = x as f64 - y as f64;
                d * d / sum as f64
            }
        })
        .sum())
}
