//! Reference texture encodings: rotation-invariant uniform LBP, the Kirsch
//! compass family (LDP, ELDP, LDN) and the Gabor line-direction pattern
//! (LLDP with top-two encoding).
//!
//! All of them produce a [`LabelMap`] that is histogrammed and matched the
//! same way as LMDP. Index ties always resolve to the smaller index.

use rayon::prelude::*;

use crate::descriptor::{LabelMap, Method};
use crate::error::{Error, Result};
use crate::filter_bank::FilterBank;
use crate::image::GrayImage;
use crate::response::{argmin, convolve_responses};

/// Label assigned to non-uniform LBP patterns.
pub const LBP_NON_UNIFORM: u16 = 9;
pub const LBP_BINS: usize = 10;
pub const LDP_BINS: usize = 256;
pub const ELDP_BINS: usize = 64;
pub const LDN_BINS: usize = 64;
pub const DEFAULT_LDP_K: usize = 3;

/// 8-neighbourhood as `(dy, dx)`, counter-clockwise starting east.
const RING: [(isize, isize); 8] = [
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
];

fn check_image(image: &GrayImage) -> Result<()> {
    if image.width() < 3 || image.height() < 3 {
        return Err(Error::input(format!(
            "image must be at least 3x3, got {}x{}",
            image.width(),
            image.height()
        )));
    }
    Ok(())
}

/// Maps each pixel's reflection-padded 3×3 neighbourhood to a label, row-parallel.
fn map_neighbourhoods(image: &GrayImage, f: impl Fn(f64, &[f64; 8]) -> u16 + Sync) -> Vec<u16> {
    let (w, h) = (image.width(), image.height());
    let (padded, pw) = image.reflect_padded(1);
    let rows: Vec<Vec<u16>> = (0..h)
        .into_par_iter()
        .map(|y| {
            (0..w)
                .map(|x| {
                    let at = |dy: isize, dx: isize| {
                        padded[((y as isize + 1 + dy) as usize) * pw + (x as isize + 1 + dx) as usize]
                    };
                    let mut ring = [0.0; 8];
                    for (v, &(dy, dx)) in ring.iter_mut().zip(RING.iter()) {
                        *v = at(dy, dx);
                    }
                    f(at(0, 0), &ring)
                })
                .collect()
        })
        .collect();
    rows.concat()
}

/// Rotation-invariant uniform label of an 8-bit circular pattern: the number
/// of ones when there are at most two circular transitions, else 9.
pub fn riu2_label(pattern: u8) -> u16 {
    let transitions = (pattern ^ pattern.rotate_right(1)).count_ones();
    if transitions <= 2 {
        pattern.count_ones() as u16
    } else {
        LBP_NON_UNIFORM
    }
}

/// Radius-1, 8-neighbour LBP; a neighbour sets its bit when it is `>=` the center.
pub fn lbp_riu2(image: &GrayImage) -> Result<LabelMap> {
    check_image(image)?;
    let labels = map_neighbourhoods(image, |c, ring| {
        let mut p = 0u8;
        for (i, &g) in ring.iter().enumerate() {
            if g >= c {
                p |= 1 << i;
            }
        }
        riu2_label(p)
    });
    LabelMap::new(image.width(), image.height(), labels, Method::Lbp, LBP_BINS)
}

/// The eight 3×3 Kirsch compass masks, row-major. Mask `k` points along
/// ring direction `k` (0 = east, counter-clockwise in 45° steps) and weights
/// that direction and its two ring neighbours by 5, the rest by −3.
pub fn kirsch_masks() -> [[f64; 9]; 8] {
    let mut masks = [[-3.0; 9]; 8];
    for (k, mask) in masks.iter_mut().enumerate() {
        mask[4] = 0.0;
        for d in [7, 0, 1] {
            let (dy, dx) = RING[(k + d) % 8];
            mask[((dy + 1) * 3 + dx + 1) as usize] = 5.0;
        }
    }
    masks
}

/// Eight compass edge-response planes.
#[derive(Debug, Clone, PartialEq)]
pub struct KirschResponses {
    width: usize,
    height: usize,
    planes: [Vec<f64>; 8],
}

impl KirschResponses {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn plane(&self, k: usize) -> &[f64] {
        &self.planes[k]
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 8] {
        let i = y * self.width + x;
        std::array::from_fn(|k| self.planes[k][i])
    }
}

pub fn kirsch_responses(image: &GrayImage) -> Result<KirschResponses> {
    check_image(image)?;
    let (w, h) = (image.width(), image.height());
    let masks = kirsch_masks();
    let (padded, pw) = image.reflect_padded(1);
    let planes: Vec<Vec<f64>> = masks
        .par_iter()
        .map(|mask| {
            let mut out = Vec::with_capacity(w * h);
            for y in 0..h {
                for x in 0..w {
                    let mut acc = 0.0;
                    for r in 0..3 {
                        let row = &padded[(y + r) * pw + x..(y + r) * pw + x + 3];
                        for c in 0..3 {
                            acc += mask[r * 3 + c] * row[c];
                        }
                    }
                    out.push(acc);
                }
            }
            out
        })
        .collect();
    let planes: [Vec<f64>; 8] = planes.try_into().expect("eight masks");
    Ok(KirschResponses {
        width: w,
        height: h,
        planes,
    })
}

/// Indices sorted by descending response, ties to the smaller index.
fn rank_descending(responses: &[f64; 8]) -> [usize; 8] {
    let mut idx = [0, 1, 2, 3, 4, 5, 6, 7];
    idx.sort_by(|&a, &b| responses[b].total_cmp(&responses[a]).then(a.cmp(&b)));
    idx
}

/// 8-bit code with ones at the `k` largest responses.
pub fn ldp_code(responses: &[f64; 8], k: usize) -> Result<u16> {
    if !(1..=7).contains(&k) {
        return Err(Error::param(format!("LDP k must be in 1..=7, got {k}")));
    }
    Ok(rank_descending(responses)[..k].iter().fold(0u16, |code, &i| code | (1 << i)))
}

/// `t1 · 8 + t2` for the largest and second-largest responses (0-based).
pub fn eldp_code(responses: &[f64; 8]) -> u16 {
    let r = rank_descending(responses);
    (r[0] * 8 + r[1]) as u16
}

/// `argmax · 8 + argmin` (0-based).
pub fn ldn_code(responses: &[f64; 8]) -> u16 {
    let r = rank_descending(responses);
    let mut min = 0;
    for i in 1..8 {
        if responses[i] < responses[min] {
            min = i;
        }
    }
    (r[0] * 8 + min) as u16
}

fn kirsch_label_map(image: &GrayImage, method: Method, bins: usize, code: impl Fn(&[f64; 8]) -> u16 + Sync) -> Result<LabelMap> {
    let resp = kirsch_responses(image)?;
    let (w, h) = (image.width(), image.height());
    let labels: Vec<u16> = (0..w * h)
        .into_par_iter()
        .map(|i| code(&resp.pixel(i % w, i / w)))
        .collect();
    LabelMap::new(w, h, labels, method, bins)
}

pub fn ldp(image: &GrayImage, k: usize) -> Result<LabelMap> {
    if !(1..=7).contains(&k) {
        return Err(Error::param(format!("LDP k must be in 1..=7, got {k}")));
    }
    kirsch_label_map(image, Method::Ldp, LDP_BINS, |r| {
        ldp_code(r, k).expect("k checked")
    })
}

pub fn eldp(image: &GrayImage) -> Result<LabelMap> {
    kirsch_label_map(image, Method::Eldp, ELDP_BINS, eldp_code)
}

pub fn ldn(image: &GrayImage) -> Result<LabelMap> {
    kirsch_label_map(image, Method::Ldn, LDN_BINS, ldn_code)
}

/// `t1 · N_o + t2` with `t1`, `t2` the 1-based indices of the smallest and
/// second-smallest Gabor responses (the two strongest line responses).
pub fn lldp_code(responses: &[f64]) -> u16 {
    let n = responses.len();
    let t1 = argmin(responses);
    let mut t2 = if t1 == 0 { 1 } else { 0 };
    for (i, &r) in responses.iter().enumerate() {
        if i != t1 && r < responses[t2] {
            t2 = i;
        }
    }
    ((t1 + 1) * n + t2 + 1) as u16
}

/// Gabor-based local line directional pattern.
pub fn lldp_gabor_eldp(image: &GrayImage, bank: &FilterBank) -> Result<LabelMap> {
    let stack = convolve_responses(image, bank)?;
    let (w, h) = (image.width(), image.height());
    let n = bank.n_orientations();
    let labels: Vec<u16> = (0..h)
        .into_par_iter()
        .flat_map_iter(|y| {
            let mut r = vec![0.0; n];
            let stack = &stack;
            (0..w)
                .map(move |x| {
                    stack.pixel_into(x, y, &mut r);
                    lldp_code(&r)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    LabelMap::new(w, h, labels, Method::Lldp, n * n + n)
}
